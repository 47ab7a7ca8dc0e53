#include "lrcycle/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lrcycle {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

// Non-empty, non-comment lines.
std::vector<std::string_view> data_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const std::string_view line = trim(text.substr(start, pos - start));
    if (!line.empty() && line.front() != '#') lines.push_back(line);
    start = pos + 1;
  }
  return lines;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Dataset parse_dataset_csv(std::string_view text) {
  const std::vector<std::string_view> lines = data_lines(text);
  if (lines.empty()) throw InputError("dataset CSV is empty");

  std::size_t first = 0;
  bool labeled = false;
  std::vector<std::string_view> head = split(lines[0], ',');
  double probe;
  if (!parse_number(head[0], probe)) {
    first = 1;
    for (std::size_t j = 0; j < head.size(); ++j) {
      if (head[j] == "label") {
        if (j + 1 != head.size()) throw InputError("the label column must be the last column");
        labeled = true;
      }
    }
  }
  if (first == lines.size()) throw InputError("dataset CSV has a header but no rows");

  const std::size_t cols = split(lines[first], ',').size();
  const std::size_t features = labeled ? cols - 1 : cols;
  if (features == 0) throw InputError("dataset CSV has no feature columns");
  const Index n = static_cast<Index>(lines.size() - first);
  Examples x(n, static_cast<Index>(features));
  Vector labels = Vector::Ones(n);
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto fields = split(lines[r], ',');
    const Index i = static_cast<Index>(r - first);
    if (fields.size() != cols) {
      throw InputError("row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      double v;
      if (!parse_number(fields[j], v) || !std::isfinite(v)) {
        throw InputError("row " + std::to_string(r + 1) + ": cannot parse '" +
                         std::string(fields[j]) + "' as a finite number");
      }
      if (j < features) {
        x(i, static_cast<Index>(j)) = v;
      } else {
        labels(i) = v;
      }
    }
  }
  if (!labeled) return Dataset(std::move(x));
  try {
    return Dataset::from_labeled(x, labels);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

Dataset load_dataset_csv(const std::filesystem::path& path) {
  return parse_dataset_csv(read_text(path));
}

std::string examples_to_csv(const Examples& x) {
  std::string out;
  for (Index j = 0; j < x.cols(); ++j) {
    if (j > 0) out += ',';
    out += "x" + std::to_string(j + 1);
  }
  out += '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(x(i, j));
    }
    out += '\n';
  }
  return out;
}

std::vector<double> load_csv_column(const std::filesystem::path& path, const std::string& column) {
  const std::string text = read_text(path);
  const std::vector<std::string_view> lines = data_lines(text);
  if (lines.empty()) throw InputError(path.string() + " is empty");
  const auto head = split(lines[0], ',');
  std::size_t col = head.size();
  for (std::size_t j = 0; j < head.size(); ++j) {
    if (head[j] == column) col = j;
  }
  if (col == head.size()) throw InputError(path.string() + " has no column '" + column + "'");
  std::vector<double> out;
  out.reserve(lines.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split(lines[r], ',');
    double v;
    if (col >= fields.size() || !parse_number(fields[col], v)) {
      throw InputError(path.string() + ": bad value in row " + std::to_string(r + 1));
    }
    out.push_back(v);
  }
  return out;
}

LiftedSpec load_lifted_spec(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
    LiftedSpec spec;
    spec.base_csv = j.at("base_csv").get<std::string>();
    spec.ambient_dim = j.at("ambient_dim").get<Index>();
    if (spec.base_csv.is_relative()) spec.base_csv = path.parent_path() / spec.base_csv;
    return spec;
  } catch (const Json::exception& e) {
    throw InputError("bad lifted spec " + path.string() + ": " + e.what());
  }
}

void write_lifted_spec(const std::filesystem::path& path, const LiftedSpec& spec) {
  Json j;
  j["base_csv"] = spec.base_csv.string();
  j["ambient_dim"] = spec.ambient_dim;
  write_text(path, j.dump(2) + "\n");
}

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const SolveReport& r) {
  Json j;
  j["w_star"] = to_json(r.w_star);
  j["lambda"] = r.lambda_max;
  j["grad_norm"] = r.grad_norm;
  j["iters"] = r.newton_iters;
  j["separable"] = r.separable;
  j["residuals"] = r.residuals;
  return j;
}

Json to_json(const onedim::LemmaReport& r) {
  Json j;
  j["checked"] = r.checked;
  j["crossings"] = r.crossings;
  j["worst_one_step_ratio"] = r.worst_one_step_ratio;
  j["worst_ratio"] = r.worst_ratio;
  j["worst_bound_margin"] = r.worst_bound_margin;
  return j;
}

Json to_json(const LiftReport& r) {
  Json j;
  j["scale"] = r.scale;
  j["w_b_star"] = to_json(r.w_b_star);
  j["lambda_b"] = r.lambda_b;
  j["c_b"] = r.c_b;
  j["min_dim"] = r.min_dim;
  j["chosen_dim"] = r.chosen_dim;
  j["grad_norm_at_lifted_solution"] = r.grad_norm_at_lifted_solution;
  j["lambda_lifted"] = r.lambda_lifted;
  if (r.block_check) {
    j["block_residuals"] = {{"top_left", r.block_check->top_left},
                            {"bottom_right", r.block_check->bottom_right},
                            {"off_diagonal", r.block_check->off_diagonal}};
  } else {
    j["block_residuals"] = nullptr;
  }
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const CycleReport& r) {
  Json j;
  j["period"] = r.period;
  j["recurrence_residual"] = r.recurrence_residual;
  Json peaks = Json::array();
  for (const SpectralPeak& p : r.spectral_peaks) {
    peaks.push_back({{"frequency", p.frequency}, {"power", p.power}});
  }
  j["spectral_peaks"] = std::move(peaks);
  j["spectral_period"] = r.spectral_period ? Json(*r.spectral_period) : Json(nullptr);
  j["floquet_multipliers"] = r.floquet_multipliers ? Json(*r.floquet_multipliers) : Json(nullptr);
  Json points = Json::array();
  for (const Vector& p : r.cycle_points) points.push_back(to_json(p));
  j["cycle_points"] = std::move(points);
  return j;
}

Json to_json(const ScalingCheck& r) {
  Json j;
  j["max_deviation"] = r.max_deviation;
  j["lambda"] = r.lambda;
  j["lambda_scaled"] = r.lambda_scaled;
  j["lambda_ratio_error"] = r.lambda_ratio_error;
  j["w_star_error"] = r.w_star_error;
  return j;
}

Json to_json(const HuntResult& r) {
  Json j;
  j["trial"] = r.trial;
  j["gamma"] = r.gamma;
  j["lambda"] = r.lambda;
  j["eta"] = r.eta;
  j["w_star"] = to_json(r.w_star);
  j["basin_sample"] = r.basin_sample;
  j["reverify_residual"] = r.reverify_residual;
  j["cycle"] = to_json(r.cycle);
  j["dataset_csv"] = examples_to_csv(r.dataset.examples());
  return j;
}

HuntResult hunt_result_from_json(const Json& j) {
  try {
    const auto vec = [](const Json& a) {
      Vector v(static_cast<Index>(a.size()));
      for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
      return v;
    };
    CycleReport cycle;
    const Json& c = j.at("cycle");
    cycle.period = c.at("period").get<int>();
    cycle.recurrence_residual = c.at("recurrence_residual").get<double>();
    for (const Json& p : c.at("cycle_points")) cycle.cycle_points.push_back(vec(p));
    if (!c.at("floquet_multipliers").is_null()) {
      cycle.floquet_multipliers = c.at("floquet_multipliers").get<std::vector<double>>();
    }
    if (!c.at("spectral_period").is_null()) cycle.spectral_period = c.at("spectral_period").get<int>();
    return HuntResult{j.at("trial").get<int>(),
                      parse_dataset_csv(j.at("dataset_csv").get<std::string>()),
                      j.at("gamma").get<double>(),
                      j.at("lambda").get<double>(),
                      j.at("eta").get<double>(),
                      vec(j.at("w_star")),
                      std::move(cycle),
                      j.at("basin_sample").get<double>(),
                      j.at("reverify_residual").get<double>()};
  } catch (const Json::exception& e) {
    throw InputError(std::string("bad hunt record: ") + e.what());
  }
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "step,norm";
  for (const auto& [coord, series] : t.sampled_coords) out += ",w" + std::to_string(coord);
  out += '\n';
  for (std::size_t s = 0; s < t.norm_series.size(); ++s) {
    out += std::to_string(s);
    out += ',';
    out += format_double(t.norm_series[s]);
    for (const auto& [coord, series] : t.sampled_coords) {
      out += ',';
      out += format_double(series[s]);
    }
    out += '\n';
  }
  return out;
}

std::string cobweb_csv(const std::vector<onedim::CobwebSegment>& segments) {
  std::string out = "w_from,w_to,segment_kind\n";
  for (const auto& s : segments) {
    out += format_double(s.w_from) + ',' + format_double(s.w_to) + ',' + onedim::to_string(s.kind) +
           '\n';
  }
  return out;
}

std::string spectrum_csv(const std::vector<SpectralPeak>& spectrum) {
  std::string out = "frequency,power\n";
  for (const auto& p : spectrum) out += format_double(p.frequency) + ',' + format_double(p.power) + '\n';
  return out;
}

}  // namespace lrcycle
