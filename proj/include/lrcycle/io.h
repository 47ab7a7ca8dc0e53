#ifndef LRCYCLE_IO_H_
#define LRCYCLE_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrcycle/dynamics.h"
#include "lrcycle/lift.h"
#include "lrcycle/model.h"
#include "lrcycle/onedim.h"
#include "lrcycle/solver.h"
#include "lrcycle/transforms.h"

namespace lrcycle {

using Json = nlohmann::ordered_json;

// Thrown for unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 17 significant digits.
std::string format_double(double x);

// One example per line, comma separated. A non-numeric first row is a
// header; a header column named "label" (or, without a header, nothing) marks
// the labels, which must be -1 or +1 and are folded into the rows.
Dataset parse_dataset_csv(std::string_view text);
Dataset load_dataset_csv(const std::filesystem::path& path);
std::string examples_to_csv(const Examples& x);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

// Column of a CSV with a header row, as doubles.
std::vector<double> load_csv_column(const std::filesystem::path& path, const std::string& column);

// {base_csv, ambient_dim}; base_csv is resolved relative to the spec file.
struct LiftedSpec {
  std::filesystem::path base_csv;
  Index ambient_dim = 0;
};
LiftedSpec load_lifted_spec(const std::filesystem::path& path);
void write_lifted_spec(const std::filesystem::path& path, const LiftedSpec& spec);

Json to_json(const Vector& v);
Json to_json(const SolveReport& r);
Json to_json(const onedim::LemmaReport& r);
Json to_json(const LiftReport& r);
Json to_json(const CycleReport& r);
Json to_json(const ScalingCheck& r);
Json to_json(const HuntResult& r);
// Inverse of to_json(HuntResult); spectral peaks are not restored.
HuntResult hunt_result_from_json(const Json& j);

std::string trajectory_csv(const Trajectory& t);
std::string cobweb_csv(const std::vector<onedim::CobwebSegment>& segments);
std::string spectrum_csv(const std::vector<SpectralPeak>& spectrum);

}  // namespace lrcycle

#endif  // LRCYCLE_IO_H_
