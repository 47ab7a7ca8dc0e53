#ifndef LRCYCLE_ACCEPTANCE_H_
#define LRCYCLE_ACCEPTANCE_H_

#include <filesystem>
#include <string>
#include <vector>

namespace lrcycle::acceptance {

struct Outcome {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// "1" .. "8" plus "6b" (the d = 5000 structured run).
std::vector<std::string> criterion_ids();

// Criteria selected by a suite name: onedim, scaling, lift, cycle, large,
// oracles, classical, all, or a single criterion id.
std::vector<std::string> suite_criteria(const std::string& suite);

// Fixture used by the cycle criteria: a hunt JSONL line with a stable cycle.
// Defaults to data/base_cycle.jsonl in the source tree.
void set_cycle_fixture(const std::filesystem::path& path);
std::filesystem::path cycle_fixture();

// Exceptions inside a criterion count as a failure with the message as detail.
Outcome run(const std::string& id);

std::string format_line(const Outcome& o);

}  // namespace lrcycle::acceptance

#endif  // LRCYCLE_ACCEPTANCE_H_
