#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace chainkb {

// Strict 3-column `source<TAB>relation<TAB>target` rows.
std::vector<std::array<std::string, 3>> read_triple_rows(std::istream& in);

struct LabeledPair {
  std::string source;
  std::string relation;
  std::string target;
  bool relevant = false;
};

// 4-column `source<TAB>relation<TAB>target<TAB>label` rows, label 1 or 0.
std::vector<LabeledPair> read_labeled_pairs(std::istream& in);

// Entity pairs for path extraction. Two columns are (source, target);
// 3- and 4-column triple/candidate files are accepted too, taking columns
// 1 and 3. Duplicate pairs collapse to their first occurrence.
std::vector<std::pair<std::string, std::string>> read_entity_pairs(std::istream& in);

// `step,mean_loss` CSV with full round-trip precision.
void write_loss_trace_csv(std::ostream& out, std::span<const double> trace);

std::string format_double(double value);

}  // namespace chainkb
