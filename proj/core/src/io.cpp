#include "chainkb/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

namespace chainkb {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::vector<std::array<std::string, 3>> read_triple_rows(std::istream& in) {
  std::vector<std::array<std::string, 3>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected source<TAB>relation<TAB>target");
    }
    rows.push_back({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  return rows;
}

std::vector<LabeledPair> read_labeled_pairs(std::istream& in) {
  std::vector<LabeledPair> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    auto fields = split(line, '\t');
    if (fields.size() != 4 || (fields[3] != "0" && fields[3] != "1")) {
      throw std::runtime_error(
          "line " + std::to_string(line_no) +
          ": expected source<TAB>relation<TAB>target<TAB>{0|1}");
    }
    rows.push_back(LabeledPair{std::move(fields[0]), std::move(fields[1]),
                               std::move(fields[2]), fields[3] == "1"});
  }
  return rows;
}

std::vector<std::pair<std::string, std::string>> read_entity_pairs(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    auto fields = split(line, '\t');
    std::pair<std::string, std::string> pair;
    if (fields.size() == 2) {
      pair = {fields[0], fields[1]};
    } else if (fields.size() == 3 || fields.size() == 4) {
      pair = {fields[0], fields[2]};
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected a 2-column pair (or triple) file");
    }
    if (pair.first.empty() || pair.second.empty()) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": empty entity name");
    }
    if (seen.insert(pair).second) pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_loss_trace_csv(std::ostream& out, std::span<const double> trace) {
  out << "step,mean_loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i + 1) << ',' << format_double(trace[i]) << '\n';
  }
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace chainkb
