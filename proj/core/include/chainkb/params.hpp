#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chainkb/numeric.hpp"

namespace chainkb {

// An ordered collection of named dense arrays. Model parameters, their
// gradients, and the optimizer moments all share this layout, so shapes can
// be checked once and coordinates addressed uniformly (the gradient checker
// walks the flat index space).
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Matrix value;
  };

  Matrix& add(std::string name, std::size_t rows, std::size_t cols);
  Matrix& add(std::string name, Matrix value);

  bool has(std::string_view name) const;
  Matrix& at(std::string_view name);
  const Matrix& at(std::string_view name) const;

  std::size_t entry_count() const { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  Entry& entry(std::size_t i) { return entries_[i]; }

  // Total number of scalar coordinates across all entries.
  std::size_t coord_count() const { return total_; }

  // Flat coordinate access, in entry order, row-major within an entry.
  double coord(std::size_t flat) const;
  double& coord(std::size_t flat);
  // Maps a flat index back to (entry name, row, col) for error reports.
  struct CoordRef {
    std::string_view name;
    std::size_t row;
    std::size_t col;
  };
  CoordRef locate(std::size_t flat) const;

  ParamSet zeros_like() const;
  void set_zero();
  bool same_layout(const ParamSet& other) const;
  bool all_finite() const;

  // this += alpha * other; layouts must match.
  void add_scaled(double alpha, const ParamSet& other);
  void scale(double alpha);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> offsets_;  // flat offset of each entry
  std::size_t total_ = 0;
};

}  // namespace chainkb
