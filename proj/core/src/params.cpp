#include "chainkb/params.hpp"

#include <stdexcept>

namespace chainkb {

Matrix& ParamSet::add(std::string name, std::size_t rows, std::size_t cols) {
  return add(std::move(name), Matrix(rows, cols));
}

Matrix& ParamSet::add(std::string name, Matrix value) {
  if (index_.contains(name)) {
    throw std::invalid_argument("ParamSet: duplicate entry '" + name + "'");
  }
  index_.emplace(name, entries_.size());
  offsets_.push_back(total_);
  total_ += value.size();
  entries_.push_back(Entry{std::move(name), std::move(value)});
  return entries_.back().value;
}

bool ParamSet::has(std::string_view name) const {
  return index_.contains(std::string(name));
}

Matrix& ParamSet::at(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw std::invalid_argument("ParamSet: no entry named '" + std::string(name) + "'");
  }
  return entries_[it->second].value;
}

const Matrix& ParamSet::at(std::string_view name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

double ParamSet::coord(std::size_t flat) const {
  return const_cast<ParamSet*>(this)->coord(flat);
}

double& ParamSet::coord(std::size_t flat) {
  for (std::size_t e = entries_.size(); e-- > 0;) {
    if (flat >= offsets_[e] && flat - offsets_[e] < entries_[e].value.size()) {
      return entries_[e].value.data()[flat - offsets_[e]];
    }
  }
  throw std::out_of_range("ParamSet: coordinate out of range");
}

ParamSet::CoordRef ParamSet::locate(std::size_t flat) const {
  for (std::size_t e = entries_.size(); e-- > 0;) {
    if (flat >= offsets_[e] && flat - offsets_[e] < entries_[e].value.size()) {
      const std::size_t local = flat - offsets_[e];
      const std::size_t cols = entries_[e].value.cols();
      return CoordRef{entries_[e].name, local / cols, local % cols};
    }
  }
  throw std::out_of_range("ParamSet: coordinate out of range");
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const Entry& e : entries_) {
    out.add(e.name, e.value.rows(), e.value.cols());
  }
  return out;
}

void ParamSet::set_zero() {
  for (Entry& e : entries_) e.value.set_zero();
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name != other.entries_[i].name) return false;
    if (!entries_[i].value.same_shape(other.entries_[i].value)) return false;
  }
  return true;
}

bool ParamSet::all_finite() const {
  for (const Entry& e : entries_) {
    if (!e.value.all_finite()) return false;
  }
  return true;
}

void ParamSet::add_scaled(double alpha, const ParamSet& other) {
  if (!same_layout(other)) {
    throw std::invalid_argument("ParamSet::add_scaled: layout mismatch");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& dst = entries_[i].value.data();
    const auto& src = other.entries_[i].value.data();
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += alpha * src[j];
  }
}

void ParamSet::scale(double alpha) {
  for (Entry& e : entries_) {
    for (double& x : e.value.data()) x *= alpha;
  }
}

}  // namespace chainkb
