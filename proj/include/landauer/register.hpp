#pragma once

#include <algorithm>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "landauer/core.hpp"

namespace landauer {

/// Ordered set of qubit labels with fixed tensor positions.
///
/// Labels are normalised to canonical (lexicographic) order at construction,
/// so any two registers over the same labels agree on tensor layout. For the
/// three-qubit experiments this puts the ancilla, reservoir and system in the
/// fixed order A, R, S. The first label owns the most significant bit of a
/// computational-basis index: |b0 b1 ... b_{n-1}> maps to sum_k b_k 2^{n-1-k}.
class QubitRegister {
 public:
  explicit QubitRegister(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("register needs at least one label");
    std::sort(labels_.begin(), labels_.end());
    if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
      throw ValidationError("register labels must be unique");
  }
  QubitRegister(std::initializer_list<std::string> labels)
      : QubitRegister(std::vector<std::string>(labels)) {}

  std::size_t size() const { return labels_.size(); }
  Eigen::Index dim() const { return Eigen::Index(1) << labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool contains(const std::string& label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label);
  }

  bool contains_all(const std::vector<std::string>& labels) const {
    return std::all_of(labels.begin(), labels.end(),
                       [&](const auto& l) { return contains(l); });
  }

  /// Position of `label` in tensor order; throws LookupError if absent.
  std::size_t position(const std::string& label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label)
      throw LookupError("unknown qubit label '" + label + "' in register " + str());
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Bit value of `label` inside basis index `idx`.
  int bit(Eigen::Index idx, std::size_t position) const {
    return static_cast<int>((idx >> (labels_.size() - 1 - position)) & 1);
  }

  /// Union register of two label-disjoint registers.
  static QubitRegister merge(const QubitRegister& a, const QubitRegister& b) {
    std::vector<std::string> all = a.labels_;
    for (const auto& l : b.labels_) {
      if (a.contains(l))
        throw ValidationError("registers overlap on label '" + l + "'");
      all.push_back(l);
    }
    return QubitRegister(std::move(all));
  }

  bool operator==(const QubitRegister& other) const { return labels_ == other.labels_; }
  bool operator!=(const QubitRegister& other) const { return !(*this == other); }

  std::string str() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < labels_.size(); ++i) os << (i ? "," : "") << labels_[i];
    os << "}";
    return os.str();
  }

 private:
  std::vector<std::string> labels_;
};

}  // namespace landauer
