#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace privstate {

/// One tensor factor: a label ("A", "B'", ...) and its local dimension.
struct SystemFactor {
  std::string label;
  int dim = 0;
};

/// Ordered list of labelled tensor factors. Factor order is significant:
/// it fixes the Kronecker ordering of every operator carrying the layout,
/// so partial transposes and partial traces are unambiguous.
class SystemLayout {
 public:
  SystemLayout() = default;

  explicit SystemLayout(std::vector<SystemFactor> factors)
      : factors_(std::move(factors)) {
    for (const auto& f : factors_) {
      if (f.dim < 1) throw std::invalid_argument("SystemLayout: dim < 1 for factor '" + f.label + "'");
      if (f.label.empty()) throw std::invalid_argument("SystemLayout: empty factor label");
    }
    for (std::size_t i = 0; i < factors_.size(); ++i)
      for (std::size_t j = i + 1; j < factors_.size(); ++j)
        if (factors_[i].label == factors_[j].label)
          throw std::invalid_argument("SystemLayout: duplicate label '" + factors_[i].label + "'");
  }

  static SystemLayout single(std::string label, int dim) {
    return SystemLayout({{std::move(label), dim}});
  }

  int factor_count() const { return static_cast<int>(factors_.size()); }
  const SystemFactor& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  const std::vector<SystemFactor>& factors() const { return factors_; }

  long total_dim() const {
    long n = 1;
    for (const auto& f : factors_) n *= f.dim;
    return n;
  }

  bool has(const std::string& label) const { return index_of(label) >= 0; }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].label == label) return static_cast<int>(i);
    return -1;
  }

  /// Factor positions for a set of labels; throws on unknown labels.
  std::vector<int> indices_of(const std::vector<std::string>& labels) const {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
      int i = index_of(l);
      if (i < 0) throw std::invalid_argument("SystemLayout: unknown label '" + l + "'");
      out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Concatenation, used by tensor products. Never reorders.
  SystemLayout concat(const SystemLayout& other) const {
    std::vector<SystemFactor> f = factors_;
    f.insert(f.end(), other.factors_.begin(), other.factors_.end());
    return SystemLayout(std::move(f));
  }

  SystemLayout keep(const std::vector<int>& positions) const {
    std::vector<SystemFactor> f;
    for (int p : positions) f.push_back(factor(p));
    // a scalar result keeps a trivial one-dimensional factor
    if (f.empty()) f.push_back({"1", 1});
    return SystemLayout(std::move(f));
  }

  SystemLayout drop(const std::vector<int>& positions) const {
    std::vector<int> kept;
    for (int i = 0; i < factor_count(); ++i)
      if (std::find(positions.begin(), positions.end(), i) == positions.end()) kept.push_back(i);
    return keep(kept);
  }

  /// Row-major multi-index decomposition of a flat index.
  void decompose(long index, std::span<int> digits) const {
    for (int i = factor_count() - 1; i >= 0; --i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(index % factors_[static_cast<std::size_t>(i)].dim);
      index /= factors_[static_cast<std::size_t>(i)].dim;
    }
  }

  long compose(std::span<const int> digits) const {
    long index = 0;
    for (int i = 0; i < factor_count(); ++i)
      index = index * factors_[static_cast<std::size_t>(i)].dim + digits[static_cast<std::size_t>(i)];
    return index;
  }

  bool operator==(const SystemLayout& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].label != other.factors_[i].label || factors_[i].dim != other.factors_[i].dim)
        return false;
    return true;
  }
  bool operator!=(const SystemLayout& other) const { return !(*this == other); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (i) s += ":";
      s += factors_[i].label + "(" + std::to_string(factors_[i].dim) + ")";
    }
    return s;
  }

 private:
  std::vector<SystemFactor> factors_;
};

}  // namespace privstate
