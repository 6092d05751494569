#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opbench/scalar.hpp"

namespace opbench {

/// Coordinate index; coordinates are numbered from 1.
using Index = std::uint32_t;
using IndexSet = std::set<Index>;

/// Finite-support coordinate family. Zero entries are never stored, so two
/// families are equal exactly when their stored entries are.
template <class Tag>
class CoordFamily {
 public:
  using Entries = std::map<Index, Scalar>;

  CoordFamily() = default;
  CoordFamily(std::initializer_list<std::pair<const Index, Scalar>> init) {
    for (const auto& [i, v] : init) set(i, v);
  }

  /// Dense constructor: values[k] becomes coordinate k + 1.
  static CoordFamily dense(const std::vector<Scalar>& values) {
    CoordFamily out;
    for (std::size_t k = 0; k < values.size(); ++k) out.set(static_cast<Index>(k + 1), values[k]);
    return out;
  }

  /// The unit family at coordinate i (e_i or delta_i).
  static CoordFamily unit(Index i, ScalarKind kind = ScalarKind::Rational) {
    CoordFamily out;
    out.set(i, Scalar::one(kind));
    return out;
  }

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t nnz() const { return entries_.size(); }

  Scalar get(Index i, ScalarKind kind = ScalarKind::Rational) const {
    auto it = entries_.find(i);
    return it == entries_.end() ? Scalar::zero(kind_or(kind)) : it->second;
  }

  void set(Index i, const Scalar& v) {
    if (i == 0) throw std::invalid_argument("coordinate indices start at 1");
    if (v.is_zero()) {
      entries_.erase(i);
    } else {
      entries_.insert_or_assign(i, v);
    }
  }

  IndexSet support() const {
    IndexSet s;
    for (const auto& kv : entries_) s.insert(kv.first);
    return s;
  }

  Index max_index() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }

  /// Scalar mode of the stored entries; `fallback` for the zero family.
  ScalarKind kind_or(ScalarKind fallback) const {
    return entries_.empty() ? fallback : entries_.begin()->second.kind();
  }

  /// Keeps only the coordinates in `keep`.
  CoordFamily restricted(const IndexSet& keep) const {
    CoordFamily out;
    for (const auto& [i, v] : entries_) {
      if (keep.count(i)) out.entries_.emplace(i, v);
    }
    return out;
  }

  CoordFamily& operator+=(const CoordFamily& o) { return axpy(Scalar::one(o.kind_or(kind_or(ScalarKind::Rational))), o); }
  CoordFamily& operator-=(const CoordFamily& o) { return axpy(-Scalar::one(o.kind_or(kind_or(ScalarKind::Rational))), o); }

  /// this += a * o
  CoordFamily& axpy(const Scalar& a, const CoordFamily& o) {
    if (a.is_zero()) return *this;
    for (const auto& [i, v] : o.entries_) {
      auto it = entries_.find(i);
      if (it == entries_.end()) {
        Scalar p = a * v;
        if (!p.is_zero()) entries_.emplace(i, std::move(p));
      } else {
        it->second += a * v;
        if (it->second.is_zero()) entries_.erase(it);
      }
    }
    return *this;
  }

  CoordFamily& operator*=(const Scalar& a) {
    if (a.is_zero()) {
      entries_.clear();
      return *this;
    }
    for (auto it = entries_.begin(); it != entries_.end();) {
      it->second *= a;
      it = it->second.is_zero() ? entries_.erase(it) : std::next(it);
    }
    return *this;
  }

  CoordFamily& operator/=(const Scalar& a) {
    for (auto& kv : entries_) kv.second /= a;
    return *this;
  }

  friend CoordFamily operator+(CoordFamily a, const CoordFamily& b) { return a += b; }
  friend CoordFamily operator-(CoordFamily a, const CoordFamily& b) { return a -= b; }
  friend CoordFamily operator-(CoordFamily a) { return a *= -Scalar::one(a.kind_or(ScalarKind::Rational)); }
  friend CoordFamily operator*(const Scalar& s, CoordFamily a) { return a *= s; }
  friend CoordFamily operator*(CoordFamily a, const Scalar& s) { return a *= s; }
  friend CoordFamily operator/(CoordFamily a, const Scalar& s) { return a /= s; }

  friend bool operator==(const CoordFamily& a, const CoordFamily& b) { return a.entries_ == b.entries_; }

  /// "i:v,i:v" in increasing index order.
  std::string str() const {
    std::string out = "[";
    bool first = true;
    for (const auto& [i, v] : entries_) {
      if (!first) out += ", ";
      out += std::to_string(i) + ":" + v.str();
      first = false;
    }
    return out + "]";
  }

 private:
  Entries entries_;
};

struct VectorTag {};
struct FunctionalTag {};

/// Element of phi: a finitely supported sequence.
using SparseVector = CoordFamily<VectorTag>;
/// Continuous functional acting through the coordinate pairing.
using CoordFunctional = CoordFamily<FunctionalTag>;

/// f(x) = sum_i f_i x_i over the common support.
Scalar pair(const CoordFunctional& f, const SparseVector& x, ScalarKind kind = ScalarKind::Rational);

/// The same coordinates read as a functional (and back).
CoordFunctional as_functional(const SparseVector& x);
SparseVector as_vector(const CoordFunctional& f);

IndexSet window(Index n);

/// Scalar mode of a list of families (first non-empty one decides).
template <class Tag>
ScalarKind kind_of(const std::vector<CoordFamily<Tag>>& xs, ScalarKind fallback = ScalarKind::Rational) {
  for (const auto& x : xs) {
    if (!x.empty()) return x.kind_or(fallback);
  }
  return fallback;
}

}  // namespace opbench
