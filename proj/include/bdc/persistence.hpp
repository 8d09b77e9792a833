#pragma once

#include "bdc/cochain.hpp"
#include "bdc/complex.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace bdc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Persistence interval [birth, death) in cohomology of a sublevel filtration.
struct Bar {
  int degree = 0;
  double birth = 0.0;
  double death = kInfinity;
  Simplex birth_simplex;
  std::optional<Simplex> death_simplex;
  /// Cocycle on the part of the filtration preceding the death simplex (the
  /// whole complex for essential bars). It vanishes before the birth simplex,
  /// and its restriction to X_t represents the bar's class for t in [b, d).
  Cochain representative;

  bool finite() const { return death_simplex.has_value(); }
  double persistence() const { return death - birth; }
};

class Barcode {
 public:
  explicit Barcode(int max_degree = 0) : bars_(static_cast<std::size_t>(max_degree + 1)) {}

  int max_degree() const { return static_cast<int>(bars_.size()) - 1; }
  std::span<const Bar> degree(int k) const;
  std::vector<Bar>& mutable_degree(int k) { return bars_.at(static_cast<std::size_t>(k)); }

 private:
  std::vector<std::vector<Bar>> bars_;
};

/// Persistent cohomology up to `max_degree`. Degree 0 is paired with a
/// union-find sweep (elder rule); higher degrees by column reduction of the
/// coboundary matrix in reverse filtration order, with clearing. Zero-length
/// intervals are dropped.
Barcode compute_persistence(const FilteredComplex& fc, int max_degree);

/// Number of compute_persistence calls made by this process (all threads).
std::uint64_t persistence_computation_count();

/// The bar's class at threshold t, as a cocycle on snapshot(fc, t).
/// Throws DomainError unless birth <= t < death.
Cochain representative_at(const Bar& bar, const FilteredComplex& fc, double t);

struct Longest {};
struct ByIndex {
  std::size_t index = 0;
};
struct AllFinite {};
/// Bar selection policy. Candidates are ordered by persistence (descending),
/// then birth (ascending), then birth simplex (lexicographic); `ByIndex`
/// indexes into that order over all bars of the degree.
using BarPolicy = std::variant<Longest, ByIndex, AllFinite>;

/// Finite bars only for Longest and AllFinite. Empty result, never throws.
std::vector<Bar> select_bar(const Barcode& barcode, int degree, const BarPolicy& policy);

}  // namespace bdc
