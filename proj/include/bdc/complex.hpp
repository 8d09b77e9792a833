#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace bdc {

using Vertex = std::int32_t;

/// An oriented simplex. Vertices are kept strictly ascending; the orientation
/// is the one induced by that order.
class Simplex {
 public:
  Simplex() = default;
  Simplex(std::initializer_list<Vertex> vertices);
  explicit Simplex(std::vector<Vertex> vertices);

  int dimension() const { return static_cast<int>(vertices_.size()) - 1; }
  std::span<const Vertex> vertices() const { return vertices_; }
  Vertex operator[](std::size_t i) const { return vertices_[i]; }
  std::size_t size() const { return vertices_.size(); }

  /// Face obtained by dropping the i-th vertex. Its incidence sign is (-1)^i.
  Simplex facet(std::size_t i) const;

  friend bool operator==(const Simplex&, const Simplex&) = default;
  friend auto operator<=>(const Simplex& a, const Simplex& b) {
    return a.vertices_ <=> b.vertices_;
  }

 private:
  std::vector<Vertex> vertices_;
};

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept;
};

/// A face-closed complex with a monotone real filtration. Simplices are stored
/// in the filtration order (value, dimension, lexicographic vertices), so each
/// closed sublevel set is a prefix of the storage, and so is each dimension's
/// sub-list.
class FilteredComplex {
 public:
  FilteredComplex() = default;

  /// Validates face closure and monotonicity, then sorts. Throws InputError.
  static FilteredComplex from_simplices(std::vector<std::pair<Simplex, double>> simplices);

  std::size_t size() const { return simplices_.size(); }
  std::size_t vertex_count() const { return count_of_dimension(0); }
  int max_dimension() const { return static_cast<int>(by_dim_.size()) - 1; }

  const Simplex& simplex(std::size_t i) const { return simplices_[i]; }
  double value(std::size_t i) const { return values_[i]; }
  int dimension(std::size_t i) const { return simplices_[i].dimension(); }
  std::span<const double> values() const { return values_; }

  /// Global indices of the k-simplices in filtration order.
  std::span<const std::size_t> of_dimension(int k) const;
  std::size_t count_of_dimension(int k) const { return of_dimension(k).size(); }
  /// Position of simplex i among the simplices of its dimension.
  std::size_t position_in_dimension(std::size_t i) const { return position_in_dim_[i]; }
  /// Global indices of the facets of simplex i, facet j dropping vertex j.
  std::span<const std::size_t> facets(std::size_t i) const { return facets_[i]; }

  std::optional<std::size_t> index_of(const Simplex& s) const;
  double value_of(const Simplex& s) const;  // throws InputError if absent

 private:
  std::vector<Simplex> simplices_;
  std::vector<double> values_;
  std::vector<std::vector<std::size_t>> by_dim_;
  std::vector<std::size_t> position_in_dim_;
  std::vector<std::vector<std::size_t>> facets_;
  std::unordered_map<Simplex, std::size_t, SimplexHash> index_;
};

/// Closed sublevel set {sigma : f(sigma) <= t}. Holds a non-owning pointer to
/// its complex, which must outlive it.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(const FilteredComplex& parent, double threshold);

  const FilteredComplex& parent() const { return *parent_; }
  double threshold() const { return threshold_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Number of k-simplices present (prefix length of the parent's k-list).
  std::size_t count(int k) const;
  bool contains(std::size_t global_index) const { return global_index < size_; }
  bool contains(const Simplex& s) const;
  /// Global index of the i-th k-simplex of the snapshot.
  std::size_t global_index(int k, std::size_t i) const { return parent_->of_dimension(k)[i]; }

  bool is_subcomplex_of(const Snapshot& other) const;

 private:
  const FilteredComplex* parent_ = nullptr;
  double threshold_ = 0.0;
  std::size_t size_ = 0;
  std::vector<std::size_t> counts_;
};

Snapshot snapshot(const FilteredComplex& fc, double t);

// ---------------------------------------------------------------------------
// Builders

struct Euclidean {};
struct L1 {};
/// l1 distance with coordinates grouped into consecutive blocks of
/// `block_size`, block b scaled by weights[b].
struct WeightedL1 {
  Eigen::VectorXd weights;
  Eigen::Index block_size = 1;
};
using Metric = std::variant<Euclidean, L1, WeightedL1>;

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, const Metric& metric);

/// Vietoris-Rips filtration on a point cloud (one point per row).
FilteredComplex build_vr(const Eigen::MatrixXd& points, const Metric& metric, int max_dim,
                         double max_radius);

/// Vietoris-Rips filtration from a symmetric distance matrix.
FilteredComplex build_vr_from_distances(const Eigen::MatrixXd& distances, int max_dim,
                                        double max_radius);

/// Lower-star filtration: f(sigma) = max vertex value.
FilteredComplex build_lower_star(const std::vector<Simplex>& complex,
                                 const std::unordered_map<Vertex, double>& vertex_values);
FilteredComplex build_lower_star(const std::vector<Simplex>& complex,
                                 std::span<const double> vertex_values);

/// Row-major grid triangulation, every cell split along its down-right
/// diagonal (top-left to bottom-right).
std::vector<Simplex> triangulate_grid(int rows, int cols);

// ---------------------------------------------------------------------------
// Cochain algebra

/// Sparse coboundary delta^k of a snapshot, rows indexed by its (k+1)-simplices
/// and columns by its k-simplices (both in filtration order). For k < 0 the
/// result is the n_0 x 0 map out of the zero space.
Eigen::SparseMatrix<double> coboundary(const Snapshot& s, int k);

}  // namespace bdc
