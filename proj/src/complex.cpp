#include "bdc/complex.hpp"

#include "bdc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bdc {

namespace {

void check_vertices(const std::vector<Vertex>& v) {
  if (v.empty()) throw InputError("simplex with no vertices");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] == v[i]) throw InputError("simplex with a repeated vertex");
}

}  // namespace

Simplex::Simplex(std::initializer_list<Vertex> vertices) : Simplex(std::vector<Vertex>(vertices)) {}

Simplex::Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  check_vertices(vertices_);
}

Simplex Simplex::facet(std::size_t i) const {
  Simplex face;
  face.vertices_.reserve(vertices_.size() - 1);
  for (std::size_t j = 0; j < vertices_.size(); ++j)
    if (j != i) face.vertices_.push_back(vertices_[j]);
  return face;
}

std::size_t SimplexHash::operator()(const Simplex& s) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (Vertex v : s.vertices()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// ---------------------------------------------------------------------------

FilteredComplex FilteredComplex::from_simplices(std::vector<std::pair<Simplex, double>> simplices) {
  for (const auto& [s, f] : simplices) {
    if (s.size() == 0) throw InputError("empty simplex in complex");
    if (!std::isfinite(f)) throw InputError("non-finite filtration value");
  }
  std::stable_sort(simplices.begin(), simplices.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    if (a.first.dimension() != b.first.dimension()) return a.first.dimension() < b.first.dimension();
    return a.first < b.first;
  });

  FilteredComplex fc;
  const std::size_t n = simplices.size();
  fc.simplices_.reserve(n);
  fc.values_.reserve(n);
  fc.index_.reserve(n);
  for (auto& [s, f] : simplices) {
    if (!fc.index_.emplace(s, fc.simplices_.size()).second)
      throw InputError("duplicate simplex in complex");
    fc.simplices_.push_back(std::move(s));
    fc.values_.push_back(f);
  }

  fc.position_in_dim_.resize(n);
  fc.facets_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Simplex& s = fc.simplices_[i];
    const auto k = static_cast<std::size_t>(s.dimension());
    if (fc.by_dim_.size() <= k) fc.by_dim_.resize(k + 1);
    fc.position_in_dim_[i] = fc.by_dim_[k].size();
    fc.by_dim_[k].push_back(i);
    if (k == 0) continue;
    auto& facets = fc.facets_[i];
    facets.reserve(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
      auto it = fc.index_.find(s.facet(j));
      if (it == fc.index_.end()) throw InputError("complex is not closed under faces");
      // Sorted order puts faces first whenever f(face) <= f(s).
      if (it->second > i) throw InputError("filtration is not monotone on faces");
      facets.push_back(it->second);
    }
  }
  return fc;
}

std::span<const std::size_t> FilteredComplex::of_dimension(int k) const {
  if (k < 0 || k >= static_cast<int>(by_dim_.size())) return {};
  return by_dim_[static_cast<std::size_t>(k)];
}

std::optional<std::size_t> FilteredComplex::index_of(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double FilteredComplex::value_of(const Simplex& s) const {
  auto i = index_of(s);
  if (!i) throw InputError("simplex not in complex");
  return values_[*i];
}

// ---------------------------------------------------------------------------

Snapshot::Snapshot(const FilteredComplex& parent, double threshold)
    : parent_(&parent), threshold_(threshold) {
  auto vals = parent.values();
  size_ = static_cast<std::size_t>(std::upper_bound(vals.begin(), vals.end(), threshold) - vals.begin());
  counts_.resize(static_cast<std::size_t>(parent.max_dimension() + 1));
  for (int k = 0; k <= parent.max_dimension(); ++k) {
    auto idx = parent.of_dimension(k);
    counts_[static_cast<std::size_t>(k)] = static_cast<std::size_t>(
        std::partition_point(idx.begin(), idx.end(),
                             [&](std::size_t g) { return g < size_; }) -
        idx.begin());
  }
}

std::size_t Snapshot::count(int k) const {
  if (k < 0 || k >= static_cast<int>(counts_.size())) return 0;
  return counts_[static_cast<std::size_t>(k)];
}

bool Snapshot::contains(const Simplex& s) const {
  auto i = parent_->index_of(s);
  return i && *i < size_;
}

bool Snapshot::is_subcomplex_of(const Snapshot& other) const {
  return parent_ == other.parent_ && size_ <= other.size_;
}

Snapshot snapshot(const FilteredComplex& fc, double t) { return Snapshot(fc, t); }

// ---------------------------------------------------------------------------

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points, const Metric& metric) {
  if (!points.allFinite()) throw InputError("non-finite point coordinates");
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, WeightedL1>) {
          if (m.weights.size() * m.block_size != points.cols())
            throw InputError(fmt::format("weighted l1: {} weights x block {} != {} coordinates",
                                         m.weights.size(), m.block_size, points.cols()));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = 0.0;
            if constexpr (std::is_same_v<M, Euclidean>) {
              d = (points.row(i) - points.row(j)).norm();
            } else if constexpr (std::is_same_v<M, L1>) {
              d = (points.row(i) - points.row(j)).lpNorm<1>();
            } else {
              for (Eigen::Index b = 0; b < m.weights.size(); ++b) {
                d += m.weights[b] * (points.row(i).segment(b * m.block_size, m.block_size) -
                                     points.row(j).segment(b * m.block_size, m.block_size))
                                        .template lpNorm<1>();
              }
            }
            dist(i, j) = dist(j, i) = d;
          }
        }
      },
      metric);
  return dist;
}

FilteredComplex build_vr_from_distances(const Eigen::MatrixXd& distances, int max_dim,
                                        double max_radius) {
  const Eigen::Index n = distances.rows();
  if (n < 1 || distances.cols() != n) throw PreconditionError("distance matrix must be square, n >= 1");
  if (max_dim < 0) throw PreconditionError("max_dim must be >= 0");
  if (!(max_radius > 0)) throw PreconditionError("max_radius must be > 0");
  if (!distances.allFinite()) throw InputError("non-finite distances");

  std::vector<std::vector<Vertex>> neighbors(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (distances(i, j) <= max_radius) neighbors[static_cast<std::size_t>(i)].push_back(static_cast<Vertex>(j));

  std::vector<std::pair<Simplex, double>> out;
  std::vector<Vertex> clique;
  // Extend `clique` by higher-numbered common neighbours.
  std::function<void(const std::vector<Vertex>&, double)> grow = [&](const std::vector<Vertex>& candidates,
                                                                     double diameter) {
    out.emplace_back(Simplex(clique), diameter);
    if (static_cast<int>(clique.size()) > max_dim) return;
    for (Vertex v : candidates) {
      double d = diameter;
      for (Vertex u : clique) d = std::max(d, distances(u, v));
      std::vector<Vertex> next;
      const auto& nv = neighbors[static_cast<std::size_t>(v)];
      std::set_intersection(candidates.begin(), candidates.end(), nv.begin(), nv.end(),
                            std::back_inserter(next));
      clique.push_back(v);
      grow(next, d);
      clique.pop_back();
    }
  };
  for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) {
    clique.assign(1, v);
    grow(neighbors[static_cast<std::size_t>(v)], 0.0);
  }
  return FilteredComplex::from_simplices(std::move(out));
}

FilteredComplex build_vr(const Eigen::MatrixXd& points, const Metric& metric, int max_dim,
                         double max_radius) {
  if (points.rows() < 1) throw PreconditionError("point cloud must contain at least one point");
  return build_vr_from_distances(pairwise_distances(points, metric), max_dim, max_radius);
}

FilteredComplex build_lower_star(const std::vector<Simplex>& complex,
                                 const std::unordered_map<Vertex, double>& vertex_values) {
  std::vector<std::pair<Simplex, double>> out;
  out.reserve(complex.size());
  for (const Simplex& s : complex) {
    double f = -std::numeric_limits<double>::infinity();
    for (Vertex v : s.vertices()) {
      auto it = vertex_values.find(v);
      if (it == vertex_values.end()) throw InputError(fmt::format("vertex {} has no value", v));
      f = std::max(f, it->second);
    }
    out.emplace_back(s, f);
  }
  return FilteredComplex::from_simplices(std::move(out));
}

FilteredComplex build_lower_star(const std::vector<Simplex>& complex,
                                 std::span<const double> vertex_values) {
  std::vector<std::pair<Simplex, double>> out;
  out.reserve(complex.size());
  for (const Simplex& s : complex) {
    double f = -std::numeric_limits<double>::infinity();
    for (Vertex v : s.vertices()) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertex_values.size())
        throw InputError(fmt::format("vertex {} has no value", v));
      f = std::max(f, vertex_values[static_cast<std::size_t>(v)]);
    }
    out.emplace_back(s, f);
  }
  return FilteredComplex::from_simplices(std::move(out));
}

std::vector<Simplex> triangulate_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) throw PreconditionError("grid must have rows, cols >= 1");
  auto id = [cols](int r, int c) { return static_cast<Vertex>(r * cols + c); };
  std::vector<Simplex> out;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.push_back(Simplex{id(r, c)});
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) out.push_back(Simplex{id(r, c), id(r, c + 1)});
      if (r + 1 < rows) out.push_back(Simplex{id(r, c), id(r + 1, c)});
      if (r + 1 < rows && c + 1 < cols) {
        out.push_back(Simplex{id(r, c), id(r + 1, c + 1)});
        out.push_back(Simplex{id(r, c), id(r, c + 1), id(r + 1, c + 1)});
        out.push_back(Simplex{id(r, c), id(r + 1, c), id(r + 1, c + 1)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Eigen::SparseMatrix<double> coboundary(const Snapshot& s, int k) {
  if (k < 0) return Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(s.count(0)), 0);
  const FilteredComplex& fc = s.parent();
  const auto rows = static_cast<Eigen::Index>(s.count(k + 1));
  const auto cols = static_cast<Eigen::Index>(s.count(k));
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(k + 2));
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t g = s.global_index(k + 1, static_cast<std::size_t>(r));
    auto facets = fc.facets(g);
    for (std::size_t j = 0; j < facets.size(); ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      trips.emplace_back(r, static_cast<Eigen::Index>(fc.position_in_dimension(facets[j])), sign);
    }
  }
  Eigen::SparseMatrix<double> m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace bdc
