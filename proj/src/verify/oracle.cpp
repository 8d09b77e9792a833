#include "bdc/verify.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <map>
#include <random>

namespace bdc::verify {

Eigen::MatrixXd dense_coboundary(const Snapshot& s, int k) {
  const FilteredComplex& fc = s.parent();
  if (k < 0) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.count(0)), 0);
  std::map<Simplex, Eigen::Index> column;
  for (std::size_t i = 0; i < s.count(k); ++i)
    column.emplace(fc.simplex(s.global_index(k, i)), static_cast<Eigen::Index>(i));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.count(k + 1)),
                                            static_cast<Eigen::Index>(s.count(k)));
  for (std::size_t r = 0; r < s.count(k + 1); ++r) {
    const auto v = fc.simplex(s.global_index(k + 1, r)).vertices();
    for (std::size_t j = 0; j < v.size(); ++j) {
      std::vector<Vertex> face;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (i != j) face.push_back(v[i]);
      D(static_cast<Eigen::Index>(r), column.at(Simplex(face))) = j % 2 == 0 ? 1.0 : -1.0;
    }
  }
  return D;
}

namespace {

Eigen::Index rank_of(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-9);
  return lu.rank();
}

// Basis of the k-cycles of s, in s's k-simplex coordinates.
Eigen::MatrixXd cycles(const Snapshot& s, int k) {
  const auto n = static_cast<Eigen::Index>(s.count(k));
  if (k == 0) return Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd boundary = dense_coboundary(s, k - 1).transpose();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(boundary);
  lu.setThreshold(1e-9);
  if (lu.rank() == n) return Eigen::MatrixXd(n, 0);
  return lu.kernel();
}

}  // namespace

std::vector<Interval> brute_force_barcode(const FilteredComplex& fc, int max_degree) {
  std::vector<double> values(fc.values().begin(), fc.values().end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const int m = static_cast<int>(values.size());
  std::vector<Snapshot> snaps;
  for (double v : values) snaps.emplace_back(fc, v);

  std::vector<Interval> out;
  for (int k = 0; k <= max_degree; ++k) {
    // r[i][j], 1 <= i <= j <= m: rank of H_k(X_i) -> H_k(X_j); zero outside.
    std::vector<std::vector<Eigen::Index>> r(m + 2, std::vector<Eigen::Index>(m + 2, 0));
    for (int i = 1; i <= m; ++i) {
      const Eigen::MatrixXd Z = cycles(snaps[i - 1], k);
      for (int j = i; j <= m; ++j) {
        const Snapshot& sj = snaps[j - 1];
        const auto nk = static_cast<Eigen::Index>(sj.count(k));
        const Eigen::MatrixXd B = dense_coboundary(sj, k).transpose();  // n_k x n_{k+1}
        Eigen::MatrixXd both = Eigen::MatrixXd::Zero(nk, B.cols() + Z.cols());
        both.leftCols(B.cols()) = B;
        both.block(0, B.cols(), Z.rows(), Z.cols()) = Z;
        r[i][j] = rank_of(both) - rank_of(B);
      }
    }
    for (int i = 1; i <= m; ++i) {
      for (int j = i + 1; j <= m + 1; ++j) {
        const Eigen::Index mult = r[i][j - 1] - r[i - 1][j - 1] - r[i][j] + r[i - 1][j];
        for (Eigen::Index c = 0; c < mult; ++c)
          out.push_back({k, values[static_cast<std::size_t>(i - 1)],
                         j <= m ? values[static_cast<std::size_t>(j - 1)] : kInfinity});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Interval> intervals_of(const Barcode& bc) {
  std::vector<Interval> out;
  for (int k = 0; k <= bc.max_degree(); ++k)
    for (const Bar& b : bc.degree(k)) out.push_back({k, b.birth, b.death});
  std::sort(out.begin(), out.end());
  return out;
}

FilteredComplex random_filtration(Rng& rng, int max_vertices, int max_dim) {
  std::uniform_int_distribution<int> nv(1, max_vertices);
  std::uniform_int_distribution<int> grid(0, 10);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n = nv(rng);
  std::map<Simplex, double> f;
  for (Vertex v = 0; v < n; ++v) f[Simplex{v}] = grid(rng) / 10.0;
  // Grow dimension by dimension so every added simplex has all its facets.
  std::vector<std::vector<Vertex>> prev;
  for (Vertex v = 0; v < n; ++v) prev.push_back({v});
  const double keep[] = {0.0, 0.6, 0.5, 0.4};
  for (int d = 1; d <= max_dim; ++d) {
    std::vector<std::vector<Vertex>> next;
    for (const auto& s : prev) {
      for (Vertex v = s.back() + 1; v < n; ++v) {
        std::vector<Vertex> t = s;
        t.push_back(v);
        double lo = 0.0;
        bool closed = true;
        for (std::size_t j = 0; j < t.size() && closed; ++j) {
          std::vector<Vertex> face;
          for (std::size_t i = 0; i < t.size(); ++i)
            if (i != j) face.push_back(t[i]);
          auto it = f.find(Simplex(face));
          if (it == f.end()) closed = false;
          else lo = std::max(lo, it->second);
        }
        if (!closed || coin(rng) > keep[std::min(d, 3)]) continue;
        const double own = grid(rng) / 10.0;
        f[Simplex(t)] = coin(rng) < 0.3 ? lo : std::max(lo, own);
        next.push_back(std::move(t));
      }
    }
    prev = std::move(next);
  }
  std::vector<std::pair<Simplex, double>> list(f.begin(), f.end());
  return FilteredComplex::from_simplices(std::move(list));
}

}  // namespace bdc::verify
