#include "bdc/cochain.hpp"
#include "bdc/complex.hpp"
#include "bdc/errors.hpp"
#include "bdc/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bdc;

namespace {

Eigen::MatrixXd unit_square() {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 1, 0, 1, 1, 0, 1;
  return X;
}

std::vector<double> values_of_dim(const FilteredComplex& fc, int k) {
  std::vector<double> v;
  for (std::size_t i : fc.of_dimension(k)) v.push_back(fc.value(i));
  return v;
}

}  // namespace

TEST(VietorisRips, RightTriangle) {
  Eigen::MatrixXd X(3, 2);
  X << 0, 0, 1, 0, 0, 1;
  const FilteredComplex fc = build_vr(X, Euclidean{}, 2, 2.0);
  EXPECT_EQ(values_of_dim(fc, 0), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(values_of_dim(fc, 1), (std::vector<double>{1, 1, std::sqrt(2.0)}));
  EXPECT_EQ(values_of_dim(fc, 2), (std::vector<double>{std::sqrt(2.0)}));
}

TEST(VietorisRips, SinglePoint) {
  const FilteredComplex fc = build_vr(Eigen::MatrixXd::Zero(1, 2), Euclidean{}, 2, kInfinity);
  EXPECT_EQ(fc.size(), 1u);
  EXPECT_EQ(fc.value(0), 0.0);
}

TEST(VietorisRips, UnitSquareCounts) {
  const FilteredComplex fc = build_vr(unit_square(), Euclidean{}, 2, kInfinity);
  const auto edges = values_of_dim(fc, 1);
  ASSERT_EQ(edges.size(), 6u);
  EXPECT_EQ((std::count(edges.begin(), edges.end(), 1.0)), 4);
  EXPECT_EQ((std::count(edges.begin(), edges.end(), std::sqrt(2.0))), 2);
  const auto tris = values_of_dim(fc, 2);
  ASSERT_EQ(tris.size(), 4u);
  for (double t : tris) EXPECT_EQ(t, std::sqrt(2.0));
}

TEST(VietorisRips, RadiusCutsEdges) {
  const FilteredComplex fc = build_vr(unit_square(), Euclidean{}, 2, 1.2);
  EXPECT_EQ(fc.count_of_dimension(1), 4u);
  EXPECT_EQ(fc.count_of_dimension(2), 0u);
}

TEST(VietorisRips, WeightedL1MatchesDistanceMatrix) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(6, 4);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
  WeightedL1 m{Eigen::Vector2d(0.3, 0.7), 2};
  const Eigen::MatrixXd D = pairwise_distances(X, m);
  const double d01 = 0.3 * ((X.row(0) - X.row(1)).head(2).cwiseAbs().sum()) +
                     0.7 * ((X.row(0) - X.row(1)).tail(2).cwiseAbs().sum());
  EXPECT_NEAR(D(0, 1), d01, 1e-15);
  const FilteredComplex a = build_vr(X, m, 2, kInfinity);
  const FilteredComplex b = build_vr_from_distances(D, 2, kInfinity);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.value(i), b.value(i));
}

TEST(LowerStar, EdgeTakesMax) {
  const FilteredComplex fc = build_lower_star({Simplex{0}, Simplex{1}, Simplex{0, 1}},
                                              std::unordered_map<Vertex, double>{{0, 0.2}, {1, 0.9}});
  EXPECT_EQ(fc.value_of(Simplex{0}), 0.2);
  EXPECT_EQ(fc.value_of(Simplex{1}), 0.9);
  EXPECT_EQ(fc.value_of(Simplex{0, 1}), 0.9);
}

TEST(LowerStar, Triangle) {
  std::vector<Simplex> cx{Simplex{0}, Simplex{1}, Simplex{2}, Simplex{0, 1}, Simplex{0, 2}, Simplex{1, 2},
                          Simplex{0, 1, 2}};
  const std::vector<double> vals{1, 2, 3};
  const FilteredComplex fc = build_lower_star(cx, std::span<const double>(vals));
  EXPECT_EQ(fc.value_of(Simplex{0, 1}), 2);
  EXPECT_EQ(fc.value_of(Simplex{0, 2}), 3);
  EXPECT_EQ(fc.value_of(Simplex{1, 2}), 3);
  EXPECT_EQ(fc.value_of(Simplex{0, 1, 2}), 3);
}

TEST(LowerStar, BottomRowOfTwoByTwo) {
  const std::vector<double> vals{0, 0, 1, 1};
  const FilteredComplex fc = build_lower_star(triangulate_grid(2, 2), std::span<const double>(vals));
  for (std::size_t i = 0; i < fc.size(); ++i) {
    const auto v = fc.simplex(i).vertices();
    const bool touches = std::any_of(v.begin(), v.end(), [](Vertex x) { return x >= 2; });
    EXPECT_EQ(fc.value(i), touches ? 1.0 : 0.0);
  }
}

TEST(Grid, Counts) {
  auto count = [](int r, int c, int k) {
    int n = 0;
    for (const Simplex& s : triangulate_grid(r, c)) n += s.dimension() == k;
    return n;
  };
  EXPECT_EQ(count(1, 1, 0), 1);
  EXPECT_EQ(count(1, 1, 1), 0);
  EXPECT_EQ(count(2, 2, 0), 4);
  EXPECT_EQ(count(2, 2, 1), 5);
  EXPECT_EQ(count(2, 2, 2), 2);
  EXPECT_EQ(count(3, 3, 0), 9);
  EXPECT_EQ(count(3, 3, 1), 16);
  EXPECT_EQ(count(3, 3, 2), 8);
}

TEST(Snapshot, ClosedSublevels) {
  const FilteredComplex fc = build_vr(unit_square(), Euclidean{}, 2, kInfinity);
  const Snapshot a(fc, 0.5), b(fc, 1.0), c(fc, std::sqrt(2.0));
  EXPECT_EQ(a.size(), 4u);
  EXPECT_EQ(b.size(), 8u);
  EXPECT_EQ(b.count(1), 4u);
  EXPECT_EQ(c.size(), fc.size());
  EXPECT_TRUE(a.is_subcomplex_of(c));
  EXPECT_FALSE(c.is_subcomplex_of(a));
}

TEST(FilteredComplex, RejectsMissingFacet) {
  EXPECT_THROW(FilteredComplex::from_simplices({{Simplex{0}, 0.0}, {Simplex{0, 1}, 1.0}}), InputError);
}

TEST(FilteredComplex, RejectsNonMonotone) {
  EXPECT_THROW(FilteredComplex::from_simplices({{Simplex{0}, 0.0}, {Simplex{1}, 2.0}, {Simplex{0, 1}, 1.0}}),
               InputError);
}

TEST(Coboundary, PathSignConvention) {
  const FilteredComplex fc = FilteredComplex::from_simplices(
      {{Simplex{0}, 0}, {Simplex{1}, 0}, {Simplex{2}, 0}, {Simplex{0, 1}, 1}, {Simplex{1, 2}, 1}});
  const Snapshot s(fc, 1);
  Cochain g(0);
  g.set(Simplex{0}, 1.0);
  const Cochain dg = apply_coboundary(g, s);
  EXPECT_EQ((dg[Simplex{0, 1}]), -1.0);
  EXPECT_EQ((dg[Simplex{1, 2}]), 0.0);
}

TEST(Coboundary, FilledTriangle) {
  const FilteredComplex fc = FilteredComplex::from_simplices({{Simplex{0}, 0},
                                                              {Simplex{1}, 0},
                                                              {Simplex{2}, 0},
                                                              {Simplex{0, 1}, 1},
                                                              {Simplex{0, 2}, 1},
                                                              {Simplex{1, 2}, 1},
                                                              {Simplex{0, 1, 2}, 2}});
  Cochain c(1);
  c.set(Simplex{0, 1}, 1.0);
  const Cochain dc = apply_coboundary(c, Snapshot(fc, 2));
  EXPECT_EQ(std::abs(dc[Simplex{0, 1, 2}]), 1.0);
}

TEST(Coboundary, SquaresToZero) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(6, 2);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
  const FilteredComplex fc = build_vr(X, Euclidean{}, 3, kInfinity);
  const Snapshot s(fc, kInfinity);
  const Eigen::SparseMatrix<double> d0 = coboundary(s, 0), d1 = coboundary(s, 1), d2 = coboundary(s, 2);
  EXPECT_EQ(Eigen::MatrixXd(d1 * d0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(Eigen::MatrixXd(d2 * d1).cwiseAbs().maxCoeff(), 0.0);
  // Same matrix as the independent dense builder.
  EXPECT_EQ((Eigen::MatrixXd(d1) - verify::dense_coboundary(s, 1)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cochain, RestrictAndExtend) {
  const FilteredComplex fc = build_vr(unit_square(), Euclidean{}, 2, kInfinity);
  const Snapshot K(fc, 1.0), L(fc, kInfinity);
  EXPECT_TRUE(restrict(Cochain(1), K).empty());

  Cochain a(1);
  a.set(Simplex{0, 1}, 2.5);
  a.set(Simplex{1, 2}, -1.0);
  const Cochain back = restrict(extend_by_zero(a, L), K);
  EXPECT_EQ(back.coeffs(), a.coeffs());

  Cochain outside(1);
  outside.set(Simplex{0, 2}, 1.0);
  EXPECT_THROW(extend_by_zero(outside, K), InputError);
}

TEST(Cochain, DecompositionIsOrthogonal) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const FilteredComplex fc = verify::random_filtration(rng, 7, 2);
    const Snapshot K(fc, 0.5), L(fc, kInfinity);
    for (int k = 0; k <= 1; ++k) {
      // Extensions from K and cochains on L \ K span C^k(L) with a block-diagonal Gram matrix.
      const auto nK = static_cast<Eigen::Index>(K.count(k)), nL = static_cast<Eigen::Index>(L.count(k));
      Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(nL, nL);
      for (Eigen::Index i = 0; i < nK; ++i) {
        Cochain e(k);
        e.set(fc.simplex(K.global_index(k, static_cast<std::size_t>(i))), 1.0);
        basis.col(i) = to_vector(extend_by_zero(e, L), L);
      }
      for (Eigen::Index i = nK; i < nL; ++i) {
        Cochain e(k);
        e.set(fc.simplex(L.global_index(k, static_cast<std::size_t>(i))), g(rng));
        EXPECT_TRUE(restrict(e, K).empty());
        basis.col(i) = to_vector(e, L);
      }
      const Eigen::MatrixXd gram = basis.transpose() * basis;
      if (nK > 0 && nL > nK) EXPECT_EQ(gram.topRightCorner(nK, nL - nK).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(basis).rank(), nL);
    }
  }
}
