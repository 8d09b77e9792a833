#include "bdc/content.hpp"
#include "bdc/errors.hpp"
#include "bdc/experiments.hpp"
#include "bdc/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bdc;

namespace {

// a(0), b(0.2), c(0.3), bc(0.35), ab(0.9): b's bar is [0.2, 0.9).
FilteredComplex toy() {
  return FilteredComplex::from_simplices({{Simplex{0}, 0.0},
                                          {Simplex{1}, 0.2},
                                          {Simplex{2}, 0.3},
                                          {Simplex{1, 2}, 0.35},
                                          {Simplex{0, 1}, 0.9}});
}

Bar bar_born_at(const FilteredComplex& fc, int degree, double birth) {
  const Barcode bc = compute_persistence(fc, degree);
  for (const Bar& b : bc.degree(degree))
    if (b.birth == birth) return b;
  throw std::runtime_error("bar not found");
}

FilteredComplex square() {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 1, 0, 1, 1, 0, 1;
  return build_vr(X, Euclidean{}, 2, kInfinity);
}

}  // namespace

TEST(Content, DegreeZeroAverage) {
  const FilteredComplex fc = toy();
  const Bar bar = bar_born_at(fc, 0, 0.2);
  const EpsilonFrame frame(fc, bar, 0.12);
  const ContentValue B = birth_content(frame);
  EXPECT_NEAR(B.value, 0.25, 1e-15);
  EXPECT_NEAR(B.weights.at(Simplex{1}), 0.5, 1e-15);
}

TEST(Content, DeathOnSingleEdge) {
  const FilteredComplex fc = toy();
  const EpsilonFrame frame(fc, bar_born_at(fc, 0, 0.2), 0.05);
  EXPECT_EQ(death_content(frame).value, 0.9);
  // Single new vertex on the birth side as well.
  EXPECT_EQ(birth_content(frame).value, 0.2);
}

TEST(Content, InvariantUnderScaling) {
  const FilteredComplex fc = square();
  Bar bar = compute_persistence(fc, 1).degree(1)[0];
  const EpsilonFrame a(fc, bar, 0.1);
  bar.representative *= -3.0;
  const EpsilonFrame b(fc, bar, 0.1);
  EXPECT_NEAR(birth_content(a).value, birth_content(b).value, 1e-14);
  EXPECT_NEAR(death_content(a).value, death_content(b).value, 1e-14);
}

TEST(Content, SquareDeathOnTriangles) {
  const FilteredComplex fc = square();
  const EpsilonFrame frame(fc, compute_persistence(fc, 1).degree(1)[0], 0.1);
  const ContentValue D = death_content(frame);
  EXPECT_NEAR(D.value, std::sqrt(2.0), 1e-15);
  for (const auto& [s, w] : D.weights) EXPECT_EQ(s.dimension(), 2);
  EXPECT_NEAR(birth_content(frame).value, 1.0, 1e-15);
}

TEST(Content, SandwichOnRandomClouds) {
  verify::Options o;
  o.seed = 31;
  const verify::Check c = verify::content_sandwich(o, 6);
  EXPECT_TRUE(c.passed) << c.detail;
}

TEST(Content, RejectsBadEpsilon) {
  const FilteredComplex fc = toy();
  const Bar bar = bar_born_at(fc, 0, 0.2);
  EXPECT_THROW(EpsilonFrame(fc, bar, 0.0), PreconditionError);
  EXPECT_THROW(EpsilonFrame(fc, bar, 0.7), PreconditionError);
  EXPECT_THROW(EpsilonFrame::relative(fc, bar_born_at(fc, 0, 0.0), 0.05), DomainError);
}

TEST(Relaxed, MeanOfNewEdges) {
  // Square 0123 at 1, filled by a cone on vertex 4 whose edges arrive late.
  std::vector<std::pair<Simplex, double>> s{{Simplex{0}, 0},    {Simplex{1}, 0},    {Simplex{2}, 0},
                                            {Simplex{3}, 0},    {Simplex{4}, 0},    {Simplex{0, 1}, 1},
                                            {Simplex{1, 2}, 1}, {Simplex{2, 3}, 1}, {Simplex{0, 3}, 1}};
  const std::map<Vertex, double> spoke{{0, 1.90}, {1, 1.94}, {2, 1.97}, {3, 1.99}};
  for (const auto& [v, f] : spoke) s.emplace_back(Simplex{v, 4}, f);
  for (const Simplex& t : {Simplex{0, 1, 4}, Simplex{1, 2, 4}, Simplex{2, 3, 4}, Simplex{0, 3, 4}})
    s.emplace_back(t, 2.0);
  const FilteredComplex fc = FilteredComplex::from_simplices(s);
  const Bar bar = bar_born_at(fc, 1, 1.0);
  ASSERT_EQ(bar.death, 2.0);
  const EpsilonFrame frame(fc, bar, 0.15);
  const ContentValue D = death_content(frame);
  EXPECT_NEAR(D.value, 2.0, 1e-14);
  EXPECT_EQ(D.relaxed_fallbacks, 0u);
  double expected = 0.0;
  for (const auto& [t, w] : D.weights) expected += w * 0.5 * (spoke.at(t[0]) + spoke.at(t[1]));
  EXPECT_NEAR(D.relaxed, expected, 1e-14);
  EXPECT_NEAR(relaxed_content(frame, Side::kDeath).value, expected, 1e-14);
}

TEST(Relaxed, SingleNewEdgeKeepsValue) {
  const FilteredComplex fc = square();
  const EpsilonFrame frame(fc, compute_persistence(fc, 1).degree(1)[0], 0.1);
  // Each filling triangle has exactly one new (diagonal) edge of length sqrt 2.
  EXPECT_NEAR(death_content(frame).relaxed, std::sqrt(2.0), 1e-15);
}

TEST(Relaxed, RegularDecagonWithinEpsilon) {
  const FilteredComplex fc = build_vr(regular_polygon(10), Euclidean{}, 2, kInfinity);
  const Bar bar = compute_persistence(fc, 1).degree(1)[0];
  const EpsilonFrame frame = EpsilonFrame::relative(fc, bar, 0.05);
  const ContentValue D = death_content(frame);
  EXPECT_LE(std::abs(D.relaxed - D.value), frame.epsilon());
}

TEST(MultiContent, SingletonEqualsSingle) {
  const FilteredComplex fc = square();
  const Bar bar = compute_persistence(fc, 1).degree(1)[0];
  const std::vector<double> one{0.2};
  const EpsilonFrame frame = EpsilonFrame::relative(fc, bar, 0.2);
  EXPECT_EQ(multi_content(fc, bar, one, Side::kDeath, false), death_content(frame).value);
  EXPECT_EQ(multi_content(fc, bar, one, Side::kBirth, true), birth_content(frame).relaxed);
  // Every epsilon in the default set sees the same cochain here.
  EXPECT_NEAR(multi_content(fc, bar, kDefaultEpsilonSet, Side::kDeath, false), std::sqrt(2.0), 1e-15);
  const std::vector<double> bad{0.05, 1.5};
  EXPECT_THROW(multi_content(fc, bar, bad, Side::kDeath, false), PreconditionError);
}

TEST(Genericity, Detection) {
  const FilteredComplex sq = square();
  EXPECT_TRUE(is_generic(EpsilonFrame(sq, compute_persistence(sq, 1).degree(1)[0], 0.1)));
  const FilteredComplex fc = toy();
  // b + e = 0.3 is the value of vertex c.
  const EpsilonFrame hit(fc, bar_born_at(fc, 0, 0.2), 0.1);
  EXPECT_FALSE(is_generic(hit));
  EXPECT_LT(genericity_gap(hit), 1e-12);
  const FilteredComplex poly = build_vr(regular_polygon(10), Euclidean{}, 2, kInfinity);
  EXPECT_TRUE(is_generic(EpsilonFrame::relative(poly, compute_persistence(poly, 1).degree(1)[0], 0.05)));
}

TEST(Gradient, TwoPointsMoveApart) {
  Eigen::MatrixXd X(2, 2);
  X << 0, 0, 3, 4;
  const FilteredComplex fc = build_vr(X, Euclidean{}, 1, kInfinity);
  const Bar bar = select_bar(compute_persistence(fc, 0), 0, Longest{})[0];
  const ContentReport r = content_report(EpsilonFrame::relative(fc, bar, 0.1), {0.0, 1.0, false, false});
  EXPECT_NEAR(r.D, 5.0, 1e-15);
  const Eigen::MatrixXd G = grad_to_points(X, r.grad_f);
  EXPECT_NEAR(G(1, 0), 0.6, 1e-15);
  EXPECT_NEAR(G(1, 1), 0.8, 1e-15);
  EXPECT_NEAR(G(0, 0), -0.6, 1e-15);
  EXPECT_NEAR(G(0, 1), -0.8, 1e-15);
}

TEST(Gradient, LinearInFrozenValues) {
  const FilteredComplex fc = square();
  const EpsilonFrame frame(fc, compute_persistence(fc, 1).degree(1)[0], 0.1);
  const ContentReport r = content_report(frame, {-1.0, 1.0, false, false});
  for (const auto& [s, w] : r.death_weights) {
    const double from_birth = r.birth_weights.contains(s) ? r.birth_weights.at(s) : 0.0;
    EXPECT_NEAR(r.grad_f.at(s), w - from_birth, 1e-15);
  }
  double objective = 0.0;
  for (const auto& [s, g] : r.grad_f) objective += g * fc.value_of(s);
  EXPECT_NEAR(objective, r.objective, 1e-14);
}

TEST(Gradient, LowerStarRoutesToArgmax) {
  SimplexGradient g{{Simplex{0, 1}, 2.0}, {Simplex{0, 1, 2}, 1.0}};
  const std::vector<double> vals{0.1, 0.5, 0.5};
  const Eigen::VectorXd v = grad_to_vertex_values(vals, g);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 2.5);
  EXPECT_EQ(v[2], 0.5);
}

TEST(Gradient, WeightsAreBlockDistances) {
  std::vector<Eigen::MatrixXd> blocks{Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)};
  blocks[0](0, 1) = blocks[0](1, 0) = 2.0;
  blocks[1](0, 1) = blocks[1](1, 0) = 5.0;
  const Eigen::VectorXd w = Eigen::Vector2d(0.5, 0.5);
  const Eigen::VectorXd g = grad_to_weights(blocks, w, {{Simplex{0, 1}, 1.5}});
  EXPECT_EQ(g[0], 3.0);
  EXPECT_EQ(g[1], 7.5);
}

TEST(Gradient, MatchesFiniteDifferences) {
  verify::Options o;
  o.seed = 5;
  const verify::Check c = verify::gradients(o, 9);
  EXPECT_TRUE(c.passed) << c.detail << " residual " << c.residual;
}
