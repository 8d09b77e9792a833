#include "bdc/errors.hpp"
#include "bdc/experiments.hpp"
#include "bdc/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bdc;

TEST(Penalty, OutsideBall) {
  Eigen::MatrixXd X(1, 2);
  X << 2, 0;
  const Penalty p = penalty_ball(X);
  EXPECT_EQ(p.value, 1.0);
  // d/dx (|x| - 1)^2 = 2 (|x| - 1) x / |x|
  EXPECT_EQ(p.gradient(0, 0), 2.0);
  EXPECT_EQ(p.gradient(0, 1), 0.0);
}

TEST(Penalty, InsideAndOnBoundary) {
  Eigen::MatrixXd X(2, 2);
  X << 0.3, 0.4, 0.6, 0.8;
  const Penalty p = penalty_ball(X);
  EXPECT_EQ(p.value, 0.0);
  EXPECT_EQ(p.gradient.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simplex, Projection) {
  const Eigen::VectorXd w = project_to_simplex(Eigen::Vector3d(0.9, 0.4, -0.2));
  EXPECT_NEAR(w.sum(), 1.0, 1e-15);
  EXPECT_GE(w.minCoeff(), 0.0);
  EXPECT_NEAR(w[0], 0.75, 1e-15);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
  const Eigen::VectorXd inside = Eigen::Vector3d(0.2, 0.3, 0.5);
  EXPECT_LT((project_to_simplex(inside) - inside).norm(), 1e-15);
}

TEST(Simplex, RayToBoundary) {
  const Eigen::VectorXd w = ray_to_simplex_boundary(Eigen::Vector2d(1.0, -1.0));
  EXPECT_NEAR(w[0], 1.0, 1e-15);
  EXPECT_EQ(w[1], 0.0);
  const Eigen::VectorXd u = ray_to_simplex_boundary(Eigen::Vector3d::Zero());
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(u[i], 1.0 / 3.0, 1e-15);
  // A constant direction is orthogonal to the simplex.
  const Eigen::VectorXd c = ray_to_simplex_boundary(Eigen::Vector3d::Constant(2.0));
  EXPECT_NEAR(c[0], 1.0 / 3.0, 1e-15);
}

TEST(Mask, TopHalfOfPositives) {
  EXPECT_EQ(mask_from_gradient(Eigen::Vector4d(3, 1, -2, 4)), (std::vector<int>{1, 0, 0, 1}));
  EXPECT_EQ(mask_from_gradient(Eigen::Vector3d(-1, -2, -3)), (std::vector<int>{0, 0, 0}));
}

TEST(SlidingWindow, Shapes) {
  Rng rng(1);
  const Eigen::MatrixXd series = periodic_series(rng);
  ASSERT_EQ(series.rows(), 10);
  ASSERT_EQ(series.cols(), 300);
  const SlidingWindow sw = sliding_window(series, 250);
  EXPECT_EQ(sw.points(), 51);
  EXPECT_EQ(sw.block_distances.size(), 10u);
  EXPECT_THROW(sliding_window(series, 301), InputError);
}

TEST(SlidingWindow, ConstantSeriesCollapses) {
  const SlidingWindow sw = sliding_window(Eigen::MatrixXd::Constant(3, 20, 0.7), 5);
  EXPECT_EQ(sw.distances(Eigen::Vector3d::Constant(1.0 / 3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SlidingWindow, SingleFeatureWeight) {
  Rng rng(2);
  const Eigen::MatrixXd series = periodic_series(rng, 3, 40, 1, 0.5, 10.0);
  const SlidingWindow sw = sliding_window(series, 6);
  const Eigen::MatrixXd D = sw.distances(Eigen::Vector3d(1, 0, 0));
  EXPECT_EQ((D - sw.block_distances[0]).cwiseAbs().maxCoeff(), 0.0);
  // Explicit embedding agrees with the block distances.
  const Eigen::VectorXd w = Eigen::Vector3d(0.2, 0.5, 0.3);
  const Eigen::MatrixXd P = sliding_window_points(series, w, 6);
  const Eigen::MatrixXd Dw = sw.distances(w);
  EXPECT_NEAR((P.row(0) - P.row(7)).cwiseAbs().sum(), Dw(0, 7), 1e-12);
}

TEST(OneStep, SinglePersistenceComputation) {
  Rng rng(3);
  const SlidingWindow sw = sliding_window(periodic_series(rng), 250);
  OptConfig cfg;
  cfg.method = Method::kOneStep;
  const auto before = persistence_computation_count();
  const Eigen::VectorXd w = one_step_weights(sw, cfg);
  EXPECT_EQ(persistence_computation_count() - before, 1u);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  EXPECT_EQ(w.minCoeff(), 0.0);
}

TEST(FeatureWeights, NoiseOnlyRunCompletes) {
  Rng rng(4);
  const Eigen::MatrixXd series = periodic_series(rng, 4, 80, 0, 1.0, 20.0);
  OptConfig cfg;
  cfg.method = Method::kMultiCochains;
  cfg.iterations = 5;
  cfg.gamma = 1.0 / 640.0;
  const OptRun run = run_feature_weights(sliding_window(series, 20), cfg);
  EXPECT_NEAR(run.final_variables.sum(), 1.0, 1e-12);
  EXPECT_EQ(run.records.front().weights.size(), 4u);
}

TEST(PointCloud, ZeroIterationsEchoInput) {
  Rng rng(5);
  Eigen::MatrixXd X;
  do X = noisy_circle(10, 0.1, rng);
  while (select_bar(compute_persistence(build_vr(X, Euclidean{}, 2, kInfinity), 1), 1, Longest{}).empty());
  OptConfig cfg;
  cfg.iterations = 0;
  const OptRun run = run_point_cloud(X, cfg);
  EXPECT_EQ(run.records.size(), 1u);
  EXPECT_EQ(run.final_variables, X);
}

TEST(PointCloud, NoLoopIsAPreconditionFailure) {
  Eigen::MatrixXd X(3, 2);
  X << 0, 0, 1, 0, 2, 0;
  EXPECT_THROW(run_point_cloud(X, OptConfig{}), PreconditionError);
}

TEST(PointCloud, ShortRunIncreasesPersistence) {
  Rng rng(6);
  Eigen::MatrixXd X;
  do X = noisy_circle(10, 0.1, rng);
  while (select_bar(compute_persistence(build_vr(X, Euclidean{}, 2, kInfinity), 1), 1, Longest{}).empty());
  for (Method m : {Method::kSimplices, Method::kCochains, Method::kMultiCochains}) {
    OptConfig cfg;
    cfg.method = m;
    cfg.iterations = 50;
    const OptRun run = run_point_cloud(X, cfg);
    EXPECT_GT(run.records.back().normalized_persistence, run.records.front().normalized_persistence)
        << to_string(m);
  }
}

TEST(ImageRepair, ConstantImageStopsAtOnce) {
  const OptRun run = run_image_repair(Eigen::MatrixXd::Constant(5, 5, 0.4), ImageRepairConfig{});
  EXPECT_EQ(run.records.size(), 1u);
  EXPECT_EQ(run.status, "no-targets");
}

TEST(ImageRepair, SinglePixelDeathMatchesSimplices) {
  // Two dark pixels separated by one bright pixel in a row; the merge happens
  // at that pixel alone, so both methods take the same step.
  Eigen::MatrixXd img(1, 3);
  img << 0.0, 0.8, 0.1;
  ImageRepairConfig a;
  a.iterations = 1;
  a.epsilon = 0.05;
  ImageRepairConfig b = a;
  b.method = Method::kSimplices;
  const OptRun ra = run_image_repair(img, a), rb = run_image_repair(img, b);
  EXPECT_EQ(ra.final_variables, rb.final_variables);
  EXPECT_NEAR(ra.final_variables(0, 1), 0.8 - a.gamma, 1e-15);
}

TEST(ImageRepair, TwoBlobImageHealsToOneComponent) {
  Rng rng(7);
  const Eigen::MatrixXd img = corrupt_image(two_blob_image(), Corruption{}, rng);
  EXPECT_EQ(count_long_bars(img, 0.2), 2);
  const OptRun run = run_image_repair(img, ImageRepairConfig{});
  EXPECT_EQ(count_long_bars(run.final_variables, 0.2), 1);
  EXPECT_GE(run.final_variables.minCoeff(), 0.0);
  EXPECT_LE(run.final_variables.maxCoeff(), 1.0);
}

TEST(Symmetry, RegularPolygons) {
  EXPECT_LE(dihedral_symmetry_check(6, 0.05), 1e-8);
  for (int n = 5; n <= 10; ++n) EXPECT_LE(critical_point_check(n, 0.05), 1e-6) << n;
}

TEST(Symmetry, PerturbedPolygonIsNotCritical) {
  Eigen::MatrixXd X = regular_polygon(10);
  X(3, 0) += 0.05;
  X(7, 1) -= 0.03;
  EXPECT_GT(projected_content_gradient(X, 0.05), 1e-4);
}

TEST(Stability, MinGap) {
  const std::vector<double> values{0.0, 1.0, 2.0};
  const std::vector<double> thr{0.9, 1.75};
  EXPECT_NEAR(min_gap(thr, values), 0.1, 1e-15);
  OptRun run;
  run.records.resize(2);
  run.records[0].min_gap = 0.3;
  run.records[1].min_gap = 0.01;
  const StabilitySummary s = stability_summary(run);
  EXPECT_EQ(s.initial_gap, 0.3);
  EXPECT_EQ(s.final_gap, 0.01);
}

TEST(Methods, ParseRoundTrip) {
  for (Method m : {Method::kSimplices, Method::kCochains, Method::kMultiCochains, Method::kOneStep})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("multi"), Method::kMultiCochains);
  EXPECT_THROW(parse_method("newton"), InputError);
}
