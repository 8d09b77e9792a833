#pragma once

#include "bdc/content.hpp"
#include "bdc/persistence.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace bdc {

/// Seedable generator used by every experiment.
using Rng = std::mt19937_64;

enum class Method { kSimplices, kCochains, kMultiCochains, kOneStep };

Method parse_method(const std::string& name);  // InputError on unknown names
std::string to_string(Method m);

struct OptConfig {
  double gamma = 0.02;
  int iterations = 1000;
  Method method = Method::kCochains;
  double eps0 = kDefaultRelativeEpsilon;        ///< relative epsilon (single-cochain method)
  std::vector<double> eps_set = kDefaultEpsilonSet;  ///< relative epsilons (multi-cochain method)
  BarPolicy bar_policy = Longest{};
  bool penalty = true;
  std::uint64_t seed = 0;
  /// Stop when the tracked bar's persistence falls below this.
  double min_persistence = 1e-6;

  void validate() const;  // PreconditionError unless gamma > 0 and iterations >= 0
};

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  double birth = 0.0;
  double death = 0.0;
  double normalized_persistence = 0.0;
  /// b - e, b + e, d - e, d + e for every epsilon in use.
  std::vector<double> thresholds;
  /// Distinct filtration values, ascending.
  std::vector<double> filtration_values;
  /// Smallest distance from a tracked threshold to a filtration value.
  double min_gap = 0.0;
  /// Feature weights at this iteration (feature-weight runs only).
  std::vector<double> weights;
};

struct OptRun {
  std::vector<IterationRecord> records;
  /// Points (one per row), image, or weights (column vector), after the last step.
  Eigen::MatrixXd final_variables;
  std::string status = "completed";
  std::vector<std::string> events;
};

/// Sum of squared distances to the unit ball, and its gradient.
struct Penalty {
  double value = 0.0;
  Eigen::MatrixXd gradient;
};
Penalty penalty_ball(const Eigen::MatrixXd& points);

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Loss (to maximize) and its gradient with respect to filtration values for
/// one bar, for the simplices, cochains or multi-cochain method. The content
/// objective is edge-relaxed death content minus birth content.
struct BarObjective {
  double value = 0.0;
  SimplexGradient grad_f;
  std::vector<double> epsilons;  ///< absolute epsilons in use (empty for simplices)
};
BarObjective bar_objective(const FilteredComplex& fc, const Bar& bar, const OptConfig& cfg);

/// Gradient ascent on a planar (or any dimension) point cloud maximising the
/// chosen objective of the degree-1 bar picked by cfg.bar_policy, minus the
/// unit-ball penalty. Throws PreconditionError if no finite degree-1 bar exists
/// at the start.
OptRun run_point_cloud(const Eigen::MatrixXd& points, const OptConfig& cfg);

struct ImageRepairConfig {
  double epsilon = 0.1;  ///< absolute window half-width
  double gamma = 0.1;
  int iterations = 500;
  Method method = Method::kCochains;  ///< kCochains or kSimplices
};

/// Gradient descent on pixel values of the lower-star filtration of the grid,
/// reducing the summed death content (or death value) of all finite degree-0
/// bars longer than epsilon. Pixels are clamped to [0, 1] after every step.
OptRun run_image_repair(const Eigen::MatrixXd& image, const ImageRepairConfig& cfg);

/// Degree-0 bars of the image's lower-star filtration with persistence above
/// `threshold` (essential bars count).
int count_long_bars(const Eigen::MatrixXd& image, double threshold);

/// Sliding-window embedding of a d x T series with window L. Stores one
/// distance matrix per feature, D_b(i, j) = sum_l |f_b(i + l) - f_b(j + l)|,
/// so that the weighted-l1 distance is sum_b w_b D_b.
struct SlidingWindow {
  std::vector<Eigen::MatrixXd> block_distances;
  Eigen::Index points() const { return block_distances.empty() ? 0 : block_distances.front().rows(); }
  Eigen::MatrixXd distances(const Eigen::VectorXd& weights) const;
};
SlidingWindow sliding_window(const Eigen::MatrixXd& series, Eigen::Index window);

/// Explicit embedding (T - L + 1 points in R^{dL}), for export and checks.
Eigen::MatrixXd sliding_window_points(const Eigen::MatrixXd& series, const Eigen::VectorXd& weights,
                                      Eigen::Index window);

/// Projected gradient ascent on simplex weights maximising the degree-1
/// objective of the sliding-window cloud. Records persistence per iteration.
OptRun run_feature_weights(const SlidingWindow& sw, const OptConfig& cfg);

/// Objective gradient at uniform weights, projected to the simplex tangent
/// space and followed to the boundary of the simplex. Performs exactly one
/// persistence computation. Throws PreconditionError without a finite degree-1 bar.
Eigen::VectorXd one_step_weights(const SlidingWindow& sw, const OptConfig& cfg);

/// Point of the ray uniform + t * direction (t >= 0) on the simplex boundary;
/// `direction` is first projected to the tangent space (zero mean).
Eigen::VectorXd ray_to_simplex_boundary(const Eigen::VectorXd& direction);

/// 1 where grad > 0 and grad >= median of the positive entries.
std::vector<int> mask_from_gradient(const Eigen::VectorXd& grad);

/// Degree-1 objective gradient with respect to per-coordinate weights for the
/// weighted-l1 cloud `data` (rows are observations), at uniform weights.
Eigen::VectorXd feature_gradient(const Eigen::MatrixXd& data, const OptConfig& cfg);

/// Norm of the gradient of (relaxed D - B) at the regular n-gon, projected to
/// the tangent space of the constraint mean |x_i|^2 = 1. Throws
/// PreconditionError when eps0 is not generic there.
double critical_point_check(int n, double eps0);
/// Same, at an arbitrary cloud.
double projected_content_gradient(const Eigen::MatrixXd& points, double eps0);

/// Max over the 2n dihedral symmetries g of |g* c - sign(g) c|_inf for the
/// birth and death cochains of the n-gon's degree-1 bar (sign -1 for reflections).
double dihedral_symmetry_check(int n, double eps0);

/// Stability summary of a run: min gaps at the first and last record.
struct StabilitySummary {
  double initial_gap = 0.0;
  double final_gap = 0.0;
};
StabilitySummary stability_summary(const OptRun& run);

/// Smallest distance from any threshold to any of the (sorted) values.
double min_gap(std::span<const double> thresholds, std::span<const double> sorted_values);

}  // namespace bdc
