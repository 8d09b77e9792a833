#pragma once

#include "bdc/cochain.hpp"
#include "bdc/complex.hpp"
#include "bdc/persistence.hpp"

#include <Eigen/Dense>

#include <map>
#include <span>
#include <vector>

namespace bdc {

/// Gradient with respect to independent filtration values, keyed by simplex.
using SimplexGradient = std::map<Simplex, double>;

/// A bar together with its four window snapshots X_{b-e}, X_{b+e}, X_{d-e}, X_{d+e}.
class EpsilonFrame {
 public:
  /// Throws PreconditionError unless 0 < epsilon < d - b.
  EpsilonFrame(const FilteredComplex& fc, Bar bar, double epsilon);
  /// epsilon = eps0 * (d - b); DomainError for an essential bar.
  static EpsilonFrame relative(const FilteredComplex& fc, Bar bar, double eps0);

  const FilteredComplex& complex() const { return *fc_; }
  const Bar& bar() const { return bar_; }
  double epsilon() const { return epsilon_; }

  const Snapshot& birth_before() const { return birth_before_; }
  const Snapshot& birth_after() const { return birth_after_; }
  const Snapshot& death_before() const;  // DomainError for essential bars
  const Snapshot& death_after() const;

  /// epsilon < (d - b) / 2, the range where B <= D is guaranteed.
  bool comparable() const { return 2.0 * epsilon_ < bar_.persistence(); }

 private:
  const FilteredComplex* fc_;
  Bar bar_;
  double epsilon_;
  Snapshot birth_before_, birth_after_, death_before_, death_after_;
};

enum class Side { kBirth, kDeath };

/// Content of one side of a frame: the cochain (birth cochain eta or death
/// cochain omega), its l1-normalised magnitudes and both content values.
struct ContentValue {
  Side side = Side::kBirth;
  Cochain cochain;
  std::map<Simplex, double> weights;
  double value = 0.0;    ///< sum f(sigma) * weight
  double relaxed = 0.0;  ///< sum f~(sigma) * weight, f~ = mean over edges new in the window
  /// Simplices of dimension >= 1 without a new edge, which fall back to f.
  std::size_t relaxed_fallbacks = 0;
};

ContentValue birth_content(const EpsilonFrame& frame);
/// Throws DomainError for essential bars and InternalError if omega vanishes.
ContentValue death_content(const EpsilonFrame& frame);
/// Same cochain and weights as the unrelaxed side; `value` holds the relaxed content.
ContentValue relaxed_content(const EpsilonFrame& frame, Side which);

/// Mean content over relative epsilons eps0 in `rel_epsilons`.
/// Throws PreconditionError naming the first invalid eps0.
double multi_content(const FilteredComplex& fc, const Bar& bar, std::span<const double> rel_epsilons,
                     Side which, bool relaxed);

inline constexpr double kDefaultRelativeEpsilon = 0.05;
inline const std::vector<double> kDefaultEpsilonSet{0.01, 0.05, 0.1};

/// None of b +- e, d +- e lies within 1e-12 of a filtration value.
bool is_generic(const EpsilonFrame& frame);
/// Smallest distance from b +- e, d +- e to a filtration value.
double genericity_gap(const EpsilonFrame& frame);

/// A linear objective c_B * B + c_D * D built from one frame.
struct ContentObjective {
  double birth_coeff = -1.0;
  double death_coeff = 1.0;
  bool relaxed_birth = false;
  bool relaxed_death = true;
};

struct ContentReport {
  double B = 0.0;
  double D = 0.0;
  double B_relaxed = 0.0;
  double D_relaxed = 0.0;
  double objective = 0.0;
  std::map<Simplex, double> birth_weights;
  std::map<Simplex, double> death_weights;
  SimplexGradient grad_f;
  bool generic = true;
};

/// Evaluates both sides (death side skipped for essential bars) and the
/// gradient of `objective` with the cochains held fixed.
ContentReport content_report(const EpsilonFrame& frame, const ContentObjective& objective = {});

/// d(objective)/d f(sigma): unrelaxed terms put weight on sigma, relaxed terms
/// spread it evenly over the window's new edges of sigma.
SimplexGradient content_gradient(const EpsilonFrame& frame, const ContentValue& birth,
                                 const ContentValue* death, const ContentObjective& objective);

void accumulate(SimplexGradient& into, const SimplexGradient& g, double scale = 1.0);

// ---------------------------------------------------------------------------
// Chain rules from filtration values to the optimised variables.

/// Vietoris-Rips on a Euclidean point cloud. Simplices of dimension >= 2 route
/// to their longest edge(s); exact ties split evenly.
Eigen::MatrixXd grad_to_points(const Eigen::MatrixXd& points, const SimplexGradient& grad_f);

/// Lower-star filtration: each simplex routes to its arg-max vertex (ties split).
Eigen::VectorXd grad_to_vertex_values(std::span<const double> vertex_values, const SimplexGradient& grad_f);

/// Weighted-l1 Vietoris-Rips with d(i,j) = sum_b w_b * block_distances[b](i,j).
Eigen::VectorXd grad_to_weights(std::span<const Eigen::MatrixXd> block_distances,
                                const Eigen::VectorXd& weights, const SimplexGradient& grad_f);

}  // namespace bdc
