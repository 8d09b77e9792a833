#pragma once

#include "bdc/complex.hpp"
#include "bdc/optimize.hpp"
#include "bdc/persistence.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

/// Independent checks. Nothing here reuses the library's reduction or solver
/// internals: matrices are rebuilt densely from simplex lists and ranks or
/// least-squares problems are solved directly.
namespace bdc::verify {

struct Interval {
  int degree = 0;
  double birth = 0.0;
  double death = 0.0;
  friend auto operator<=>(const Interval&, const Interval&) = default;
};

/// Barcode from homology ranks rank(H_k(X_s) -> H_k(X_t)) at all pairs of
/// filtration values, by inclusion-exclusion. Sorted.
std::vector<Interval> brute_force_barcode(const FilteredComplex& fc, int max_degree);
std::vector<Interval> intervals_of(const Barcode& bc);

/// Random face-closed filtration on up to `max_vertices` vertices with
/// simplices up to `max_dim`; values on a coarse grid so ties occur.
FilteredComplex random_filtration(Rng& rng, int max_vertices, int max_dim);

/// Dense coboundary delta^k of a snapshot, built from the sign rule (-1)^j.
Eigen::MatrixXd dense_coboundary(const Snapshot& s, int k);

struct Check {
  std::string name;
  double residual = 0.0;  ///< worst measured value
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::uint64_t seed = 20240521;
  /// Perturbs every measured quantity so that the checks must fail.
  bool inject_failure = false;
};

Check barcode_oracle(const Options& o, int trials = 200);
Check content_sandwich(const Options& o, int clouds = 50);
Check dirichlet(const Options& o, int trials = 100);
Check schur_identity(const Options& o, int trials = 100);
Check degree_zero(const Options& o, int graphs = 20);
Check gradients(const Options& o, int configs = 50);
Check dihedral(const Options& o, int n_min = 5, int n_max = 9, double eps0 = 0.05);
Check critical(const Options& o, int n = 10, double eps0 = 0.05);

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  bool passed() const;
};

/// Suites: solvers, content, symmetry, critical, oracle. InputError for others.
SuiteReport run_suite(const std::string& suite, const Options& o);
std::vector<std::string> suite_names();

}  // namespace bdc::verify
