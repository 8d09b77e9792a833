#pragma once

#include "bdc/cochain.hpp"
#include "bdc/complex.hpp"
#include "bdc/persistence.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace bdc {

/// A subcomplex K of L, both sublevel sets of one filtration, and a degree.
struct PairProblem {
  Snapshot K;
  Snapshot L;
  int degree = 0;

  /// Throws PreconditionError unless K is a subcomplex of L.
  PairProblem(Snapshot K, Snapshot L, int degree);
};

/// Death potential (degree k, on L) and the death cochain delta_L(potential).
struct DeathSolution {
  Cochain potential;
  Cochain cochain;
  /// Infinity norm of the normal-equation residual of the least-squares solve.
  double residual = 0.0;
};

/// Minimum-norm least-squares solution of A x ~ rhs. Dense complete orthogonal
/// decomposition below `dense_limit` unknowns, conjugate gradient on the
/// normal equations (tolerance 1e-10, 10 * unknowns iterations) above.
Eigen::VectorXd min_norm_least_squares(const Eigen::SparseMatrix<double>& A,
                                       const Eigen::VectorXd& rhs,
                                       Eigen::Index dense_limit = 2000);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix, eigenvalues below
/// rel_cutoff * (largest eigenvalue) treated as zero.
Eigen::MatrixXd symmetric_pseudoinverse(const Eigen::MatrixXd& M, double rel_cutoff = 1e-10);

/// The l2-minimal representative of [alpha]_L vanishing on K.
/// Throws PreconditionError if alpha is not a cocycle on L, if alpha|_K is not
/// a coboundary on K, or if the class is zero in H^k(L).
Cochain birth_cochain(const PairProblem& p, const Cochain& alpha);

/// Minimizes |delta_L beta'| over extensions beta' of beta from K to L.
/// A zero death cochain means the class extends to L (it does not die).
/// Throws PreconditionError if beta is not a cocycle on K.
DeathSolution death_cochain(const PairProblem& p, const Cochain& beta);

/// Infinity norm of the up-Laplacian of the potential over the k-simplices of
/// L not in K. Vanishes exactly at death potentials.
double verify_dirichlet(const PairProblem& p, const DeathSolution& sol, const Cochain& beta);

enum class SchurMode {
  kFull,      ///< Schur complement of the up-Laplacian on extension-by-zero of C^k(K)
  kHarmonic,  ///< persistent up-Laplacian quadratic form; needs beta harmonic on K
};

/// Squared norm of the death cochain computed without solving for the
/// potential. kHarmonic throws PreconditionError for non-harmonic beta.
double schur_death_norm(const PairProblem& p, const Cochain& beta, SchurMode mode);

/// Death cochain from the closed form delta_L (I - D_pp^+ D_pu) ext(beta),
/// with D the up-Laplacian of L split into K (u) and L \ K (p) blocks.
Cochain explicit_death_cochain(const PairProblem& p, const Cochain& beta);

struct DegreeZeroBirth {
  Cochain cochain;
  /// True when vertex values were not injective and the general solver was used.
  bool used_general_solver = false;
};

/// Closed-form birth cochain for a finite degree-0 bar: the indicator of the
/// vertices of L that join the bar's birth vertex before its death.
DegreeZeroBirth degree0_birth_cochain(const PairProblem& p, const Bar& bar);

}  // namespace bdc
