#include "bdc/solvers.hpp"

#include "bdc/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SVD>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <spdlog/spdlog.h>

namespace bdc {

namespace {

constexpr double kCocycleTolerance = 1e-9;

double scale_of(const Eigen::VectorXd& x) {
  return std::max(1.0, x.size() ? x.cwiseAbs().maxCoeff() : 0.0);
}

double inf_norm(const Eigen::VectorXd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

Eigen::VectorXd pad(const Eigen::VectorXd& head, std::size_t total) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
  out.head(head.size()) = head;
  return out;
}

Eigen::SparseMatrix<double> columns(const Eigen::SparseMatrix<double>& A, Eigen::Index start,
                                    Eigen::Index count) {
  return A.middleCols(start, count);
}

// Coefficients of a cochain on K, in K's k-simplex order.
Eigen::VectorXd on_k(const Cochain& beta, const PairProblem& p) {
  if (beta.degree() != p.degree)
    throw PreconditionError(fmt::format("degree-{} cochain for a degree-{} problem", beta.degree(), p.degree));
  try {
    return to_vector(beta, p.K);
  } catch (const InputError&) {
    throw PreconditionError("cochain support leaves K");
  }
}

Eigen::VectorXd on_l(const Cochain& alpha, const PairProblem& p) {
  if (alpha.degree() != p.degree)
    throw PreconditionError(fmt::format("degree-{} cochain for a degree-{} problem", alpha.degree(), p.degree));
  try {
    return to_vector(alpha, p.L);
  } catch (const InputError&) {
    throw PreconditionError("cochain support leaves L");
  }
}

void require_cocycle(const Eigen::SparseMatrix<double>& delta, const Eigen::VectorXd& x,
                     const char* where) {
  const double r = inf_norm(delta * x);
  if (r > kCocycleTolerance * scale_of(x))
    throw PreconditionError(fmt::format("cochain is not a cocycle on {} (|delta x| = {:.3e})", where, r));
}

struct UpLaplacianBlocks {
  Eigen::MatrixXd uu, up, pp;
};

UpLaplacianBlocks up_laplacian_blocks(const PairProblem& p) {
  const Eigen::SparseMatrix<double> delta = coboundary(p.L, p.degree);
  const Eigen::MatrixXd lap = Eigen::MatrixXd(delta.transpose() * delta);
  const auto nk = static_cast<Eigen::Index>(p.K.count(p.degree));
  const auto np = lap.rows() - nk;
  return {lap.topLeftCorner(nk, nk), lap.topRightCorner(nk, np), lap.bottomRightCorner(np, np)};
}

}  // namespace

PairProblem::PairProblem(Snapshot k, Snapshot l, int deg) : K(std::move(k)), L(std::move(l)), degree(deg) {
  if (!K.is_subcomplex_of(L)) throw PreconditionError("pair problem requires K to be a subcomplex of L");
  if (degree < 0) throw PreconditionError("degree must be >= 0");
}

Eigen::VectorXd min_norm_least_squares(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs,
                                       Eigen::Index dense_limit) {
  if (A.cols() == 0) return Eigen::VectorXd(0);
  // Rows without entries only add a constant to the objective.
  std::vector<Eigen::Index> row_map(static_cast<std::size_t>(A.rows()), -1);
  Eigen::Index kept = 0;
  for (Eigen::Index c = 0; c < A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      if (row_map[static_cast<std::size_t>(it.row())] < 0) row_map[static_cast<std::size_t>(it.row())] = 0;
  std::vector<Eigen::Index> rows_kept;
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    if (row_map[static_cast<std::size_t>(r)] == 0) {
      row_map[static_cast<std::size_t>(r)] = kept++;
      rows_kept.push_back(r);
    }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (Eigen::Index c = 0; c < A.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it)
      trips.emplace_back(row_map[static_cast<std::size_t>(it.row())], c, it.value());
  Eigen::SparseMatrix<double> Ac(kept, A.cols());
  Ac.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd bc(kept);
  for (Eigen::Index i = 0; i < kept; ++i) bc[i] = rhs[rows_kept[static_cast<std::size_t>(i)]];
  if (kept == 0) return Eigen::VectorXd::Zero(A.cols());

  if (A.cols() < dense_limit) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod{Eigen::MatrixXd(Ac)};
    return cod.solve(bc);
  }
  Eigen::LeastSquaresConjugateGradient<Eigen::SparseMatrix<double>> cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(10 * A.cols());
  cg.compute(Ac);
  Eigen::VectorXd x = cg.solve(bc);
  if (cg.info() != Eigen::Success)
    spdlog::warn("least-squares CG stopped after {} iterations (error {:.3e})", cg.iterations(), cg.error());
  return x;
}

Eigen::MatrixXd symmetric_pseudoinverse(const Eigen::MatrixXd& M, double rel_cutoff) {
  if (M.rows() == 0) return M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = rel_cutoff * std::max(0.0, ev.cwiseAbs().maxCoeff());
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) > cutoff && ev[i] != 0.0) inv[i] = 1.0 / ev[i];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

namespace {

// Cocycles on s in degree k, one per cohomology class: component indicators
// for k = 0, the harmonic space of the Hodge Laplacian otherwise.
Eigen::MatrixXd cohomology_basis(const Snapshot& s, int k) {
  const auto n = static_cast<Eigen::Index>(s.count(k));
  if (n == 0) return Eigen::MatrixXd(0, 0);
  const FilteredComplex& fc = s.parent();
  if (k == 0) {
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t e = 0; e < s.count(1); ++e) {
      auto f = fc.facets(s.global_index(1, e));
      parent[find(static_cast<Eigen::Index>(fc.position_in_dimension(f[0])))] =
          find(static_cast<Eigen::Index>(fc.position_in_dimension(f[1])));
    }
    std::vector<Eigen::Index> roots;
    for (Eigen::Index v = 0; v < n; ++v)
      if (find(v) == v) roots.push_back(v);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(roots.size()));
    for (Eigen::Index v = 0; v < n; ++v)
      Z(v, std::find(roots.begin(), roots.end(), find(v)) - roots.begin()) = 1.0;
    return Z;
  }
  const Eigen::MatrixXd up = Eigen::MatrixXd(coboundary(s, k));
  const Eigen::MatrixXd down = Eigen::MatrixXd(coboundary(s, k - 1));
  const Eigen::MatrixXd hodge = up.transpose() * up + down * down.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hodge);
  const double cutoff = 1e-10 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::Index dim = 0;
  while (dim < n && es.eigenvalues()[dim] <= cutoff) ++dim;
  return es.eigenvectors().leftCols(dim);
}

}  // namespace

Cochain birth_cochain(const PairProblem& p, const Cochain& alpha) {
  const int k = p.degree;
  Eigen::VectorXd a = on_l(alpha, p);
  const double scale = scale_of(a);
  require_cocycle(coboundary(p.L, k), a, "L");

  const auto nk_K = static_cast<Eigen::Index>(p.K.count(k));
  const Eigen::SparseMatrix<double> delta_prev_L = coboundary(p.L, k - 1);

  // (i) Make the representative vanish on K by subtracting a coboundary.
  const Eigen::VectorXd a_K = a.head(nk_K);
  if (inf_norm(a_K) > Cochain::kZeroTolerance) {
    if (k == 0) throw PreconditionError("degree-0 class is nonzero on K, so it is not born between K and L");
    const Eigen::SparseMatrix<double> delta_prev_K = coboundary(p.K, k - 1);
    const Eigen::VectorXd f = min_norm_least_squares(delta_prev_K, a_K);
    const double r = inf_norm(delta_prev_K * f - a_K);
    if (r > kCocycleTolerance * scale)
      throw PreconditionError(
          fmt::format("class restricted to K is not a coboundary (residual {:.3e}); it is not born between K and L", r));
    a -= delta_prev_L * pad(f, p.L.count(k - 1));
  }
  a.head(nk_K).setZero();

  // (ii) Minimize over delta g with (delta g)|_K = 0: g is free on L \ K and a
  // cocycle on K. Coboundaries on K only add terms already reachable from
  // L \ K, so one cocycle per class of H^{k-1}(K) suffices.
  if (k > 0) {
    const auto first = static_cast<Eigen::Index>(p.K.count(k - 1));
    const Eigen::MatrixXd Z = cohomology_basis(p.K, k - 1);
    std::vector<Eigen::Triplet<double>> trips;
    const Eigen::SparseMatrix<double> free = columns(delta_prev_L, first, delta_prev_L.cols() - first);
    for (Eigen::Index c = 0; c < free.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(free, c); it; ++it)
        trips.emplace_back(it.row(), c, it.value());
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
      const Eigen::VectorXd col = delta_prev_L * pad(Z.col(j), p.L.count(k - 1));
      for (Eigen::Index r = 0; r < col.size(); ++r)
        if (col[r] != 0.0) trips.emplace_back(r, free.cols() + j, col[r]);
    }
    Eigen::SparseMatrix<double> A(delta_prev_L.rows(), free.cols() + Z.cols());
    A.setFromTriplets(trips.begin(), trips.end());
    const Eigen::VectorXd g = min_norm_least_squares(A, -a);
    a += A * g;
    a.head(nk_K).setZero();
  }
  if (a.norm() <= 1e-10 * scale)
    throw PreconditionError("class is zero in H^k(L); no class is born between K and L");
  return to_cochain(a, p.L, k);
}

DeathSolution death_cochain(const PairProblem& p, const Cochain& beta) {
  const int k = p.degree;
  const Eigen::VectorXd b = on_k(beta, p);
  require_cocycle(coboundary(p.K, k), b, "K");

  const Eigen::SparseMatrix<double> delta = coboundary(p.L, k);
  const auto nk_K = static_cast<Eigen::Index>(p.K.count(k));
  const Eigen::SparseMatrix<double> A = columns(delta, nk_K, delta.cols() - nk_K);
  const Eigen::VectorXd c = delta * pad(b, p.L.count(k));
  const Eigen::VectorXd gamma = min_norm_least_squares(A, -c);

  Eigen::VectorXd potential(delta.cols());
  potential << b, gamma;
  Eigen::VectorXd omega = delta * potential;
  const double scale = scale_of(b);
  for (Eigen::Index i = 0; i < omega.size(); ++i)
    if (std::abs(omega[i]) <= 1e-12 * scale) omega[i] = 0.0;

  DeathSolution sol;
  sol.potential = to_cochain(potential, p.L, k);
  sol.cochain = to_cochain(omega, p.L, k + 1);
  sol.residual = inf_norm(A.transpose() * (c + A * gamma));
  return sol;
}

double verify_dirichlet(const PairProblem& p, const DeathSolution& sol, const Cochain& beta) {
  const int k = p.degree;
  const Eigen::VectorXd x = to_vector(sol.potential, p.L);
  const auto nk_K = static_cast<Eigen::Index>(p.K.count(k));
  // The potential must agree with beta on K; report a mismatch as residual.
  const double boundary = inf_norm(x.head(nk_K) - on_k(beta, p));
  const Eigen::SparseMatrix<double> delta = coboundary(p.L, k);
  const Eigen::VectorXd lap = delta.transpose() * (delta * x);
  return std::max(boundary, inf_norm(lap.tail(lap.size() - nk_K)));
}

double schur_death_norm(const PairProblem& p, const Cochain& beta, SchurMode mode) {
  const int k = p.degree;
  const Eigen::VectorXd b = on_k(beta, p);
  require_cocycle(coboundary(p.K, k), b, "K");

  if (mode == SchurMode::kFull) {
    const UpLaplacianBlocks blk = up_laplacian_blocks(p);
    const Eigen::MatrixXd schur = blk.uu - blk.up * symmetric_pseudoinverse(blk.pp) * blk.up.transpose();
    return b.dot(schur * b);
  }

  const Eigen::SparseMatrix<double> delta_prev_K = coboundary(p.K, k - 1);
  const double r = inf_norm(delta_prev_K.transpose() * b);
  if (r > kCocycleTolerance * scale_of(b))
    throw PreconditionError(fmt::format("beta is not harmonic on K (|delta* beta| = {:.3e})", r));

  // C^{k+1}_{L,K}: xi with delta_L^* xi supported on K and co-closed there.
  const Eigen::SparseMatrix<double> delta_L = coboundary(p.L, k);
  const Eigen::MatrixXd adjoint = Eigen::MatrixXd(delta_L.transpose());
  const auto nk_K = static_cast<Eigen::Index>(p.K.count(k));
  const Eigen::Index outside = adjoint.rows() - nk_K;
  const Eigen::Index coclosed = delta_prev_K.cols();
  Eigen::MatrixXd constraints(outside + coclosed, adjoint.cols());
  constraints.topRows(outside) = adjoint.bottomRows(outside);
  constraints.bottomRows(coclosed) = Eigen::MatrixXd(delta_prev_K.transpose()) * adjoint.topRows(nk_K);

  if (adjoint.cols() == 0) return 0.0;
  Eigen::MatrixXd basis;
  if (constraints.rows() == 0) {
    basis = Eigen::MatrixXd::Identity(adjoint.cols(), adjoint.cols());
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > cutoff) ++rank;
    basis = svd.matrixV().rightCols(adjoint.cols() - rank);
  }
  // <Delta_{L,K} e(b), e(b)> = |(d^{L,K})^* e(b)|^2 with d^{L,K} = delta_L^* on the basis.
  const Eigen::VectorXd projected = basis.transpose() * (delta_L * pad(b, p.L.count(k)));
  return projected.squaredNorm();
}

Cochain explicit_death_cochain(const PairProblem& p, const Cochain& beta) {
  const int k = p.degree;
  const Eigen::VectorXd b = on_k(beta, p);
  require_cocycle(coboundary(p.K, k), b, "K");
  const UpLaplacianBlocks blk = up_laplacian_blocks(p);
  Eigen::VectorXd potential(b.size() + blk.pp.rows());
  potential << b, -symmetric_pseudoinverse(blk.pp) * (blk.up.transpose() * b);
  Eigen::VectorXd omega = coboundary(p.L, k) * potential;
  const double scale = scale_of(b);
  for (Eigen::Index i = 0; i < omega.size(); ++i)
    if (std::abs(omega[i]) <= 1e-12 * scale) omega[i] = 0.0;
  return to_cochain(omega, p.L, k + 1);
}

DegreeZeroBirth degree0_birth_cochain(const PairProblem& p, const Bar& bar) {
  if (p.degree != 0 || bar.degree != 0) throw PreconditionError("degree-0 closed form needs a degree-0 bar");
  if (!bar.finite()) throw PreconditionError("degree-0 closed form needs a finite bar");
  const FilteredComplex& fc = p.L.parent();

  const auto vertices = fc.of_dimension(0);
  std::vector<double> vals;
  vals.reserve(vertices.size());
  for (std::size_t g : vertices) vals.push_back(fc.value(g));
  std::sort(vals.begin(), vals.end());
  if (std::adjacent_find(vals.begin(), vals.end()) != vals.end()) {
    spdlog::debug("vertex values are not injective; using the general birth-cochain solver");
    return {birth_cochain(p, representative_at(bar, fc, p.L.threshold())), true};
  }

  // Component of the birth vertex in the sublevel set just below the death value.
  std::vector<std::size_t> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t g : fc.of_dimension(1)) {
    if (!(fc.value(g) < bar.death)) break;
    auto f = fc.facets(g);
    parent[find(fc.position_in_dimension(f[0]))] = find(fc.position_in_dimension(f[1]));
  }
  const auto birth_g = fc.index_of(bar.birth_simplex);
  if (!birth_g) throw PreconditionError("bar does not belong to this filtration");
  const std::size_t root = find(fc.position_in_dimension(*birth_g));

  Cochain eta(0);
  for (std::size_t i = 0; i < p.L.count(0); ++i)
    if (find(i) == root) eta.set(fc.simplex(vertices[i]), 1.0);
  return {eta, false};
}

}  // namespace bdc
