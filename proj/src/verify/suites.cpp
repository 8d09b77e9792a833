#include "bdc/verify.hpp"

#include "bdc/content.hpp"
#include "bdc/errors.hpp"
#include "bdc/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace bdc::verify {

namespace {

Check finish(std::string name, double residual, double tol, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tol;
  c.passed = std::isfinite(residual) && residual <= tol;
  c.detail = std::move(detail);
  return c;
}

Eigen::MatrixXd gaussian_cloud(Rng& rng, int n, int dim = 2) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(n, dim);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = g(rng);
  return X;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

// Orthonormal basis of the kernel of a dense matrix (columns).
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& A, Eigen::Index n) {
  if (A.rows() == 0 || n == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
  const double cutoff = 1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::Index dim = 0;
  while (dim < n && es.eigenvalues()[dim] <= cutoff) ++dim;
  return es.eigenvectors().leftCols(dim);
}

// Harmonic k-cochains of a snapshot: kernel of the Hodge Laplacian.
Eigen::MatrixXd harmonic_basis(const Snapshot& s, int k) {
  const auto n = static_cast<Eigen::Index>(s.count(k));
  const Eigen::MatrixXd up = dense_coboundary(s, k);
  const Eigen::MatrixXd down = dense_coboundary(s, k - 1);
  Eigen::MatrixXd stacked(up.rows() + down.cols(), n);
  stacked << up, down.transpose();
  return kernel_basis(stacked, n);
}

struct PairCase {
  FilteredComplex fc;
  double tK = 0.0, tL = 0.0;
  int degree = 0;
};

// Random pair K = X_tK within L = X_tL from a VR cloud or a random filtration.
PairCase random_pair(Rng& rng, int trial) {
  PairCase c;
  c.degree = trial % 2;
  if (trial % 4 < 2) {
    std::uniform_int_distribution<int> n(6, 10);
    c.fc = build_vr(gaussian_cloud(rng, n(rng)), Euclidean{}, 2, kInfinity);
  } else {
    c.fc = random_filtration(rng, 8, 2);
  }
  std::vector<double> v(c.fc.values().begin(), c.fc.values().end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (v.size() < 2) return c;
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 2);
  const std::size_t a = pick(rng);
  std::uniform_int_distribution<std::size_t> pick2(a + 1, v.size() - 1);
  c.tK = v[a];
  c.tL = v[pick2(rng)];
  return c;
}

// Generic-configuration signature: the bar's simplices and the window sizes.
struct Signature {
  Simplex birth, death;
  std::vector<std::size_t> sizes;
  bool operator==(const Signature&) const = default;
};

struct Eval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Signature sig;
  double gap = 0.0;
  bool ok = false;
};

Signature signature_of(const FilteredComplex& fc, const Bar& bar, const std::vector<double>& eps) {
  Signature s{bar.birth_simplex, *bar.death_simplex, {}};
  for (double e : eps)
    for (double t : {bar.birth - e, bar.birth + e, bar.death - e, bar.death + e})
      s.sizes.push_back(snapshot(fc, t).size());
  return s;
}

template <class Build, class Adapt>
Eval evaluate(const OptConfig& cfg, int degree, Build build, Adapt adapt) {
  Eval e;
  const FilteredComplex fc = build();
  const Barcode bc = compute_persistence(fc, degree);
  auto bars = select_bar(bc, degree, Longest{});
  if (bars.empty()) return e;
  // Require a clear longest bar.
  const auto all = select_bar(bc, degree, AllFinite{});
  if (all.size() > 1 && all[0].persistence() - all[1].persistence() < 1e-3) return e;
  const Bar& bar = bars.front();
  const BarObjective obj = bar_objective(fc, bar, cfg);
  e.value = obj.value;
  e.grad = adapt(obj.grad_f);
  e.sig = signature_of(fc, bar, obj.epsilons);
  e.gap = min_gap(std::vector<double>{bar.birth - obj.epsilons[0], bar.birth + obj.epsilons[0],
                                      bar.death - obj.epsilons[0], bar.death + obj.epsilons[0]},
                  fc.values());
  for (double eps : obj.epsilons)
    e.gap = std::min(e.gap, min_gap(std::vector<double>{bar.birth - eps, bar.birth + eps, bar.death - eps,
                                                        bar.death + eps},
                                    fc.values()));
  e.ok = true;
  return e;
}

// Central differences over a flat parameter vector; nullopt when the
// configuration is not generic at step h.
template <class F>
std::optional<double> fd_relative_error(Eigen::VectorXd x, double h, F eval_at) {
  const Eval base = eval_at(x);
  if (!base.ok || base.gap < 1e-4) return std::nullopt;
  Eigen::VectorXd fd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const Eval plus = eval_at(x);
    x[i] = xi - h;
    const Eval minus = eval_at(x);
    x[i] = xi;
    if (!plus.ok || !minus.ok || !(plus.sig == base.sig) || !(minus.sig == base.sig)) return std::nullopt;
    fd[i] = (plus.value - minus.value) / (2.0 * h);
  }
  const double scale = std::max(base.grad.norm(), 1e-12);
  return (fd - base.grad).norm() / scale;
}

}  // namespace

Check barcode_oracle(const Options& o, int trials) {
  Rng rng(o.seed);
  int mismatches = 0;
  std::size_t bars = 0;
  for (int t = 0; t < trials; ++t) {
    const FilteredComplex fc = random_filtration(rng, 8, 3);
    auto fast = intervals_of(compute_persistence(fc, 2));
    const auto slow = brute_force_barcode(fc, 2);
    if (o.inject_failure && !fast.empty()) fast.front().death += 1.0;
    bars += slow.size();
    if (fast != slow) ++mismatches;
  }
  return finish("barcode matches rank oracle", mismatches, 0.0,
                fmt::format("{} filtrations, {} bars, {} mismatches", trials, bars, mismatches));
}

Check content_sandwich(const Options& o, int clouds) {
  Rng rng(o.seed + 1);
  const std::vector<double> eps0s{0.01, 0.05, 0.1, 0.2};
  std::uniform_int_distribution<int> size(8, 15);
  std::size_t checks = 0, violations = 0;
  double worst_weight_sum = 0.0;
  auto test = [&](double D, double B, double eps, double p) {
    ++checks;
    if (o.inject_failure) D += 2.0 * eps + 1.0;
    if (!(D - B - eps <= p && p <= D - B + eps)) ++violations;
  };
  for (int c = 0; c < clouds; ++c) {
    const FilteredComplex fc = build_vr(gaussian_cloud(rng, size(rng)), Euclidean{}, 2, kInfinity);
    const Barcode bc = compute_persistence(fc, 1);
    for (int k = 0; k <= 1; ++k) {
      for (const Bar& bar : bc.degree(k)) {
        if (!bar.finite()) continue;
        const double p = bar.persistence();
        double mB = 0, mD = 0, mBr = 0, mDr = 0, mE = 0;
        for (double e0 : eps0s) {
          const auto frame = EpsilonFrame::relative(fc, bar, e0);
          const ContentValue B = birth_content(frame);
          const ContentValue D = death_content(frame);
          double sb = 0, sd = 0;
          for (const auto& [s, w] : B.weights) sb += w;
          for (const auto& [s, w] : D.weights) sd += w;
          worst_weight_sum = std::max({worst_weight_sum, std::abs(sb - 1.0), std::abs(sd - 1.0)});
          test(D.value, B.value, frame.epsilon(), p);
          test(D.relaxed, B.relaxed, frame.epsilon(), p);
          mB += B.value / 4, mD += D.value / 4, mBr += B.relaxed / 4, mDr += D.relaxed / 4;
          mE += frame.epsilon() / 4;
        }
        test(mD, mB, mE, p);
        test(mDr, mBr, mE, p);
        // multi_content itself, default set.
        const double e_mean = p * (0.01 + 0.05 + 0.1) / 3.0;
        test(multi_content(fc, bar, kDefaultEpsilonSet, Side::kDeath, true),
             multi_content(fc, bar, kDefaultEpsilonSet, Side::kBirth, true), e_mean, p);
      }
    }
  }
  const double residual = violations + (worst_weight_sum > 1e-9 ? 1.0 : 0.0);
  return finish("persistence content within epsilon of persistence", residual, 0.0,
                fmt::format("{} inequalities, {} violations, max |sum weights - 1| = {:.2e}", checks, violations,
                            worst_weight_sum));
}

Check dirichlet(const Options& o, int trials) {
  Rng rng(o.seed + 2);
  double worst = 0.0;
  int done = 0;
  for (int t = 0; done < trials; ++t) {
    const PairCase c = random_pair(rng, t);
    if (c.tL <= c.tK) continue;
    const Snapshot K(c.fc, c.tK), L(c.fc, c.tL);
    const Eigen::MatrixXd Z = kernel_basis(dense_coboundary(K, c.degree), static_cast<Eigen::Index>(K.count(c.degree)));
    if (Z.cols() == 0) continue;
    const Eigen::VectorXd beta_v = Z * random_vector(rng, Z.cols());
    const Cochain beta = to_cochain(beta_v, K, c.degree);
    const PairProblem p(K, L, c.degree);
    const DeathSolution sol = death_cochain(p, beta);
    Eigen::VectorXd x = to_vector(sol.potential, L);
    if (o.inject_failure) x[x.size() - 1] += 1e-3;
    const Eigen::MatrixXd D = dense_coboundary(L, c.degree);
    const Eigen::VectorXd lap = D.transpose() * (D * x);
    const auto nK = static_cast<Eigen::Index>(K.count(c.degree));
    // Entries of beta that fall below the storage threshold read back as zero.
    double r = (x.head(nK) - to_vector(beta, K)).cwiseAbs().maxCoeff();
    if (lap.size() > nK) r = std::max(r, lap.tail(lap.size() - nK).cwiseAbs().maxCoeff());
    worst = std::max(worst, r);
    ++done;
  }
  return finish("death potential is harmonic on L minus K", worst, 1e-8,
                fmt::format("{} pair problems, degrees 0 and 1", trials));
}

Check schur_identity(const Options& o, int trials) {
  Rng rng(o.seed + 3);
  double worst = 0.0;
  int done = 0, harmonic = 0;
  for (int t = 0; done < trials; ++t) {
    const PairCase c = random_pair(rng, t);
    if (c.tL <= c.tK) continue;
    const Snapshot K(c.fc, c.tK), L(c.fc, c.tL);
    const int k = c.degree;
    const auto nK = static_cast<Eigen::Index>(K.count(k));
    const Eigen::MatrixXd Z = kernel_basis(dense_coboundary(K, k), nK);
    if (Z.cols() == 0) continue;
    const PairProblem p(K, L, k);
    const Cochain beta = to_cochain(Z * random_vector(rng, Z.cols()), K, k);
    const Cochain omega = death_cochain(p, beta).cochain;
    const double w2 = omega.l2_norm() * omega.l2_norm();
    double q = schur_death_norm(p, beta, SchurMode::kFull);
    if (o.inject_failure) q += 1e-3 * std::max(1.0, w2);
    worst = std::max(worst, std::abs(q - w2) / std::max(1.0, w2));

    // Independent dense minimum-norm solve of the death potential.
    const Eigen::MatrixXd D = dense_coboundary(L, k);
    const Eigen::VectorXd b = to_vector(beta, K);
    const Eigen::MatrixXd A = D.rightCols(D.cols() - nK);
    Eigen::VectorXd omega_dense = D.leftCols(nK) * b;
    if (A.cols() > 0) omega_dense += A * A.completeOrthogonalDecomposition().solve(-omega_dense);
    Eigen::VectorXd omega_vec = Eigen::VectorXd::Zero(D.rows());
    for (Eigen::Index r = 0; r < D.rows(); ++r)
      omega_vec[r] = omega[c.fc.simplex(L.global_index(k + 1, static_cast<std::size_t>(r)))];
    if (D.rows() > 0) worst = std::max(worst, (omega_vec - omega_dense).cwiseAbs().maxCoeff());

    const Eigen::VectorXd expl_vec = [&] {
      const Cochain e = explicit_death_cochain(p, beta);
      Eigen::VectorXd v = Eigen::VectorXd::Zero(D.rows());
      for (Eigen::Index r = 0; r < D.rows(); ++r)
        v[r] = e[c.fc.simplex(L.global_index(k + 1, static_cast<std::size_t>(r)))];
      return v;
    }();
    if (D.rows() > 0) worst = std::max(worst, (expl_vec - omega_vec).cwiseAbs().maxCoeff());

    const Eigen::MatrixXd H = harmonic_basis(K, k);
    if (H.cols() > 0) {
      const Cochain h = to_cochain(H * random_vector(rng, H.cols()), K, k);
      const Cochain oh = death_cochain(p, h).cochain;
      const double h2 = oh.l2_norm() * oh.l2_norm();
      const double qh = schur_death_norm(p, h, SchurMode::kHarmonic);
      worst = std::max(worst, std::abs(qh - h2) / std::max(1.0, h2));
      ++harmonic;
    }
    ++done;
  }
  return finish("Schur and harmonic quadratic forms equal |omega|^2; closed form matches solver", worst, 1e-8,
                fmt::format("{} pairs ({} with harmonic beta)", trials, harmonic));
}

Check degree_zero(const Options& o, int graphs) {
  Rng rng(o.seed + 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(6, 12);
  double worst = 0.0;
  int bars_checked = 0;
  for (int g = 0; g < graphs; ++g) {
    const int n = size(rng);
    std::vector<std::pair<Simplex, double>> simplices;
    std::vector<double> fv(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) simplices.emplace_back(Simplex{v}, fv[static_cast<std::size_t>(v)] = u(rng));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (u(rng) < 0.35)
          simplices.emplace_back(Simplex{a, b}, std::max(fv[static_cast<std::size_t>(a)], fv[static_cast<std::size_t>(b)]) +
                                                     0.5 * u(rng));
    const FilteredComplex fc = FilteredComplex::from_simplices(simplices);
    const Barcode bc = compute_persistence(fc, 0);
    for (const Bar& bar : bc.degree(0)) {
      if (!bar.finite()) continue;
      const double eps = (0.1 + 0.8 * u(rng)) * bar.persistence();
      // Oracle: component of the birth vertex among edges entering before d,
      // restricted to vertices present at b + eps.
      std::vector<int> comp(static_cast<std::size_t>(n));
      std::iota(comp.begin(), comp.end(), 0);
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [s, f] : simplices) {
          if (s.dimension() != 1 || !(f < bar.death)) continue;
          auto& ca = comp[static_cast<std::size_t>(s[0])];
          auto& cb = comp[static_cast<std::size_t>(s[1])];
          if (ca != cb) ca = cb = std::min(ca, cb), changed = true;
        }
      }
      const int root = comp[static_cast<std::size_t>(bar.birth_simplex[0])];
      Cochain oracle(0);
      double sum = 0.0;
      int count = 0;
      for (int v = 0; v < n; ++v)
        if (comp[static_cast<std::size_t>(v)] == root && fv[static_cast<std::size_t>(v)] <= bar.birth + eps) {
          oracle.set(Simplex{v}, 1.0);
          sum += fv[static_cast<std::size_t>(v)];
          ++count;
        }
      const EpsilonFrame frame(fc, bar, eps);
      const PairProblem p(frame.birth_before(), frame.birth_after(), 0);
      Cochain general = birth_cochain(p, representative_at(bar, fc, frame.birth_after().threshold()));
      if (o.inject_failure) general.add(bar.birth_simplex, 1e-3);
      const Cochain closed = degree0_birth_cochain(p, bar).cochain;
      worst = std::max({worst, (general - oracle).max_abs(), (closed - oracle).max_abs()});
      worst = std::max(worst, std::abs(birth_content(frame).value - sum / count));
      ++bars_checked;
    }
  }
  return finish("degree-0 birth cochain is the component indicator; content is the mean vertex value", worst, 1e-9,
                fmt::format("{} graphs, {} bars", graphs, bars_checked));
}

Check gradients(const Options& o, int configs) {
  Rng rng(o.seed + 5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  int done[3] = {0, 0, 0};
  int attempts = 0;
  for (int c = 0; c < configs; ++attempts) {
    if (attempts > 50 * configs) break;
    const int kind = c % 3;
    OptConfig cfg;
    cfg.method = (c / 3) % 2 == 0 ? Method::kCochains : Method::kMultiCochains;
    std::optional<double> err;
    if (kind == 0) {
      const Eigen::MatrixXd X0 = gaussian_cloud(rng, 8);
      auto at = [&](const Eigen::VectorXd& x) {
        const Eigen::MatrixXd X = Eigen::Map<const Eigen::MatrixXd>(x.data(), X0.rows(), X0.cols());
        return evaluate(cfg, 1, [&] { return build_vr(X, Euclidean{}, 2, kInfinity); },
                        [&](const SimplexGradient& g) {
                          const Eigen::MatrixXd G = grad_to_points(X, g);
                          return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(G.data(), G.size()));
                        });
      };
      err = fd_relative_error(Eigen::Map<const Eigen::VectorXd>(X0.data(), X0.size()), h, at);
    } else if (kind == 1) {
      const int rows = 6, cols = 6;
      const auto cx = triangulate_grid(rows, cols);
      Eigen::VectorXd img(rows * cols);
      for (Eigen::Index i = 0; i < img.size(); ++i) img[i] = u(rng);
      auto at = [&](const Eigen::VectorXd& x) {
        std::vector<double> vals(x.data(), x.data() + x.size());
        return evaluate(cfg, 0, [&] { return build_lower_star(cx, vals); },
                        [&](const SimplexGradient& g) { return grad_to_vertex_values(vals, g); });
      };
      err = fd_relative_error(img, h, at);
    } else {
      std::normal_distribution<double> g(0.0, 0.3);
      Eigen::MatrixXd S(3, 30);
      const double phase = 10.0 * u(rng);
      for (int t = 0; t < 30; ++t) {
        S(0, t) = std::sin(2.0 * std::numbers::pi * (t - phase) / 12.0) + g(rng);
        S(1, t) = std::cos(2.0 * std::numbers::pi * (t - phase) / 12.0) + g(rng);
        S(2, t) = g(rng) * 3.0;
      }
      const SlidingWindow sw = sliding_window(S, 8);
      Eigen::VectorXd w(3);
      for (Eigen::Index i = 0; i < 3; ++i) w[i] = 0.2 + u(rng);
      w /= w.sum();
      auto at = [&](const Eigen::VectorXd& x) {
        return evaluate(cfg, 1, [&] { return build_vr_from_distances(sw.distances(x), 2, kInfinity); },
                        [&](const SimplexGradient& gf) { return grad_to_weights(sw.block_distances, x, gf); });
      };
      err = fd_relative_error(w, h, at);
    }
    if (!err) continue;  // not generic at this step; draw another
    double e = *err;
    if (o.inject_failure) e += 1e-3;
    worst = std::max(worst, e);
    ++done[kind];
    ++c;
  }
  const int total = done[0] + done[1] + done[2];
  const double residual = total < configs ? kInfinity : worst;
  return finish("content gradients match central differences", residual, 1e-5,
                fmt::format("{} configurations (points {}, pixels {}, weights {}), step {:g}", total, done[0],
                            done[1], done[2], h));
}

Check dihedral(const Options& o, int n_min, int n_max, double eps0) {
  double worst = 0.0;
  for (int n = n_min; n <= n_max; ++n) worst = std::max(worst, dihedral_symmetry_check(n, eps0));
  if (o.inject_failure) worst += 1e-3;
  return finish("birth and death cochains are dihedrally (anti)symmetric", worst, 1e-8,
                fmt::format("n = {}..{}, eps0 = {}", n_min, n_max, eps0));
}

Check critical(const Options& o, int n, double eps0) {
  double g = critical_point_check(n, eps0);
  if (o.inject_failure) g += 1e-3;
  return finish("regular polygon is a constrained critical point", g, 1e-6,
                fmt::format("n = {}, eps0 = {}", n, eps0));
}

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<std::string> suite_names() { return {"solvers", "content", "symmetry", "critical", "oracle"}; }

SuiteReport run_suite(const std::string& suite, const Options& o) {
  SuiteReport r{suite, {}};
  if (suite == "solvers") {
    r.checks = {dirichlet(o), schur_identity(o), degree_zero(o)};
  } else if (suite == "content") {
    r.checks = {content_sandwich(o), gradients(o)};
  } else if (suite == "symmetry") {
    r.checks = {dihedral(o)};
  } else if (suite == "critical") {
    r.checks = {critical(o)};
  } else if (suite == "oracle") {
    r.checks = {barcode_oracle(o)};
  } else {
    throw InputError(fmt::format("unknown suite '{}'", suite));
  }
  return r;
}

}  // namespace bdc::verify
