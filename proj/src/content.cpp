#include "bdc/content.hpp"

#include "bdc/errors.hpp"
#include "bdc/solvers.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bdc {

namespace {

constexpr double kGenericTolerance = 1e-12;
constexpr double kTieTolerance = 1e-12;

// Edges of s whose value lies in (lo, hi].
std::vector<Simplex> new_edges(const FilteredComplex& fc, const Simplex& s, double lo, double hi) {
  std::vector<Simplex> out;
  const auto v = s.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      Simplex e{v[i], v[j]};
      const double f = fc.value_of(e);
      if (f > lo && f <= hi) out.push_back(std::move(e));
    }
  }
  return out;
}

// Window centre of each side.
double centre(const EpsilonFrame& frame, Side side) {
  return side == Side::kBirth ? frame.bar().birth : frame.bar().death;
}

ContentValue evaluate(const EpsilonFrame& frame, Side side, Cochain cochain) {
  const FilteredComplex& fc = frame.complex();
  const double t = centre(frame, side);
  const double lo = t - frame.epsilon();
  const double hi = t + frame.epsilon();

  ContentValue out;
  out.side = side;
  cochain.normalize();
  const double l1 = cochain.l1_norm();
  if (!(l1 > 0.0))
    throw InternalError(side == Side::kBirth ? "birth cochain vanishes" : "death cochain vanishes");

  for (const auto& [s, c] : cochain.coeffs()) {
    const double f = fc.value_of(s);
    if (!(f > lo && f <= hi))
      throw InternalError(fmt::format("content support at f={} outside window ({}, {}]", f, lo, hi));
    const double w = std::abs(c) / l1;
    out.weights.emplace(s, w);
    out.value += f * w;

    double ft = f;
    if (s.dimension() >= 1) {
      const auto edges = new_edges(fc, s, lo, hi);
      if (edges.empty()) {
        ++out.relaxed_fallbacks;
      } else {
        ft = 0.0;
        for (const auto& e : edges) ft += fc.value_of(e);
        ft /= static_cast<double>(edges.size());
      }
    }
    out.relaxed += ft * w;
  }
  if (out.relaxed_fallbacks > 0)
    spdlog::debug("{} simplices without a new edge in the window; relaxed content uses f",
                 out.relaxed_fallbacks);
  out.cochain = std::move(cochain);
  return out;
}

void route(SimplexGradient& grad, const EpsilonFrame& frame, const ContentValue& v, double coeff,
           bool relaxed) {
  if (coeff == 0.0) return;
  const double t = centre(frame, v.side);
  const double lo = t - frame.epsilon();
  const double hi = t + frame.epsilon();
  for (const auto& [s, w] : v.weights) {
    if (!relaxed || s.dimension() < 1) {
      grad[s] += coeff * w;
      continue;
    }
    const auto edges = new_edges(frame.complex(), s, lo, hi);
    if (edges.empty()) {
      grad[s] += coeff * w;
      continue;
    }
    const double share = coeff * w / static_cast<double>(edges.size());
    for (const auto& e : edges) grad[e] += share;
  }
}

// Indices (into `values`) attaining the maximum, ties within tolerance.
std::vector<std::size_t> argmax_all(const std::vector<double>& values) {
  const double m = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= m - kTieTolerance * std::max(1.0, std::abs(m))) out.push_back(i);
  return out;
}

// Spread grad_f from simplices onto edges of a Rips complex given a distance
// function on vertex pairs, then hand every edge to `edge_sink`.
template <class Dist, class Sink>
void route_to_edges(const SimplexGradient& grad_f, Dist dist, Sink edge_sink) {
  for (const auto& [s, g] : grad_f) {
    if (g == 0.0 || s.dimension() < 1) continue;  // vertices sit at 0
    if (s.dimension() == 1) {
      edge_sink(s[0], s[1], g);
      continue;
    }
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<double> lengths;
    const auto v = s.vertices();
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        edges.emplace_back(v[i], v[j]);
        lengths.push_back(dist(v[i], v[j]));
      }
    const auto top = argmax_all(lengths);
    const double share = g / static_cast<double>(top.size());
    for (std::size_t i : top) edge_sink(edges[i].first, edges[i].second, share);
  }
}

}  // namespace

EpsilonFrame::EpsilonFrame(const FilteredComplex& fc, Bar bar, double epsilon)
    : fc_(&fc), bar_(std::move(bar)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_))
    throw PreconditionError(fmt::format("epsilon must be positive, got {}", epsilon_));
  if (bar_.finite() && !(epsilon_ < bar_.persistence()))
    throw PreconditionError(
        fmt::format("epsilon {} must be smaller than the bar length {}", epsilon_, bar_.persistence()));
  birth_before_ = snapshot(fc, bar_.birth - epsilon_);
  birth_after_ = snapshot(fc, bar_.birth + epsilon_);
  if (bar_.finite()) {
    death_before_ = snapshot(fc, bar_.death - epsilon_);
    death_after_ = snapshot(fc, bar_.death + epsilon_);
  }
}

EpsilonFrame EpsilonFrame::relative(const FilteredComplex& fc, Bar bar, double eps0) {
  if (!bar.finite()) throw DomainError("relative epsilon needs a finite bar");
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw PreconditionError(fmt::format("relative epsilon {} must lie in (0, 1)", eps0));
  const double eps = eps0 * bar.persistence();
  return EpsilonFrame(fc, std::move(bar), eps);
}

const Snapshot& EpsilonFrame::death_before() const {
  if (!bar_.finite()) throw DomainError("essential bar has no death window");
  return death_before_;
}

const Snapshot& EpsilonFrame::death_after() const {
  if (!bar_.finite()) throw DomainError("essential bar has no death window");
  return death_after_;
}

ContentValue birth_content(const EpsilonFrame& frame) {
  const Bar& bar = frame.bar();
  const PairProblem p(frame.birth_before(), frame.birth_after(), bar.degree);
  Cochain eta(bar.degree);
  if (bar.degree == 0 && bar.finite()) {
    eta = degree0_birth_cochain(p, bar).cochain;
  } else {
    eta = birth_cochain(p, representative_at(bar, frame.complex(), frame.birth_after().threshold()));
  }
  return evaluate(frame, Side::kBirth, std::move(eta));
}

ContentValue death_content(const EpsilonFrame& frame) {
  const Bar& bar = frame.bar();
  if (!bar.finite()) throw DomainError("death content of an essential bar");
  const PairProblem p(frame.death_before(), frame.death_after(), bar.degree);
  const Cochain beta = representative_at(bar, frame.complex(), frame.death_before().threshold());
  DeathSolution sol = death_cochain(p, beta);
  return evaluate(frame, Side::kDeath, std::move(sol.cochain));
}

ContentValue relaxed_content(const EpsilonFrame& frame, Side which) {
  ContentValue v = which == Side::kBirth ? birth_content(frame) : death_content(frame);
  v.value = v.relaxed;
  return v;
}

double multi_content(const FilteredComplex& fc, const Bar& bar, std::span<const double> rel_epsilons,
                     Side which, bool relaxed) {
  if (rel_epsilons.empty()) throw PreconditionError("empty epsilon set");
  if (!bar.finite()) throw DomainError("multi-cochain content needs a finite bar");
  for (double e0 : rel_epsilons)
    if (!(e0 > 0.0 && e0 < 1.0))
      throw PreconditionError(fmt::format("relative epsilon {} must lie in (0, 1)", e0));
  double sum = 0.0;
  for (double e0 : rel_epsilons) {
    const auto frame = EpsilonFrame::relative(fc, bar, e0);
    const ContentValue v = which == Side::kBirth ? birth_content(frame) : death_content(frame);
    sum += relaxed ? v.relaxed : v.value;
  }
  return sum / static_cast<double>(rel_epsilons.size());
}

double genericity_gap(const EpsilonFrame& frame) {
  std::vector<double> thresholds{frame.bar().birth - frame.epsilon(), frame.bar().birth + frame.epsilon()};
  if (frame.bar().finite()) {
    thresholds.push_back(frame.bar().death - frame.epsilon());
    thresholds.push_back(frame.bar().death + frame.epsilon());
  }
  const auto values = frame.complex().values();  // sorted ascending
  double gap = std::numeric_limits<double>::infinity();
  for (double t : thresholds) {
    auto it = std::lower_bound(values.begin(), values.end(), t);
    if (it != values.end()) gap = std::min(gap, std::abs(*it - t));
    if (it != values.begin()) gap = std::min(gap, std::abs(t - *std::prev(it)));
  }
  return gap;
}

bool is_generic(const EpsilonFrame& frame) { return genericity_gap(frame) > kGenericTolerance; }

void accumulate(SimplexGradient& into, const SimplexGradient& g, double scale) {
  for (const auto& [s, v] : g) into[s] += scale * v;
}

SimplexGradient content_gradient(const EpsilonFrame& frame, const ContentValue& birth,
                                 const ContentValue* death, const ContentObjective& objective) {
  SimplexGradient grad;
  route(grad, frame, birth, objective.birth_coeff, objective.relaxed_birth);
  if (death) route(grad, frame, *death, objective.death_coeff, objective.relaxed_death);
  return grad;
}

ContentReport content_report(const EpsilonFrame& frame, const ContentObjective& objective) {
  ContentReport r;
  r.generic = is_generic(frame);
  if (!r.generic)
    spdlog::warn("epsilon {} is not generic for bar [{}, {})", frame.epsilon(), frame.bar().birth,
                 frame.bar().death);
  const ContentValue birth = birth_content(frame);
  r.B = birth.value;
  r.B_relaxed = birth.relaxed;
  r.birth_weights = birth.weights;
  r.objective = objective.birth_coeff * (objective.relaxed_birth ? r.B_relaxed : r.B);
  if (frame.bar().finite()) {
    const ContentValue death = death_content(frame);
    r.D = death.value;
    r.D_relaxed = death.relaxed;
    r.death_weights = death.weights;
    r.objective += objective.death_coeff * (objective.relaxed_death ? r.D_relaxed : r.D);
    r.grad_f = content_gradient(frame, birth, &death, objective);
  } else {
    r.D = r.D_relaxed = kInfinity;
    r.grad_f = content_gradient(frame, birth, nullptr, objective);
  }
  return r;
}

Eigen::MatrixXd grad_to_points(const Eigen::MatrixXd& points, const SimplexGradient& grad_f) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(points.rows(), points.cols());
  auto dist = [&](Vertex a, Vertex b) { return (points.row(a) - points.row(b)).norm(); };
  route_to_edges(grad_f, dist, [&](Vertex a, Vertex b, double w) {
    const Eigen::RowVectorXd diff = points.row(a) - points.row(b);
    const double n = diff.norm();
    if (n == 0.0) return;  // coincident points: no direction
    g.row(a) += w * diff / n;
    g.row(b) -= w * diff / n;
  });
  return g;
}

Eigen::VectorXd grad_to_vertex_values(std::span<const double> vertex_values, const SimplexGradient& grad_f) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vertex_values.size()));
  for (const auto& [s, w] : grad_f) {
    if (w == 0.0) continue;
    std::vector<double> vals;
    for (Vertex v : s.vertices()) vals.push_back(vertex_values[static_cast<std::size_t>(v)]);
    const auto top = argmax_all(vals);
    const double share = w / static_cast<double>(top.size());
    for (std::size_t i : top) g[s[i]] += share;
  }
  return g;
}

Eigen::VectorXd grad_to_weights(std::span<const Eigen::MatrixXd> block_distances,
                                const Eigen::VectorXd& weights, const SimplexGradient& grad_f) {
  if (static_cast<Eigen::Index>(block_distances.size()) != weights.size())
    throw InputError("one block distance matrix per weight expected");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(weights.size());
  auto dist = [&](Vertex a, Vertex b) {
    double d = 0.0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) d += weights[k] * block_distances[k](a, b);
    return d;
  };
  route_to_edges(grad_f, dist, [&](Vertex a, Vertex b, double w) {
    for (Eigen::Index k = 0; k < weights.size(); ++k) g[k] += w * block_distances[k](a, b);
  });
  return g;
}

}  // namespace bdc
