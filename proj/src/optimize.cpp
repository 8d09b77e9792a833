#include "bdc/optimize.hpp"

#include "bdc/errors.hpp"
#include "bdc/experiments.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

namespace bdc {

namespace {

std::vector<double> distinct_values(const FilteredComplex& fc) {
  std::vector<double> v(fc.values().begin(), fc.values().end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> thresholds_for(const Bar& bar, const std::vector<double>& epsilons) {
  std::vector<double> t;
  for (double e : epsilons) {
    t.push_back(bar.birth - e);
    t.push_back(bar.birth + e);
    t.push_back(bar.death - e);
    t.push_back(bar.death + e);
  }
  return t;
}

void fill_record(IterationRecord& r, const FilteredComplex& fc, const Bar& bar, const std::vector<double>& eps) {
  r.birth = bar.birth;
  r.death = bar.death;
  r.thresholds = thresholds_for(bar, eps);
  r.filtration_values = distinct_values(fc);
  r.min_gap = min_gap(r.thresholds, r.filtration_values);
}

// Content objective used throughout: edge-relaxed death content minus birth content.
constexpr ContentObjective kPersistenceContent{-1.0, 1.0, false, true};

// Sign of the permutation that sorts `v`.
int sort_sign(std::vector<Vertex> v) {
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) sign = -sign;
  return sign;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "simplices") return Method::kSimplices;
  if (name == "cochains") return Method::kCochains;
  if (name == "multi" || name == "multi-cochains") return Method::kMultiCochains;
  if (name == "one-step") return Method::kOneStep;
  throw InputError(fmt::format("unknown method '{}'", name));
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kSimplices: return "simplices";
    case Method::kCochains: return "cochains";
    case Method::kMultiCochains: return "multi-cochains";
    case Method::kOneStep: return "one-step";
  }
  return "?";
}

void OptConfig::validate() const {
  if (!(gamma > 0.0)) throw PreconditionError(fmt::format("learning rate must be positive, got {}", gamma));
  if (iterations < 0) throw PreconditionError("iterations must be >= 0");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw PreconditionError(fmt::format("relative epsilon {} must lie in (0, 1)", eps0));
  if (eps_set.empty()) throw PreconditionError("empty epsilon set");
  for (double e : eps_set)
    if (!(e > 0.0 && e < 1.0)) throw PreconditionError(fmt::format("relative epsilon {} must lie in (0, 1)", e));
}

Penalty penalty_ball(const Eigen::MatrixXd& points) {
  Penalty p;
  p.gradient = Eigen::MatrixXd::Zero(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double r = points.row(i).norm();
    if (r <= 1.0) continue;
    p.value += (r - 1.0) * (r - 1.0);
    p.gradient.row(i) = 2.0 * (r - 1.0) / r * points.row(i);
  }
  return p;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) return v;
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

BarObjective bar_objective(const FilteredComplex& fc, const Bar& bar, const OptConfig& cfg) {
  if (!bar.finite()) throw PreconditionError("objective needs a finite bar");
  BarObjective out;
  const double p = bar.persistence();
  switch (cfg.method) {
    case Method::kSimplices:
      out.value = p;
      out.grad_f[*bar.death_simplex] += 1.0;
      out.grad_f[bar.birth_simplex] -= 1.0;
      out.epsilons = {cfg.eps0 * p};
      return out;
    case Method::kCochains: {
      const auto frame = EpsilonFrame::relative(fc, bar, cfg.eps0);
      ContentReport r = content_report(frame, kPersistenceContent);
      out.value = r.objective;
      out.grad_f = std::move(r.grad_f);
      out.epsilons = {frame.epsilon()};
      return out;
    }
    case Method::kMultiCochains:
    case Method::kOneStep: {
      const double scale = 1.0 / static_cast<double>(cfg.eps_set.size());
      for (double e0 : cfg.eps_set) {
        const auto frame = EpsilonFrame::relative(fc, bar, e0);
        const ContentReport r = content_report(frame, kPersistenceContent);
        out.value += scale * r.objective;
        accumulate(out.grad_f, r.grad_f, scale);
        out.epsilons.push_back(frame.epsilon());
      }
      return out;
    }
  }
  return out;
}

OptRun run_point_cloud(const Eigen::MatrixXd& points, const OptConfig& cfg) {
  cfg.validate();
  OptRun run;
  Eigen::MatrixXd X = points;
  for (int it = 0; it <= cfg.iterations; ++it) {
    const FilteredComplex fc = build_vr(X, Euclidean{}, 2, kInfinity);
    const Barcode bc = compute_persistence(fc, 1);
    const auto bars = select_bar(bc, 1, cfg.bar_policy);
    if (bars.empty()) {
      if (it == 0) throw PreconditionError("no finite degree-1 bar in the initial cloud");
      run.status = "no-bar";
      run.events.push_back(fmt::format("iteration {}: no finite degree-1 bar left", it));
      break;
    }
    BarObjective obj;
    for (const Bar& bar : bars) {
      BarObjective o = bar_objective(fc, bar, cfg);
      obj.value += o.value;
      accumulate(obj.grad_f, o.grad_f);
      obj.epsilons.insert(obj.epsilons.end(), o.epsilons.begin(), o.epsilons.end());
    }
    const Penalty pen = cfg.penalty ? penalty_ball(X) : Penalty{0.0, Eigen::MatrixXd::Zero(X.rows(), X.cols())};

    IterationRecord rec;
    rec.iteration = it;
    rec.loss = obj.value - pen.value;
    fill_record(rec, fc, bars.front(), obj.epsilons);
    const double norm = X.norm();
    rec.normalized_persistence = norm > 0.0 ? bars.front().persistence() / norm : 0.0;
    run.records.push_back(std::move(rec));

    if (it == cfg.iterations) break;
    if (bars.front().persistence() < cfg.min_persistence) {
      run.status = "collapsed";
      run.events.push_back(fmt::format("iteration {}: persistence below {}", it, cfg.min_persistence));
      break;
    }
    X += cfg.gamma * (grad_to_points(X, obj.grad_f) - pen.gradient);
  }
  run.final_variables = X;
  return run;
}

namespace {

std::vector<double> flatten(const Eigen::MatrixXd& image) {
  std::vector<double> v(static_cast<std::size_t>(image.size()));
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c)
      v[static_cast<std::size_t>(r * image.cols() + c)] = image(r, c);
  return v;
}

}  // namespace

int count_long_bars(const Eigen::MatrixXd& image, double threshold) {
  const auto cx = triangulate_grid(static_cast<int>(image.rows()), static_cast<int>(image.cols()));
  const FilteredComplex fc = build_lower_star(cx, flatten(image));
  const Barcode bc = compute_persistence(fc, 0);
  return static_cast<int>(std::count_if(bc.degree(0).begin(), bc.degree(0).end(),
                                        [&](const Bar& b) { return b.persistence() > threshold; }));
}

OptRun run_image_repair(const Eigen::MatrixXd& image, const ImageRepairConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !(cfg.epsilon > 0.0) || cfg.iterations < 0)
    throw PreconditionError("image repair needs gamma > 0, epsilon > 0, iterations >= 0");
  if (cfg.method != Method::kCochains && cfg.method != Method::kSimplices)
    throw PreconditionError("image repair supports the cochains and simplices methods");
  const int rows = static_cast<int>(image.rows());
  const int cols = static_cast<int>(image.cols());
  const auto cx = triangulate_grid(rows, cols);
  std::vector<double> vals = flatten(image);

  OptRun run;
  for (int it = 0; it <= cfg.iterations; ++it) {
    const FilteredComplex fc = build_lower_star(cx, vals);
    const Barcode bc = compute_persistence(fc, 0);
    std::vector<Bar> targets;
    for (const Bar& b : bc.degree(0))
      if (b.finite() && b.persistence() > cfg.epsilon) targets.push_back(b);

    IterationRecord rec;
    rec.iteration = it;
    SimplexGradient grad;
    std::vector<double> eps;
    for (const Bar& b : targets) {
      if (cfg.method == Method::kSimplices) {
        rec.loss += b.death;
        grad[*b.death_simplex] += 1.0;
      } else {
        const EpsilonFrame frame(fc, b, cfg.epsilon);
        const ContentValue d = death_content(frame);
        rec.loss += d.value;
        accumulate(grad, d.weights);
      }
      eps.push_back(cfg.epsilon);
    }
    if (!targets.empty()) {
      const auto longest = std::max_element(targets.begin(), targets.end(), [](const Bar& a, const Bar& b) {
        return a.persistence() < b.persistence();
      });
      fill_record(rec, fc, *longest, {cfg.epsilon});
      rec.normalized_persistence = longest->persistence();
    } else {
      rec.filtration_values = distinct_values(fc);
    }
    run.records.push_back(std::move(rec));

    if (targets.empty()) {
      run.status = "no-targets";
      break;
    }
    if (it == cfg.iterations) break;
    const Eigen::VectorXd g = grad_to_vertex_values(vals, grad);
    for (std::size_t i = 0; i < vals.size(); ++i)
      vals[i] = std::clamp(vals[i] - cfg.gamma * g[static_cast<Eigen::Index>(i)], 0.0, 1.0);
  }
  run.final_variables.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) run.final_variables(r, c) = vals[static_cast<std::size_t>(r * cols + c)];
  return run;
}

Eigen::MatrixXd SlidingWindow::distances(const Eigen::VectorXd& weights) const {
  if (static_cast<Eigen::Index>(block_distances.size()) != weights.size())
    throw InputError("one weight per feature expected");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(points(), points());
  for (std::size_t b = 0; b < block_distances.size(); ++b)
    D += weights[static_cast<Eigen::Index>(b)] * block_distances[b];
  return D;
}

SlidingWindow sliding_window(const Eigen::MatrixXd& series, Eigen::Index window) {
  const Eigen::Index T = series.cols();
  if (window < 1 || window > T)
    throw InputError(fmt::format("window length {} must lie in [1, {}]", window, T));
  const Eigen::Index n = T - window + 1;
  SlidingWindow sw;
  for (Eigen::Index b = 0; b < series.rows(); ++b) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        D(i, j) = D(j, i) = (series.row(b).segment(i, window) - series.row(b).segment(j, window)).lpNorm<1>();
    sw.block_distances.push_back(std::move(D));
  }
  return sw;
}

Eigen::MatrixXd sliding_window_points(const Eigen::MatrixXd& series, const Eigen::VectorXd& weights,
                                      Eigen::Index window) {
  const Eigen::Index d = series.rows();
  const Eigen::Index T = series.cols();
  if (window < 1 || window > T)
    throw InputError(fmt::format("window length {} must lie in [1, {}]", window, T));
  if (weights.size() != d) throw InputError("one weight per feature expected");
  const Eigen::Index n = T - window + 1;
  Eigen::MatrixXd X(n, d * window);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index b = 0; b < d; ++b)
      X.row(j).segment(b * window, window) = weights[b] * series.row(b).segment(j, window);
  return X;
}

OptRun run_feature_weights(const SlidingWindow& sw, const OptConfig& cfg) {
  cfg.validate();
  const auto d = static_cast<Eigen::Index>(sw.block_distances.size());
  Eigen::VectorXd w = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  OptRun run;
  for (int it = 0; it <= cfg.iterations; ++it) {
    const FilteredComplex fc = build_vr_from_distances(sw.distances(w), 2, kInfinity);
    const Barcode bc = compute_persistence(fc, 1);
    const auto bars = select_bar(bc, 1, Longest{});
    if (bars.empty()) {
      if (it == 0) throw PreconditionError("no finite degree-1 bar at uniform weights");
      run.status = "no-bar";
      run.events.push_back(fmt::format("iteration {}: no finite degree-1 bar left", it));
      break;
    }
    const BarObjective obj = bar_objective(fc, bars.front(), cfg);
    IterationRecord rec;
    rec.iteration = it;
    rec.loss = obj.value;
    fill_record(rec, fc, bars.front(), obj.epsilons);
    rec.normalized_persistence = bars.front().persistence();
    rec.weights.assign(w.data(), w.data() + w.size());
    run.records.push_back(std::move(rec));
    if (it == cfg.iterations) break;
    w = project_to_simplex(w + cfg.gamma * grad_to_weights(sw.block_distances, w, obj.grad_f));
  }
  run.final_variables = w;
  return run;
}

Eigen::VectorXd ray_to_simplex_boundary(const Eigen::VectorXd& direction) {
  const Eigen::Index d = direction.size();
  const double u = 1.0 / static_cast<double>(d);
  const Eigen::VectorXd g = direction.array() - direction.mean();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(d, u);
  if (g.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, direction.cwiseAbs().maxCoeff())) return w;
  Eigen::Index hit = -1;
  double t = kInfinity;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (g[i] < 0.0 && u / -g[i] < t) {
      t = u / -g[i];
      hit = i;
    }
  }
  w += t * g;
  w = w.cwiseMax(0.0);
  w[hit] = 0.0;
  return w;
}

Eigen::VectorXd one_step_weights(const SlidingWindow& sw, const OptConfig& cfg) {
  const auto d = static_cast<Eigen::Index>(sw.block_distances.size());
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  const FilteredComplex fc = build_vr_from_distances(sw.distances(w), 2, kInfinity);
  const Barcode bc = compute_persistence(fc, 1);
  const auto bars = select_bar(bc, 1, Longest{});
  if (bars.empty()) throw PreconditionError("no finite degree-1 bar at uniform weights");
  const BarObjective obj = bar_objective(fc, bars.front(), cfg);
  return ray_to_simplex_boundary(grad_to_weights(sw.block_distances, w, obj.grad_f));
}

std::vector<int> mask_from_gradient(const Eigen::VectorXd& grad) {
  std::vector<double> pos;
  for (Eigen::Index i = 0; i < grad.size(); ++i)
    if (grad[i] > 0.0) pos.push_back(grad[i]);
  std::vector<int> mask(static_cast<std::size_t>(grad.size()), 0);
  if (pos.empty()) {
    spdlog::warn("gradient has no positive entries; mask is empty");
    return mask;
  }
  std::sort(pos.begin(), pos.end());
  const std::size_t m = pos.size();
  const double median = m % 2 == 1 ? pos[m / 2] : 0.5 * (pos[m / 2 - 1] + pos[m / 2]);
  for (Eigen::Index i = 0; i < grad.size(); ++i)
    if (grad[i] > 0.0 && grad[i] >= median) mask[static_cast<std::size_t>(i)] = 1;
  return mask;
}

Eigen::VectorXd feature_gradient(const Eigen::MatrixXd& data, const OptConfig& cfg) {
  // Window 1 over the transposed data gives per-coordinate l1 blocks.
  const SlidingWindow sw = sliding_window(data.transpose(), 1);
  const auto d = static_cast<Eigen::Index>(sw.block_distances.size());
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d));
  const FilteredComplex fc = build_vr_from_distances(sw.distances(w), 2, kInfinity);
  const Barcode bc = compute_persistence(fc, 1);
  const auto bars = select_bar(bc, 1, Longest{});
  if (bars.empty()) throw PreconditionError("no finite degree-1 bar at uniform weights");
  const BarObjective obj = bar_objective(fc, bars.front(), cfg);
  const Eigen::VectorXd g = grad_to_weights(sw.block_distances, w, obj.grad_f);
  return g.array() - g.mean();
}

double projected_content_gradient(const Eigen::MatrixXd& points, double eps0) {
  const FilteredComplex fc = build_vr(points, Euclidean{}, 2, kInfinity);
  const Barcode bc = compute_persistence(fc, 1);
  const auto bars = select_bar(bc, 1, Longest{});
  if (bars.empty()) throw PreconditionError("no finite degree-1 bar");
  const auto frame = EpsilonFrame::relative(fc, bars.front(), eps0);
  if (!is_generic(frame))
    throw PreconditionError(fmt::format("relative epsilon {} is not generic here; perturb it", eps0));
  const ContentReport r = content_report(frame, kPersistenceContent);
  const Eigen::MatrixXd G = grad_to_points(points, r.grad_f);
  // Normal of the constraint mean |x_i|^2 = 1 is X itself.
  const double along = (G.array() * points.array()).sum() / points.squaredNorm();
  return (G - along * points).norm();
}

double critical_point_check(int n, double eps0) {
  if (n < 4) throw PreconditionError("regular polygon needs at least 4 vertices");
  return projected_content_gradient(regular_polygon(n), eps0);
}

double dihedral_symmetry_check(int n, double eps0) {
  if (n < 4) throw PreconditionError("regular polygon needs at least 4 vertices");
  const FilteredComplex fc = build_vr(regular_polygon(n), Euclidean{}, 2, kInfinity);
  const Barcode bc = compute_persistence(fc, 1);
  const auto bars = select_bar(bc, 1, Longest{});
  if (bars.empty()) throw PreconditionError("no finite degree-1 bar");
  const auto frame = EpsilonFrame::relative(fc, bars.front(), eps0);
  if (!is_generic(frame))
    throw PreconditionError(fmt::format("relative epsilon {} is not generic here; perturb it", eps0));
  const Cochain eta = birth_content(frame).cochain;
  const Cochain omega = death_content(frame).cochain;

  double worst = 0.0;
  for (int reflect = 0; reflect <= 1; ++reflect) {
    const double expected_sign = reflect ? -1.0 : 1.0;
    for (int r = 0; r < n; ++r) {
      auto g = [&](Vertex v) { return static_cast<Vertex>(((reflect ? -v : v) + r + 2 * n) % n); };
      for (const Cochain* c : {&eta, &omega}) {
        // (g* c)(sigma) = sign * c(sorted g(sigma)); compare on every simplex
        // of the complex in the cochain's degree.
        for (std::size_t i : fc.of_dimension(c->degree())) {
          const Simplex& s = fc.simplex(i);
          std::vector<Vertex> img;
          for (Vertex v : s.vertices()) img.push_back(g(v));
          const double pulled = sort_sign(img) * (*c)[Simplex(img)];
          worst = std::max(worst, std::abs(pulled - expected_sign * (*c)[s]));
        }
      }
    }
  }
  return worst;
}

double min_gap(std::span<const double> thresholds, std::span<const double> sorted_values) {
  double gap = kInfinity;
  for (double t : thresholds) {
    auto it = std::lower_bound(sorted_values.begin(), sorted_values.end(), t);
    if (it != sorted_values.end()) gap = std::min(gap, std::abs(*it - t));
    if (it != sorted_values.begin()) gap = std::min(gap, std::abs(t - *std::prev(it)));
  }
  return gap;
}

StabilitySummary stability_summary(const OptRun& run) {
  if (run.records.empty()) return {};
  return {run.records.front().min_gap, run.records.back().min_gap};
}

}  // namespace bdc
