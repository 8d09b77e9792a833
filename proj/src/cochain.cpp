#include "bdc/cochain.hpp"

#include "bdc/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace bdc {

double Cochain::operator[](const Simplex& s) const {
  auto it = coeffs_.find(s);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void Cochain::set(const Simplex& s, double v) {
  if (s.dimension() != degree_)
    throw InputError(fmt::format("{}-simplex in a degree-{} cochain", s.dimension(), degree_));
  coeffs_[s] = v;
}

void Cochain::add(const Simplex& s, double v) {
  if (s.dimension() != degree_)
    throw InputError(fmt::format("{}-simplex in a degree-{} cochain", s.dimension(), degree_));
  coeffs_[s] += v;
}

Cochain& Cochain::normalize(double tol) {
  std::erase_if(coeffs_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
  return *this;
}

double Cochain::l1_norm() const {
  double acc = 0.0;
  for (const auto& [s, v] : coeffs_) acc += std::abs(v);
  return acc;
}

double Cochain::l2_norm() const { return std::sqrt(dot(*this, *this)); }

double Cochain::max_abs() const {
  double m = 0.0;
  for (const auto& [s, v] : coeffs_) m = std::max(m, std::abs(v));
  return m;
}

Cochain& Cochain::operator*=(double a) {
  for (auto& [s, v] : coeffs_) v *= a;
  return *this;
}

Cochain& Cochain::operator+=(const Cochain& other) {
  if (other.degree_ != degree_) throw InputError("adding cochains of different degree");
  for (const auto& [s, v] : other.coeffs_) coeffs_[s] += v;
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& other) {
  if (other.degree_ != degree_) throw InputError("subtracting cochains of different degree");
  for (const auto& [s, v] : other.coeffs_) coeffs_[s] -= v;
  return *this;
}

double dot(const Cochain& a, const Cochain& b) {
  if (a.degree() != b.degree()) throw InputError("inner product of cochains of different degree");
  double acc = 0.0;
  const auto& small = a.support_size() <= b.support_size() ? a : b;
  const auto& large = a.support_size() <= b.support_size() ? b : a;
  for (const auto& [s, v] : small.coeffs()) acc += v * large[s];
  return acc;
}

Eigen::VectorXd to_vector(const Cochain& c, const Snapshot& s) {
  const FilteredComplex& fc = s.parent();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.count(c.degree())));
  for (const auto& [simplex, v] : c.coeffs()) {
    auto g = fc.index_of(simplex);
    if (!g || !s.contains(*g)) {
      if (v == 0.0) continue;
      throw InputError("cochain support leaves the snapshot");
    }
    x[static_cast<Eigen::Index>(fc.position_in_dimension(*g))] = v;
  }
  return x;
}

Cochain to_cochain(const Eigen::VectorXd& x, const Snapshot& s, int degree) {
  if (static_cast<std::size_t>(x.size()) != s.count(degree))
    throw InputError("vector length does not match the snapshot");
  Cochain c(degree);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) <= Cochain::kZeroTolerance) continue;
    c.set(s.parent().simplex(s.global_index(degree, static_cast<std::size_t>(i))), x[i]);
  }
  return c;
}

Cochain apply_coboundary(const Cochain& c, const Snapshot& s) {
  Eigen::VectorXd y = coboundary(s, c.degree()) * to_vector(c, s);
  return to_cochain(y, s, c.degree() + 1);
}

Cochain restrict(const Cochain& c, const Snapshot& to) {
  const FilteredComplex& fc = to.parent();
  Cochain out(c.degree());
  for (const auto& [simplex, v] : c.coeffs()) {
    auto g = fc.index_of(simplex);
    if (!g) throw InputError("cochain support outside the parent complex");
    if (to.contains(*g)) out.set(simplex, v);
  }
  return out;
}

Cochain extend_by_zero(const Cochain& c, const Snapshot& into) {
  for (const auto& [simplex, v] : c.coeffs()) {
    if (!into.contains(simplex)) throw InputError("cochain support leaves the target snapshot");
  }
  return c;
}

}  // namespace bdc
