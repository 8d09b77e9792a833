#pragma once

#include "bdc/complex.hpp"

#include <Eigen/Dense>

#include <map>

namespace bdc {

/// Real k-cochain stored sparsely as simplex -> coefficient.
class Cochain {
 public:
  static constexpr double kZeroTolerance = 1e-12;

  explicit Cochain(int degree = 0) : degree_(degree) {}

  int degree() const { return degree_; }
  bool empty() const { return coeffs_.empty(); }
  std::size_t support_size() const { return coeffs_.size(); }
  const std::map<Simplex, double>& coeffs() const { return coeffs_; }

  double operator[](const Simplex& s) const;
  /// Stores v at s; throws InputError if dim(s) != degree.
  void set(const Simplex& s, double v);
  void add(const Simplex& s, double v);

  /// Drops stored entries with |value| <= tol.
  Cochain& normalize(double tol = kZeroTolerance);

  double l1_norm() const;
  double l2_norm() const;
  double max_abs() const;

  Cochain& operator*=(double a);
  Cochain& operator+=(const Cochain& other);
  Cochain& operator-=(const Cochain& other);
  friend Cochain operator*(double a, Cochain c) { return c *= a; }
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }

 private:
  int degree_;
  std::map<Simplex, double> coeffs_;
};

/// Standard inner product of two cochains of equal degree.
double dot(const Cochain& a, const Cochain& b);

/// Coefficients in the snapshot's k-simplex order. Throws InputError if the
/// cochain has support outside the snapshot.
Eigen::VectorXd to_vector(const Cochain& c, const Snapshot& s);
/// Inverse of to_vector; entries with |x| <= 1e-12 are not stored.
Cochain to_cochain(const Eigen::VectorXd& x, const Snapshot& s, int degree);

/// delta applied to a cochain living on the snapshot.
Cochain apply_coboundary(const Cochain& c, const Snapshot& s);

/// Restriction map: drops simplices not in `to`. Throws InputError for
/// simplices that do not belong to the parent complex.
Cochain restrict(const Cochain& c, const Snapshot& to);
/// Extension by zero. Throws InputError if the support leaves `into`.
Cochain extend_by_zero(const Cochain& c, const Snapshot& into);

}  // namespace bdc
