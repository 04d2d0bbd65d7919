#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace gtorsion {

// Second-order forward-mode scalar: value, gradient and Hessian with
// respect to a fixed tuple of input variables. A Dual2 built from a plain
// double is a constant (empty derivative blocks); sizes promote on first
// contact with a variable. Chart metrics and projector fields are written
// as closures templated on the scalar type, so evaluating them on Dual2
// inputs yields exact first and second coordinate derivatives.
class Dual2 {
 public:
  double v = 0.0;
  Eigen::VectorXd g;  // gradient; size 0 marks a constant
  Eigen::MatrixXd h;  // Hessian;  size 0 marks a constant

  Dual2() = default;
  Dual2(double value) : v(value) {}  // NOLINT: implicit constant lift
  Dual2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
      : v(value), g(std::move(grad)), h(std::move(hess)) {}

  static Dual2 variable(double value, int index, int dim) {
    Dual2 r(value);
    r.g = Eigen::VectorXd::Zero(dim);
    r.g[index] = 1.0;
    r.h = Eigen::MatrixXd::Zero(dim, dim);
    return r;
  }

  int dim() const { return static_cast<int>(g.size()); }
  bool constant() const { return g.size() == 0; }

  Dual2& operator+=(const Dual2& o);
  Dual2& operator-=(const Dual2& o);
  Dual2& operator*=(const Dual2& o);
  Dual2& operator/=(const Dual2& o);
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v + b.v);
  if (a.constant()) {
    r.g = b.g;
    r.h = b.h;
  } else if (b.constant()) {
    r.g = a.g;
    r.h = a.h;
  } else {
    r.g = a.g + b.g;
    r.h = a.h + b.h;
  }
  return r;
}

inline Dual2 operator-(const Dual2& a) {
  Dual2 r(-a.v);
  if (!a.constant()) {
    r.g = -a.g;
    r.h = -a.h;
  }
  return r;
}

inline Dual2 operator-(const Dual2& a, const Dual2& b) { return a + (-b); }

inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  Dual2 r(a.v * b.v);
  if (a.constant() && b.constant()) return r;
  if (a.constant()) {
    r.g = a.v * b.g;
    r.h = a.v * b.h;
    return r;
  }
  if (b.constant()) {
    r.g = b.v * a.g;
    r.h = b.v * a.h;
    return r;
  }
  r.g = a.g * b.v + b.g * a.v;
  r.h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

// f(u) with f' and f'' supplied at u.v.
inline Dual2 dual_chain(const Dual2& u, double f, double fp, double fpp) {
  Dual2 r(f);
  if (u.constant()) return r;
  r.g = fp * u.g;
  r.h = fp * u.h + fpp * (u.g * u.g.transpose());
  return r;
}

inline Dual2 inverse(const Dual2& u) {
  double iv = 1.0 / u.v;
  return dual_chain(u, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Dual2 operator/(const Dual2& a, const Dual2& b) { return a * inverse(b); }

inline Dual2& Dual2::operator+=(const Dual2& o) { return *this = *this + o; }
inline Dual2& Dual2::operator-=(const Dual2& o) { return *this = *this - o; }
inline Dual2& Dual2::operator*=(const Dual2& o) { return *this = *this * o; }
inline Dual2& Dual2::operator/=(const Dual2& o) { return *this = *this / o; }

inline Dual2 sin(const Dual2& u) {
  return dual_chain(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v));
}
inline Dual2 cos(const Dual2& u) {
  return dual_chain(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v));
}
inline Dual2 exp(const Dual2& u) {
  double e = std::exp(u.v);
  return dual_chain(u, e, e, e);
}
inline Dual2 log(const Dual2& u) {
  return dual_chain(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}
inline Dual2 sqrt(const Dual2& u) {
  double s = std::sqrt(u.v);
  return dual_chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}
inline Dual2 abs(const Dual2& u) { return u.v < 0.0 ? -u : u; }

inline Dual2 pow(const Dual2& u, int k) {
  Dual2 r(1.0);
  for (int i = 0; i < k; ++i) r = r * u;
  return r;
}

// Value-order comparisons, enough for pivot selection in generic solvers.
inline bool operator<(const Dual2& a, const Dual2& b) { return a.v < b.v; }
inline bool operator>(const Dual2& a, const Dual2& b) { return a.v > b.v; }
inline bool operator<=(const Dual2& a, const Dual2& b) { return a.v <= b.v; }
inline bool operator>=(const Dual2& a, const Dual2& b) { return a.v >= b.v; }

// Uniform accessors so numeric kernels can be written once for double/Dual2.
inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.v; }

}  // namespace gtorsion
