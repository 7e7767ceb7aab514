#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

namespace qcforge {

// Order-3 truncated Taylor data [v, v', v'', v'''] at a sample point.
// `order` counts how many derivative slots are still meaningful; it drops by one each
// time a jet is differentiated so that stale slots never leak into results.
struct Jet {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
  int order = 3;

  constexpr Jet() = default;
  constexpr Jet(double v) : c{v, 0.0, 0.0, 0.0} {}  // NOLINT: constants promote
  constexpr Jet(double v, double d1, double d2, double d3, int ord = 3) : c{v, d1, d2, d3}, order(ord) {}

  static constexpr Jet variable(double u) { return Jet(u, 1.0, 0.0, 0.0); }

  double value() const { return c[0]; }
  double operator[](int k) const { return c[k]; }

  Jet derivative() const {
    Jet r(c[1], c[2], c[3], 0.0, order - 1);
    return r;
  }

  Jet operator-() const { return Jet(-c[0], -c[1], -c[2], -c[3], order); }
  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < 4; ++k) c[k] += o.c[k];
    order = std::min(order, o.order);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < 4; ++k) c[k] -= o.c[k];
    order = std::min(order, o.order);
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    const auto& a = c;
    const auto& b = o.c;
    std::array<double, 4> r{a[0] * b[0], a[1] * b[0] + a[0] * b[1],
                            a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
                            a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3]};
    c = r;
    order = std::min(order, o.order);
    return *this;
  }
  Jet& operator/=(const Jet& o);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

  friend bool operator==(const Jet& a, const Jet& b) { return a.c == b.c && a.order == b.order; }
};

// phi(f) given phi and its first three derivatives evaluated at f.value().
inline Jet compose(const Jet& f, double p0, double p1, double p2, double p3) {
  const double d1 = f.c[1], d2 = f.c[2], d3 = f.c[3];
  return Jet(p0, p1 * d1, p2 * d1 * d1 + p1 * d2, p3 * d1 * d1 * d1 + 3.0 * p2 * d1 * d2 + p1 * d3, f.order);
}

Jet reciprocal(const Jet& f);
// Real power with exponent num/den in lowest terms. Negative bases are rejected unless the
// exponent is an integer.
Jet pow_rational(const Jet& f, long num, long den);
Jet exp(const Jet& f);
Jet sinh(const Jet& f);
Jet cosh(const Jet& f);
Jet log(const Jet& f);
Jet sqrt(const Jet& f);

inline Jet& Jet::operator/=(const Jet& o) { return *this *= reciprocal(o); }

inline bool is_zero(const Jet& j) { return j.c[0] == 0.0 && j.c[1] == 0.0 && j.c[2] == 0.0 && j.c[3] == 0.0; }
inline double to_double(const Jet& j) { return j.c[0]; }

std::ostream& operator<<(std::ostream& os, const Jet& j);

}  // namespace qcforge
