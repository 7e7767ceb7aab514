#include "qcforge/jet.hpp"

#include <ostream>
#include <sstream>

#include "qcforge/errors.hpp"

namespace qcforge {

Jet reciprocal(const Jet& f) {
  const double x = f.c[0];
  if (x == 0.0) throw DomainError("reciprocal of a jet with zero value");
  const double i = 1.0 / x;
  return compose(f, i, -i * i, 2.0 * i * i * i, -6.0 * i * i * i * i);
}

Jet pow_rational(const Jet& f, long num, long den) {
  const double x = f.c[0];
  const double p = static_cast<double>(num) / static_cast<double>(den);
  if (den == 1) {
    if (x == 0.0 && num < 0) throw DomainError("negative power of zero");
    // Integer exponents: falling-factorial coefficients, exact at x = 0 too.
    auto ip = [&](long e) { return e < 0 && x == 0.0 ? 0.0 : std::pow(x, static_cast<double>(e)); };
    const double n = static_cast<double>(num);
    return compose(f, ip(num), n * ip(num - 1), n * (n - 1) * ip(num - 2), n * (n - 1) * (n - 2) * ip(num - 3));
  }
  if (x < 0.0) {
    std::ostringstream os;
    os << "fractional power " << num << "/" << den << " of negative value " << x;
    throw DomainError(os.str());
  }
  if (x == 0.0) throw DomainError("fractional power is not differentiable at 0");
  const double v = std::pow(x, p);
  return compose(f, v, p * v / x, p * (p - 1) * v / (x * x), p * (p - 1) * (p - 2) * v / (x * x * x));
}

Jet exp(const Jet& f) {
  const double e = std::exp(f.c[0]);
  return compose(f, e, e, e, e);
}

Jet sinh(const Jet& f) {
  const double s = std::sinh(f.c[0]), ch = std::cosh(f.c[0]);
  return compose(f, s, ch, s, ch);
}

Jet cosh(const Jet& f) {
  const double s = std::sinh(f.c[0]), ch = std::cosh(f.c[0]);
  return compose(f, ch, s, ch, s);
}

Jet log(const Jet& f) {
  const double x = f.c[0];
  if (x <= 0.0) throw DomainError("logarithm of non-positive value");
  return compose(f, std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet sqrt(const Jet& f) { return pow_rational(f, 1, 2); }

std::ostream& operator<<(std::ostream& os, const Jet& j) {
  os << "[" << j.c[0];
  for (int k = 1; k < 4; ++k) os << ", " << j.c[k];
  return os << "]";
}

}  // namespace qcforge
