#include "qcforge/rational.hpp"

#include <cctype>
#include <ostream>

#include "qcforge/errors.hpp"

namespace qcforge {

Rational::Rational(long num, long den) {
  if (den == 0) throw DivisionByZero();
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DivisionByZero();
  q_ /= o.q_;
  return *this;
}

Rational Rational::pow(long e) const {
  if (e < 0) {
    if (is_zero()) throw DivisionByZero();
    return Rational(1) / pow(-e);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(e));
  return Rational(mpq_class(num, den));
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  auto bad = [&]() { return ParseError("not a rational literal: '" + std::string(text) + "'"); };
  mpq_class q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto p = s.substr(0, slash), d = s.substr(slash + 1);
    if (!all_digits(p) || !all_digits(d)) throw bad();
    mpz_class den{std::string(d)};
    if (den == 0) throw DivisionByZero();
    q = mpq_class(mpz_class(std::string(p)), den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw bad();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    mpz_class whole(ip.empty() ? std::string("0") : std::string(ip));
    mpz_class frac(fp.empty() ? std::string("0") : std::string(fp));
    q = mpq_class(whole * scale + frac, scale);
  } else {
    if (!all_digits(s)) throw bad();
    q = mpq_class(mpz_class(std::string(s)));
  }
  q.canonicalize();
  if (neg) q = -q;
  return Rational(q);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace qcforge
