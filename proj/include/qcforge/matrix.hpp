#pragma once

#include <vector>

#include "qcforge/errors.hpp"
#include "qcforge/rational.hpp"

namespace qcforge {

// Small dense row-major matrix over an exact or floating scalar.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : r_(rows), c_(cols), v_(static_cast<std::size_t>(rows) * cols, T(0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  T& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * c_ + j]; }
  const T& operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * c_ + j]; }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
  T trace() const {
    T s(0);
    for (int i = 0; i < r_ && i < c_; ++i) s += (*this)(i, i);
    return s;
  }
  bool is_zero() const {
    for (const auto& x : v_)
      if (!(x == T(0))) return false;
    return true;
  }

  Matrix operator-() const {
    Matrix m(r_, c_);
    for (std::size_t k = 0; k < v_.size(); ++k) m.v_[k] = -v_[k];
    return m;
  }
  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : v_) x *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw FrameMismatch("matrix product shape mismatch");
    Matrix m(a.r_, b.c_);
    for (int i = 0; i < a.r_; ++i)
      for (int k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (x == T(0)) continue;
        for (int j = 0; j < b.c_; ++j) m(i, j) += x * b(k, j);
      }
    return m;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.v_ == b.v_; }

 private:
  void check_same(const Matrix& o) const {
    if (o.r_ != r_ || o.c_ != c_) throw FrameMismatch("matrix shape mismatch");
  }
  int r_ = 0, c_ = 0;
  std::vector<T> v_;
};

using RMatrix = Matrix<Rational>;

}  // namespace qcforge
