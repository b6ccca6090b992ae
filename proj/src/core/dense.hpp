#ifndef MONODG_CORE_DENSE_HPP
#define MONODG_CORE_DENSE_HPP

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace monodg {

// Minimal row-major dense matrix for the small per-element blocks
// ((p+1)^dim never exceeds 16 for the supported orders).
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

  std::span<const double> row(int i) const {
    return {a_.data() + size_t(i) * cols_, size_t(cols_)};
  }

  void set_zero() { a_.assign(a_.size(), 0.0); }

  // y += A x
  void mult_add(std::span<const double> x, std::span<double> y) const {
    assert(int(x.size()) == cols_ && int(y.size()) == rows_);
    const double* p = a_.data();
    for (int i = 0; i < rows_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < cols_; ++j) acc += p[j] * x[j];
      y[i] += acc;
      p += cols_;
    }
  }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

}  // namespace monodg

#endif
