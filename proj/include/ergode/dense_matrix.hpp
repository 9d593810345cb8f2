#pragma once

#include <cstddef>
#include <vector>

namespace ergode {

// Row-major dense matrix. Just enough surface for limit matrices, oracles and
// report emission; anything heavier stays an implementation detail of solve.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_data(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_data(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// max_ij |a_ij − b_ij|; dimensions must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix identity_matrix(std::size_t n);

}  // namespace ergode
