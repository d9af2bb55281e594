#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace topogcn {

class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major dense matrix of doubles.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> &data() noexcept { return data_; }
    const std::vector<double> &data() const noexcept { return data_; }

    DenseMatrix transposed() const;

    bool all_finite() const;

    friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Compressed sparse row matrix. Column indices within a row are sorted.
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col_idx;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return values.size(); }
    SparseMatrix transposed() const;
    DenseMatrix to_dense() const;
};

// Products. Zero entries of the left operand are skipped, which makes binary
// bag-of-words inputs cheap without a separate sparse kernel.
DenseMatrix matmul(const DenseMatrix &a, const DenseMatrix &b);
/// aᵀ · b
DenseMatrix matmul_tn(const DenseMatrix &a, const DenseMatrix &b);
/// a · bᵀ
DenseMatrix matmul_nt(const DenseMatrix &a, const DenseMatrix &b);
DenseMatrix spmm(const SparseMatrix &s, const DenseMatrix &x);
/// sᵀ · x without materializing the transpose.
DenseMatrix spmm_t(const SparseMatrix &s, const DenseMatrix &x);

/// Columns of `b` appended to the right of `a`.
DenseMatrix hconcat(const DenseMatrix &a, const DenseMatrix &b);
/// Rows of `b` appended below `a`.
DenseMatrix vconcat(const DenseMatrix &a, const DenseMatrix &b);

/// (2n x o) -> (n x 2o): row i becomes (x[i,:], x[n+i,:]).
DenseMatrix fold_stacked(const DenseMatrix &x);
/// Inverse of fold_stacked: (n x 2o) -> (2n x o).
DenseMatrix unfold_stacked(const DenseMatrix &x);

} // namespace topogcn
