#include "topogcn/matrix.hpp"

#include <cmath>
#include <string>

namespace topogcn {

namespace {

std::string dims(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

void require(bool ok, const char *op, std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc) {
    if (!ok) {
        throw ShapeError(std::string(op) + ": incompatible shapes " + dims(ar, ac) + " and " + dims(br, bc));
    }
}

} // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("DenseMatrix: payload of " + std::to_string(data_.size()) + " values for shape " +
                         dims(rows_, cols_));
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            t(c, r) = (*this)(r, c);
        }
    }
    return t;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

SparseMatrix SparseMatrix::transposed() const {
    SparseMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.row_ptr.assign(cols + 1, 0);
    for (auto c : col_idx) {
        ++t.row_ptr[c + 1];
    }
    for (std::size_t i = 0; i < cols; ++i) {
        t.row_ptr[i + 1] += t.row_ptr[i];
    }
    t.col_idx.resize(nnz());
    t.values.resize(nnz());
    std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    // Rows visited in order, so each transposed row ends up sorted.
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            auto dst = cursor[col_idx[k]]++;
            t.col_idx[dst] = static_cast<std::uint32_t>(r);
            t.values[dst] = values[k];
        }
    }
    return t;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            d(r, col_idx[k]) += values[k];
        }
    }
    return d;
}

DenseMatrix matmul(const DenseMatrix &a, const DenseMatrix &b) {
    require(a.cols() == b.rows(), "matmul", a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix out(a.rows(), b.cols());
    const std::size_t inner = a.cols();
    const std::size_t width = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double *dst = out.data().data() + i * width;
        const double *arow = a.data().data() + i * inner;
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) {
                continue;
            }
            const double *brow = b.data().data() + k * width;
            for (std::size_t j = 0; j < width; ++j) {
                dst[j] += aik * brow[j];
            }
        }
    }
    return out;
}

DenseMatrix matmul_tn(const DenseMatrix &a, const DenseMatrix &b) {
    require(a.rows() == b.rows(), "matmul_tn", a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix out(a.cols(), b.cols());
    const std::size_t width = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double *arow = a.data().data() + r * a.cols();
        const double *brow = b.data().data() + r * width;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ari = arow[i];
            if (ari == 0.0) {
                continue;
            }
            double *dst = out.data().data() + i * width;
            for (std::size_t j = 0; j < width; ++j) {
                dst[j] += ari * brow[j];
            }
        }
    }
    return out;
}

DenseMatrix matmul_nt(const DenseMatrix &a, const DenseMatrix &b) {
    require(a.cols() == b.cols(), "matmul_nt", a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double *arow = a.data().data() + i * a.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double *brow = b.data().data() + j * b.cols();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += arow[k] * brow[k];
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix spmm(const SparseMatrix &s, const DenseMatrix &x) {
    require(s.cols == x.rows(), "spmm", s.rows, s.cols, x.rows(), x.cols());
    DenseMatrix out(s.rows, x.cols());
    const std::size_t width = x.cols();
    for (std::size_t r = 0; r < s.rows; ++r) {
        double *dst = out.data().data() + r * width;
        for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k) {
            const double v = s.values[k];
            const double *src = x.data().data() + static_cast<std::size_t>(s.col_idx[k]) * width;
            for (std::size_t j = 0; j < width; ++j) {
                dst[j] += v * src[j];
            }
        }
    }
    return out;
}

DenseMatrix spmm_t(const SparseMatrix &s, const DenseMatrix &x) {
    require(s.rows == x.rows(), "spmm_t", s.rows, s.cols, x.rows(), x.cols());
    DenseMatrix out(s.cols, x.cols());
    const std::size_t width = x.cols();
    for (std::size_t r = 0; r < s.rows; ++r) {
        const double *src = x.data().data() + r * width;
        for (std::size_t k = s.row_ptr[r]; k < s.row_ptr[r + 1]; ++k) {
            const double v = s.values[k];
            double *dst = out.data().data() + static_cast<std::size_t>(s.col_idx[k]) * width;
            for (std::size_t j = 0; j < width; ++j) {
                dst[j] += v * src[j];
            }
        }
    }
    return out;
}

DenseMatrix hconcat(const DenseMatrix &a, const DenseMatrix &b) {
    require(a.rows() == b.rows(), "hconcat", a.rows(), a.cols(), b.rows(), b.cols());
    DenseMatrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row(r);
        auto ra = a.row(r);
        auto rb = b.row(r);
        std::copy(ra.begin(), ra.end(), dst.begin());
        std::copy(rb.begin(), rb.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    return out;
}

DenseMatrix vconcat(const DenseMatrix &a, const DenseMatrix &b) {
    require(a.cols() == b.cols(), "vconcat", a.rows(), a.cols(), b.rows(), b.cols());
    std::vector<double> data;
    data.reserve(a.size() + b.size());
    data.insert(data.end(), a.data().begin(), a.data().end());
    data.insert(data.end(), b.data().begin(), b.data().end());
    return DenseMatrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

DenseMatrix fold_stacked(const DenseMatrix &x) {
    if (x.rows() % 2 != 0) {
        throw ShapeError("fold_stacked: row count " + std::to_string(x.rows()) + " is odd");
    }
    const std::size_t n = x.rows() / 2;
    const std::size_t o = x.cols();
    DenseMatrix out(n, 2 * o);
    for (std::size_t i = 0; i < n; ++i) {
        auto dst = out.row(i);
        auto top = x.row(i);
        auto bottom = x.row(n + i);
        std::copy(top.begin(), top.end(), dst.begin());
        std::copy(bottom.begin(), bottom.end(), dst.begin() + static_cast<std::ptrdiff_t>(o));
    }
    return out;
}

DenseMatrix unfold_stacked(const DenseMatrix &x) {
    if (x.cols() % 2 != 0) {
        throw ShapeError("unfold_stacked: column count " + std::to_string(x.cols()) + " is odd");
    }
    const std::size_t n = x.rows();
    const std::size_t o = x.cols() / 2;
    DenseMatrix out(2 * n, o);
    for (std::size_t i = 0; i < n; ++i) {
        auto src = x.row(i);
        std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(o), out.row(i).begin());
        std::copy(src.begin() + static_cast<std::ptrdiff_t>(o), src.end(), out.row(n + i).begin());
    }
    return out;
}

} // namespace topogcn
