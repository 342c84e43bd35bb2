#include "seaer/kernels.hpp"

#include <cassert>
#include <cmath>

namespace seaer::kernels {

namespace {

// Row i of C = A*B, accumulated in l-ascending order (axpy form).
inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    double* ci = c.row(i);
    for (int j = 0; j < c.cols; ++j) ci[j] = 0.0;
    const double* ai = a.row(i);
    for (int l = 0; l < a.cols; ++l) {
        const double ail = ai[l];
        const double* bl = b.row(l);
        for (int j = 0; j < b.cols; ++j) ci[j] += ail * bl[j];
    }
}

inline void matmul_nt_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < b.rows; ++j) {
        const double* bj = b.row(j);
        double acc = 0.0;
        for (int l = 0; l < a.cols; ++l) acc += ai[l] * bj[l];
        ci[j] = acc;
    }
}

inline void matmul_tn_row(const Matrix& a, const Matrix& b, Matrix& c, int i) {
    // C(i,j) = sum_l A(l,i) * B(l,j)
    double* ci = c.row(i);
    for (int j = 0; j < c.cols; ++j) ci[j] = 0.0;
    for (int l = 0; l < a.rows; ++l) {
        const double ali = a(l, i);
        const double* bl = b.row(l);
        for (int j = 0; j < b.cols; ++j) ci[j] += ali * bl[j];
    }
}

inline void spmm_row(const SparseOp& s, const Matrix& x, Matrix& y, int i) {
    double* yi = y.row(i);
    for (int j = 0; j < x.cols; ++j) yi[j] = 0.0;
    for (std::int64_t e = s.offsets[i]; e < s.offsets[i + 1]; ++e) {
        const double w = s.vals[e];
        const double* xr = x.row(s.cols[e]);
        for (int j = 0; j < x.cols; ++j) yi[j] += w * xr[j];
    }
}

inline double mixture_kernel(const double* x, const double* y, int d,
                             std::span<const double> scales) {
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
        const double diff = x[j] - y[j];
        sq += diff * diff;
    }
    const double dist = std::sqrt(sq);
    double k = 0.0;
    for (double s : scales) k += std::exp(-s * dist);
    return k;
}

inline void gram_row(const Matrix& e, std::span<const double> scales, Matrix& k, int i) {
    for (int j = 0; j < e.rows; ++j) k(i, j) = mixture_kernel(e.row(i), e.row(j), e.cols, scales);
}

inline double cross_rowsum_one(const Matrix& a, const Matrix& b, std::span<const double> scales,
                               int i) {
    double acc = 0.0;
    for (int j = 0; j < b.rows; ++j) acc += mixture_kernel(a.row(i), b.row(j), a.cols, scales);
    return acc;
}

}  // namespace

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    c = Matrix(a.rows, b.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) matmul_row(a, b, c, i);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    c = Matrix(a.rows, b.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) matmul_nt_row(a, b, c, i);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    c = Matrix(a.cols, b.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.cols; ++i) matmul_tn_row(a, b, c, i);
}

void spmm(const SparseOp& s, const Matrix& x, Matrix& y) {
    assert(s.n == x.rows);
    y = Matrix(s.n, x.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < s.n; ++i) spmm_row(s, x, y, i);
}

void mixture_gram(const Matrix& e, std::span<const double> scales, Matrix& k) {
    k = Matrix(e.rows, e.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < e.rows; ++i) gram_row(e, scales, k, i);
}

void mixture_cross_rowsum(const Matrix& a, const Matrix& b, std::span<const double> scales,
                          std::vector<double>& out) {
    assert(a.cols == b.cols);
    out.assign(a.rows, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) out[i] = cross_rowsum_one(a, b, scales, i);
}

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    c = Matrix(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) matmul_row(a, b, c, i);
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    c = Matrix(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) matmul_nt_row(a, b, c, i);
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    c = Matrix(a.cols, b.cols);
    for (int i = 0; i < a.cols; ++i) matmul_tn_row(a, b, c, i);
}

void spmm(const SparseOp& s, const Matrix& x, Matrix& y) {
    assert(s.n == x.rows);
    y = Matrix(s.n, x.cols);
    for (int i = 0; i < s.n; ++i) spmm_row(s, x, y, i);
}

void mixture_gram(const Matrix& e, std::span<const double> scales, Matrix& k) {
    k = Matrix(e.rows, e.rows);
    for (int i = 0; i < e.rows; ++i) gram_row(e, scales, k, i);
}

void mixture_cross_rowsum(const Matrix& a, const Matrix& b, std::span<const double> scales,
                          std::vector<double>& out) {
    assert(a.cols == b.cols);
    out.assign(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) out[i] = cross_rowsum_one(a, b, scales, i);
}

}  // namespace serial
}  // namespace seaer::kernels
