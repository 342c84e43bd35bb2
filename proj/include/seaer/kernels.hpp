#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seaer/matrix.hpp"

namespace seaer {

// Sparse row-stochastic / normalized operator in CSR form.
struct SparseOp {
    int n = 0;
    std::vector<std::int64_t> offsets;  // size n+1
    std::vector<std::int32_t> cols;
    std::vector<double> vals;
};

namespace kernels {

// OpenMP-parallel kernels. Each output element is produced by exactly one
// thread with the same inner-loop order as the serial reference, so results
// are bit-identical to kernels::serial.

// C = A * B
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
// C = A * B^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
// C = A^T * B
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
// Y = S * X
void spmm(const SparseOp& s, const Matrix& x, Matrix& y);
// K[i][j] = sum_s exp(-scale_s * ||E_i - E_j||_2)
void mixture_gram(const Matrix& e, std::span<const double> scales, Matrix& k);
// out[i] = sum_j sum_s exp(-scale_s * ||A_i - B_j||_2)
void mixture_cross_rowsum(const Matrix& a, const Matrix& b, std::span<const double> scales,
                          std::vector<double>& out);

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
void spmm(const SparseOp& s, const Matrix& x, Matrix& y);
void mixture_gram(const Matrix& e, std::span<const double> scales, Matrix& k);
void mixture_cross_rowsum(const Matrix& a, const Matrix& b, std::span<const double> scales,
                          std::vector<double>& out);

}  // namespace serial
}  // namespace kernels
}  // namespace seaer
