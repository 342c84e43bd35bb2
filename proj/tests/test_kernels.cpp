#include <doctest.h>

#include "oracles.hpp"
#include "seaer/kernels.hpp"
#include "seaer/rng.hpp"

using namespace seaer;

TEST_CASE("parallel kernels are bit-identical to the serial references") {
    Rng rng(99);
    const double scales[] = {1.0, 0.1, 0.01};
    // odd sizes exercise uneven thread partitions
    for (const auto [m, k, n] : {std::array{7, 13, 5}, std::array{64, 33, 17}, std::array{1, 9, 1}}) {
        const Matrix a = oracle::random_matrix(m, k, rng);
        const Matrix b = oracle::random_matrix(k, n, rng);
        Matrix c1, c2;
        kernels::serial::matmul(a, b, c1);
        kernels::matmul(a, b, c2);
        CHECK(c1.data == c2.data);

        const Matrix bt = oracle::random_matrix(n, k, rng);
        kernels::serial::matmul_nt(a, bt, c1);
        kernels::matmul_nt(a, bt, c2);
        CHECK(c1.data == c2.data);

        const Matrix a2 = oracle::random_matrix(k, m, rng);
        kernels::serial::matmul_tn(a2, b, c1);
        kernels::matmul_tn(a2, b, c2);
        CHECK(c1.data == c2.data);

        const Matrix e = oracle::random_matrix(m, k, rng);
        kernels::serial::mixture_gram(e, scales, c1);
        kernels::mixture_gram(e, scales, c2);
        CHECK(c1.data == c2.data);

        const Matrix e2 = oracle::random_matrix(std::max(1, m / 2), k, rng);
        std::vector<double> r1, r2;
        kernels::serial::mixture_cross_rowsum(e, e2, scales, r1);
        kernels::mixture_cross_rowsum(e, e2, scales, r2);
        CHECK(r1 == r2);
    }
}

TEST_CASE("matmul matches a plain triple loop") {
    Rng rng(7);
    const Matrix a = oracle::random_matrix(6, 4, rng);
    const Matrix b = oracle::random_matrix(4, 5, rng);
    Matrix c;
    kernels::matmul(a, b, c);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) {
            double acc = 0.0;
            for (int l = 0; l < 4; ++l) acc += a(i, l) * b(l, j);
            CHECK(c(i, j) == doctest::Approx(acc).epsilon(1e-12));
        }
}

TEST_CASE("transposed products match explicit transposition") {
    Rng rng(8);
    const Matrix a = oracle::random_matrix(5, 3, rng);
    const Matrix b = oracle::random_matrix(5, 4, rng);
    Matrix tn;
    kernels::matmul_tn(a, b, tn);  // a^T b: 3x4
    Matrix at(3, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 3; ++j) at(j, i) = a(i, j);
    Matrix expect;
    kernels::matmul(at, b, expect);
    for (std::size_t i = 0; i < expect.data.size(); ++i)
        CHECK(tn.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));

    const Matrix c = oracle::random_matrix(6, 3, rng);
    Matrix nt;
    // a (5x3) * c (6x3)^T -> 5x6
    kernels::matmul_nt(a, c, nt);
    Matrix ct(3, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) ct(j, i) = c(i, j);
    kernels::matmul(a, ct, expect);
    for (std::size_t i = 0; i < expect.data.size(); ++i)
        CHECK(nt.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}

TEST_CASE("spmm equals a dense multiply") {
    Rng rng(12);
    const int n = 9;
    SparseOp op;
    op.n = n;
    op.offsets.assign(n + 1, 0);
    Matrix dense(n, n);
    std::vector<std::pair<int, double>> entries;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (rng.uniform() < 0.3) {
                const double v = rng.normal();
                dense(i, j) = v;
                op.offsets[i + 1]++;
                entries.push_back({j, v});
            }
    }
    for (int i = 0; i < n; ++i) op.offsets[i + 1] += op.offsets[i];
    for (const auto& [j, v] : entries) {
        op.cols.push_back(j);
        op.vals.push_back(v);
    }
    const Matrix x = oracle::random_matrix(n, 4, rng);
    Matrix y, expect;
    kernels::spmm(op, x, y);
    kernels::matmul(dense, x, expect);
    for (std::size_t i = 0; i < expect.data.size(); ++i)
        CHECK(y.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
}
