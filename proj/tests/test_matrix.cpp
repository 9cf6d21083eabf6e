#include <doctest.h>

#include <cmath>

#include "nclab/matrix.hpp"
#include "nclab/rng.hpp"
#include "oracles.hpp"

using nclab::Matrix;

TEST_CASE("matmul identity") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(matmul(Matrix::identity(2), a) == a);
}

TEST_CASE("matmul hand arithmetic") {
    const Matrix a = Matrix::from_rows({{1, 2}});
    const Matrix b = Matrix::from_rows({{3}, {4}});
    const Matrix c = matmul(a, b);
    CHECK(c.rows() == 1);
    CHECK(c.cols() == 1);
    CHECK(c(0, 0) == doctest::Approx(11.0).epsilon(0));
}

TEST_CASE("matmul matches triple-loop oracle") {
    nclab::RngState rng(42);
    Matrix a(5, 7), b(7, 3);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.next_gaussian();
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = rng.next_gaussian();
    const Matrix got = matmul(a, b);
    const Matrix want = oracles::matmul_naive(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("matmul shape error names both shapes") {
    const Matrix a(2, 3), b(4, 2);
    try {
        matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const nclab::ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("4x2") != std::string::npos);
    }
}

TEST_CASE("matmul associativity on random conformable triples") {
    nclab::RngState rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 1 + rng.next_below(6), k = 1 + rng.next_below(6),
                          n = 1 + rng.next_below(6), p = 1 + rng.next_below(6);
        Matrix a(m, k), b(k, n), c(n, p);
        for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rng.next_gaussian();
        for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = rng.next_gaussian();
        for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = rng.next_gaussian();
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < left.size(); ++i) {
            const double scale = std::max(1.0, std::fabs(right.data()[i]));
            CHECK(std::fabs(left.data()[i] - right.data()[i]) / scale < 1e-9);
        }
    }
}

TEST_CASE("transpose and data invariants") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    const Matrix t = nclab::transpose(a);
    CHECK(t.rows() == 3);
    CHECK(t(0, 1) == 4);
    CHECK(a.size() == a.rows() * a.cols());
    CHECK(a.all_finite());
    Matrix bad(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_FALSE(bad.all_finite());
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), nclab::ShapeError);
}
