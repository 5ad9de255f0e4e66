#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lccr/matrix.hpp"

using namespace lccr;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (int v : row) m.at(i, j++) = static_cast<gf_t>(v);
        ++i;
    }
    return m;
}

// random invertible matrix built as a product of elementary row operations
Matrix random_invertible(const Field& f, std::size_t n, std::mt19937& rng) {
    Matrix m = Matrix::identity(n);
    for (int ops = 0; ops < static_cast<int>(8 * n); ++ops) {
        const std::size_t a = rng() % n, b = rng() % n;
        const gf_t c = static_cast<gf_t>(rng() % f.order());
        if (ops % 3 == 0) {
            if (c != 0)
                for (std::size_t j = 0; j < n; ++j) m.at(a, j) = f.mul(m.at(a, j), c);
        } else if (a != b) {
            for (std::size_t j = 0; j < n; ++j) m.at(a, j) ^= f.mul(c, m.at(b, j));
        }
    }
    return m;
}

} // namespace

TEST_CASE("mat_mul basics") {
    Field gf2 = Field::gf2();
    Field gf4 = Field::gf4();

    Matrix m = from_rows({{1, 0, 1}, {0, 1, 1}});
    CHECK(mat_mul(gf2, Matrix::identity(2), m) == m);

    Matrix a = from_rows({{1, 1}});
    Matrix b = from_rows({{1}, {1}});
    CHECK(mat_mul(gf2, a, b) == from_rows({{0}}));

    Matrix cauchy = from_rows({{3, 2}, {2, 3}});
    Matrix ones = from_rows({{1}, {1}});
    CHECK(mat_mul(gf4, cauchy, ones) == from_rows({{1}, {1}}));

    CHECK_THROWS_AS(mat_mul(gf2, a, a), DimensionMismatch);
}

TEST_CASE("mat_inv") {
    Field gf2 = Field::gf2();
    CHECK(mat_inv(gf2, Matrix::identity(4)) == Matrix::identity(4));

    Matrix a = from_rows({{1, 1}, {0, 1}});
    CHECK(mat_inv(gf2, a) == a); // squares to identity

    CHECK_THROWS_AS(mat_inv(gf2, from_rows({{1, 1}, {1, 1}})), Singular);
    CHECK_THROWS_AS(mat_inv(gf2, Matrix(2, 3)), DimensionMismatch);
}

TEST_CASE("mat_inv(a) * a = I for random invertible matrices") {
    std::mt19937 rng(99);
    for (const Field& f : {Field::gf4(), Field::gf256()}) {
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 1 + rng() % 6;
            Matrix a = random_invertible(f, n, rng);
            Matrix inv = mat_inv(f, a);
            REQUIRE(mat_mul(f, inv, a) == Matrix::identity(n));
            REQUIRE(mat_mul(f, a, inv) == Matrix::identity(n));
        }
    }
}

TEST_CASE("mat_rank") {
    Field gf2 = Field::gf2();
    CHECK(mat_rank(gf2, Matrix(3, 4)) == 0);
    CHECK(mat_rank(gf2, Matrix::identity(5)) == 5);
    CHECK(mat_rank(gf2, from_rows({{1, 1}, {1, 1}})) == 1);
}

TEST_CASE("rank equals rank of transpose on random matrices") {
    std::mt19937 rng(7);
    Field f = Field::gf16();
    for (int trial = 0; trial < 40; ++trial) {
        Matrix a(1 + rng() % 6, 1 + rng() % 6);
        for (auto& v : a.data) v = static_cast<gf_t>(rng() % f.order());
        REQUIRE(mat_rank(f, a) == mat_rank(f, transpose(a)));
    }
}

TEST_CASE("cauchy matrix frozen values over GF(4)") {
    Field gf4 = Field::gf4();
    const std::vector<gf_t> xs{0, 1}, ys{2, 3};
    CHECK(cauchy_matrix(gf4, xs, ys) == from_rows({{3, 2}, {2, 3}}));

    const std::vector<gf_t> x1{0}, y1{1};
    CHECK(cauchy_matrix(gf4, x1, y1) == from_rows({{1}}));

    const std::vector<gf_t> xbad{0, 1}, ybad{1, 2};
    CHECK_THROWS_AS(cauchy_matrix(gf4, xbad, ybad), BadSupport);
}

TEST_CASE("every square submatrix of a cauchy matrix is invertible") {
    // exhaustive over all support splits and submatrix choices up to 4x4
    for (const Field& f : {Field::gf4(), Field::gf16()}) {
        const unsigned q = f.order();
        const std::vector<std::size_t> dims = q == 4 ? std::vector<std::size_t>{1, 2}
                                                     : std::vector<std::size_t>{2, 4};
        for (std::size_t dim : dims) {
            std::vector<gf_t> xs, ys;
            for (std::size_t i = 0; i < dim; ++i) xs.push_back(static_cast<gf_t>(i));
            for (std::size_t i = 0; i < dim; ++i) ys.push_back(static_cast<gf_t>(dim + i));
            const Matrix c = cauchy_matrix(f, xs, ys);
            for (unsigned rowmask = 1; rowmask < (1u << dim); ++rowmask)
                for (unsigned colmask = 1; colmask < (1u << dim); ++colmask) {
                    std::vector<std::size_t> rows, cols;
                    for (std::size_t i = 0; i < dim; ++i) {
                        if (rowmask & (1u << i)) rows.push_back(i);
                        if (colmask & (1u << i)) cols.push_back(i);
                    }
                    if (rows.size() != cols.size()) continue;
                    Matrix sub(rows.size(), cols.size());
                    for (std::size_t i = 0; i < rows.size(); ++i)
                        for (std::size_t j = 0; j < cols.size(); ++j)
                            sub.at(i, j) = c.at(rows[i], cols[j]);
                    REQUIRE(mat_rank(f, sub) == sub.rows);
                }
        }
    }
}

TEST_CASE("solve_exact round trips and flags bad systems") {
    std::mt19937 rng(41);
    Field f = Field::gf256();
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        Matrix a = random_invertible(f, n, rng);
        std::vector<gf_t> x(n);
        for (auto& v : x) v = static_cast<gf_t>(rng() % 256);
        // b = a x
        std::vector<gf_t> b(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) b[i] ^= f.mul(a.at(i, j), x[j]);
        auto res = solve_exact(f, a, b);
        REQUIRE(res.status == SolveStatus::Ok);
        REQUIRE(res.x == x);
    }

    // rank deficient
    Matrix a = from_rows({{1, 1}, {1, 1}});
    CHECK(solve_exact(Field::gf2(), a, {1, 1}).status == SolveStatus::RankDeficient);
    // inconsistent overdetermined: duplicate equation with different rhs
    Matrix b = from_rows({{1, 0}, {0, 1}, {1, 0}});
    CHECK(solve_exact(Field::gf2(), b, {1, 0, 0}).status == SolveStatus::Inconsistent);
}
