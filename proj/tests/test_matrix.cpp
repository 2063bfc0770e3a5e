#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <hessforms/matrix.hpp>

using namespace hessforms;

namespace {

IntegerMatrix from_rows(std::vector<std::vector<long>> rows) {
    IntegerMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return m;
}

IntegerMatrix random_matrix(std::mt19937_64& rng, int r, int c, int lim) {
    std::uniform_int_distribution<int> u(-lim, lim);
    IntegerMatrix m(r, c);
    for (auto& x : m.a) x = u(rng);
    return m;
}

// brute-force oracle for kernel point counting
Int brute_kernel_count(const IntegerMatrix& m, long B) {
    std::vector<long> y(m.cols, -B);
    Int count = 0;
    while (true) {
        bool ok = true;
        for (int i = 0; i < m.rows && ok; ++i) {
            Int s = 0;
            for (int j = 0; j < m.cols; ++j) s += m.at(i, j) * y[j];
            if (s != 0) ok = false;
        }
        if (ok) count += 1;
        int k = 0;
        while (k < m.cols && y[k] == B) y[k++] = -B;
        if (k == m.cols) break;
        ++y[k];
    }
    return count;
}

}  // namespace

TEST_CASE("rank_rational") {
    REQUIRE(rank_rational(from_rows({{0, 1}, {1, 0}})) == 2);
    REQUIRE(rank_rational(IntegerMatrix(3, 3)) == 0);
    REQUIRE(rank_rational(from_rows({{2, 4}, {1, 2}})) == 1);
}

TEST_CASE("rank_mod_p") {
    auto m = from_rows({{2, 0}, {0, 2}});
    REQUIRE(rank_mod_p(m, 2) == 0);
    REQUIRE(rank_mod_p(m, 5) == 2);
    CHECK_THROWS_AS(rank_mod_p(m, 6), std::invalid_argument);

    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 30; ++iter) {
        auto r = random_matrix(rng, 2 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 4), 9);
        int rq = rank_rational(r);
        for (long p : {2L, 3L, 5L, 101L}) REQUIRE(rank_mod_p(r, p) <= rq);
        // a large prime exceeding every entry magnitude times any minor bound
        REQUIRE(rank_mod_p(r, 1000003L) == rq);
    }
}

TEST_CASE("adjugate contract") {
    REQUIRE(adjugate(IntegerMatrix::identity(2)) == IntegerMatrix::identity(2));

    auto m = from_rows({{1, 2}, {3, 4}});
    auto c = adjugate(m);
    Int det = determinant(m);
    REQUIRE(det == -2);
    REQUIRE(matmul(m, transpose(c)) == [&] {
        IntegerMatrix d(2, 2);
        d.at(0, 0) = det;
        d.at(1, 1) = det;
        return d;
    }());

    auto s = from_rows({{1, 1}, {1, 1}});
    auto cs = adjugate(s);
    auto z = matmul(s, transpose(cs));
    REQUIRE(z == IntegerMatrix(2, 2));

    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 25; ++iter) {
        int n = 1 + static_cast<int>(rng() % 6);
        auto r = random_matrix(rng, n, n, 6);
        auto adj = adjugate(r);
        Int d = determinant(r);
        IntegerMatrix di(n, n);
        for (int i = 0; i < n; ++i) di.at(i, i) = d;
        REQUIRE(matmul(r, transpose(adj)) == di);
        REQUIRE(matmul(adj, transpose(r)) == di);
    }
}

TEST_CASE("kernel_basis") {
    auto z = kernel_basis(IntegerMatrix(1, 2));
    REQUIRE(z.basis.size() == 2);

    auto id = kernel_basis(IntegerMatrix::identity(2));
    REQUIRE(id.basis.empty());

    auto k = kernel_basis(from_rows({{1, 2}}));
    REQUIRE(k.basis.size() == 1);
    // saturation: the primitive generator itself, up to sign
    REQUIRE(abs(k.basis[0][0]) == 2);
    REQUIRE(abs(k.basis[0][1]) == 1);

    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 40; ++iter) {
        int r = 1 + static_cast<int>(rng() % 3);
        int c = 1 + static_cast<int>(rng() % 5);
        auto m = random_matrix(rng, r, c, 7);
        auto kb = kernel_basis(m);
        REQUIRE(static_cast<int>(kb.basis.size()) == c - rank_rational(m));
        for (const auto& v : kb.basis) {
            for (int i = 0; i < r; ++i) {
                Int s = 0;
                for (int j = 0; j < c; ++j) s += m.at(i, j) * v[j];
                REQUIRE(s == 0);
            }
        }
        if (!kb.basis.empty()) {
            IntegerMatrix vb(static_cast<int>(kb.basis.size()), c);
            for (size_t i = 0; i < kb.basis.size(); ++i)
                for (int j = 0; j < c; ++j) vb.at(static_cast<int>(i), j) = kb.basis[i][j];
            REQUIRE(rank_rational(vb) == static_cast<int>(kb.basis.size()));
        }
    }
}

TEST_CASE("count_kernel_points_in_box") {
    REQUIRE(count_kernel_points_in_box(IntegerMatrix::identity(3), 10) == 1);
    REQUIRE(count_kernel_points_in_box(IntegerMatrix(2, 3), 2) == 125);
    REQUIRE(count_kernel_points_in_box(from_rows({{1, -1}}), 3) == 7);

    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 40; ++iter) {
        int r = 1 + static_cast<int>(rng() % 2);
        int c = 2 + static_cast<int>(rng() % 3);
        auto m = random_matrix(rng, r, c, 4);
        long B = 1 + static_cast<long>(rng() % 5);
        REQUIRE(count_kernel_points_in_box(m, B) == brute_kernel_count(m, B));
    }
}
