#include <catch2/catch_amalgamated.hpp>

#include <hessforms/examples.hpp>

using namespace hessforms;

namespace {

std::vector<Int> iv(std::initializer_list<long> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST_CASE("example1_form construction") {
    REQUIRE(example1_form(1, 1, 2, iv({1}), iv({1})) == parse_form("x1^2*x2^2 + x3^4", 3));
    REQUIRE(example1_form(2, 1, 2, iv({1, -2}), iv({3})) ==
            parse_form("x1^2*x2^2 - 2*x3^2*x4^2 + 3*x5^4", 5));
    // empty b-sum boundary
    REQUIRE(example1_form(1, 0, 2, iv({1}), {}) == parse_form("x1^2*x2^2", 2));

    CHECK_THROWS_AS(example1_form(1, 1, 1, iv({1}), iv({1})), std::invalid_argument);
    CHECK_THROWS_AS(example1_form(1, 1, 2, iv({0}), iv({1})), std::invalid_argument);
    CHECK_THROWS_AS(example1_form(1, 1, 2, iv({1, 1}), iv({1})), std::invalid_argument);
    CHECK_THROWS_AS(example1_form(0, 0, 2, {}, {}), std::invalid_argument);
}

TEST_CASE("example2_form construction") {
    REQUIRE(example2_form(1, 4, iv({1})) == parse_form("4*x1*x2^3 - x1^4", 2));
    REQUIRE(example2_form(2, 5, iv({1, 1})) ==
            parse_form("5*x1*x2^4 - x1^5 + 5*x3*x4^4 - x3^5", 4));
    CHECK_THROWS_AS(example2_form(1, 3, iv({1})), std::invalid_argument);
    CHECK_THROWS_AS(example2_form(0, 4, {}), std::invalid_argument);
    CHECK_THROWS_AS(example2_form(1, 4, iv({0})), std::invalid_argument);
}

TEST_CASE("block Hessian structure") {
    auto f = example1_form(2, 1, 2, iv({1, -2}), iv({3}));
    // variables in different 2x2 (or pure-power) blocks never interact
    std::vector<int> block = {0, 0, 1, 1, 2};
    for (int a = 1; a <= 5; ++a)
        for (int b = 1; b <= 5; ++b)
            if (block[a - 1] != block[b - 1]) REQUIRE_FALSE(hessian_entry(f, a, b));

    auto g = example2_form(2, 4, iv({1, 2}));
    std::vector<int> gb = {0, 0, 1, 1};
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; b <= 4; ++b)
            if (gb[a - 1] != gb[b - 1]) REQUIRE_FALSE(hessian_entry(g, a, b));
}

TEST_CASE("family 2 block rank table") {
    auto f = example2_form(1, 4, iv({1}));
    REQUIRE(hessian_rank_at(f, {Int(0), Int(0)}) == 0);
    REQUIRE(hessian_rank_at(f, {Int(1), Int(0)}) == 1);
    REQUIRE(hessian_rank_at(f, {Int(5), Int(0)}) == 1);
    // generic points have full block rank
    REQUIRE(hessian_rank_at(f, {Int(1), Int(1)}) == 2);
    REQUIRE(hessian_rank_at(f, {Int(0), Int(1)}) == 2);
}

TEST_CASE("verify_example") {
    auto r1 = verify_example(example1_form(1, 1, 2, iv({1}), iv({1})), 0, 1);
    REQUIRE(r1.h_ok);
    REQUIRE(r1.dim_ok);
    REQUIRE(r1.agreement);
    REQUIRE(r1.pass);

    // quadratic sanity: corank 1 and a line of singular points
    auto rq = verify_example(parse_form("x1^2", 2), 1, 1);
    REQUIRE(rq.pass);
    REQUIRE(rq.hess.method == "exact-quadratic");

    // family 2 at (m,d) = (1,4): the invariant is 0, but its gradient only
    // vanishes at the origin, so the singular locus is a point, not a line
    auto r2 = verify_example(example2_form(1, 4, iv({1})), 0, 1);
    REQUIRE(r2.h_ok);
    REQUIRE(r2.vstar.dim);
    REQUIRE(*r2.vstar.dim == 0);
    REQUIRE_FALSE(r2.dim_ok);
    REQUIRE_FALSE(r2.pass);

    // against the corrected expectation it passes cleanly
    auto r2c = verify_example(example2_form(1, 4, iv({1})), 0, 0);
    REQUIRE(r2c.pass);
}
