#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <hessforms/form.hpp>

using namespace hessforms;

namespace {

HomogeneousForm random_form(std::mt19937_64& rng, int n, int d) {
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_int_distribution<int> var(0, n - 1);
    std::map<Exponents, Int> acc;
    int nterms = 1 + static_cast<int>(rng() % 5);
    for (int t = 0; t < nterms; ++t) {
        Exponents e(n, 0);
        for (int k = 0; k < d; ++k) e[var(rng)] += 1;
        acc[e] += coef(rng);
    }
    auto f = detail::collect_form(n, std::move(acc));
    if (!f) {
        Exponents e(n, 0);
        e[0] = d;
        return HomogeneousForm{n, d, {{e, Int(1)}}};
    }
    return *f;
}

std::vector<Int> random_point(std::mt19937_64& rng, int n, int lim) {
    std::uniform_int_distribution<int> c(-lim, lim);
    std::vector<Int> x(n);
    for (auto& v : x) v = c(rng);
    return x;
}

}  // namespace

TEST_CASE("parse_form basics") {
    auto f = parse_form("x1^2*x2 - x3^3", 3);
    REQUIRE(f.n == 3);
    REQUIRE(f.d == 3);
    REQUIRE(f.terms.size() == 2);
    REQUIRE(f.terms.at({2, 1, 0}) == 1);
    REQUIRE(f.terms.at({0, 0, 3}) == -1);

    auto g = parse_form("3*x1^2*x2 - x3^3", 3);
    REQUIRE(g.terms.at({2, 1, 0}) == 3);
    REQUIRE(to_string(g) == "3*x1^2*x2 - x3^3");
    REQUIRE(parse_form(to_string(g), 3) == g);

    CHECK_THROWS_AS(parse_form("x1*x2 - x1*x2", 2), parse_error);
    CHECK_THROWS_AS(parse_form("x1^2 + x2", 2), parse_error);
    CHECK_THROWS_AS(parse_form("x1^2 + x3^2", 2), parse_error);
    CHECK_THROWS_AS(parse_form("x1", 1), parse_error);
    CHECK_THROWS_AS(parse_form("", 2), parse_error);
    CHECK_THROWS_AS(parse_form("7", 2), parse_error);

    // whitespace and implicit '*' after the coefficient
    auto h = parse_form(" -2 x1 ^ 2 + x2^2 ", 2);
    REQUIRE(h.terms.at({2, 0}) == -2);
    REQUIRE(h.terms.at({0, 2}) == 1);
}

TEST_CASE("parse rejects degree < 2") {
    CHECK_THROWS_AS(parse_form("x1 + x2", 2), parse_error);
}

TEST_CASE("evaluate") {
    auto f = parse_form("x1^2*x2", 2);
    REQUIRE(evaluate(f, {Int(3), Int(2)}) == 18);
    REQUIRE(evaluate(f, {Int(0), Int(0)}) == 0);
    auto g = parse_form("x1^2*x2^2 + x3^4", 3);
    REQUIRE(evaluate(g, {Int(1), Int(1), Int(1)}) == 2);
    CHECK_THROWS_AS(evaluate(f, {Int(1)}), std::invalid_argument);
}

TEST_CASE("partial derivatives") {
    auto f = parse_form("x1^2*x2", 3);
    auto d1 = partial(f, 1);
    REQUIRE(d1);
    REQUIRE(d1->terms.at({1, 1, 0}) == 2);
    auto d3 = partial(f, 3);
    REQUIRE_FALSE(d3);
    for (int d = 2; d <= 6; ++d) {
        auto p = parse_form("x1^" + std::to_string(d), 1);
        auto dp = partial(p, 1);
        REQUIRE(dp);
        REQUIRE(dp->terms.at({static_cast<unsigned>(d - 1)}) == d);
    }
    CHECK_THROWS_AS(partial(f, 0), std::invalid_argument);
}

TEST_CASE("hessian_entry") {
    auto f = parse_form("x1*x2", 2);
    auto h = hessian_entry(f, 1, 2);
    REQUIRE(h);
    REQUIRE(h->d == 0);
    REQUIRE(h->terms.at({0, 0}) == 1);

    auto g = parse_form("x1^2*x2^2", 2);
    auto h11 = hessian_entry(g, 1, 1);
    REQUIRE(h11);
    REQUIRE(h11->terms.at({0, 2}) == 2);

    // off-diagonal block entry of the x1^d x2^d family, d = 3
    auto b = parse_form("x1^3*x2^3", 2);
    auto h12 = hessian_entry(b, 1, 2);
    REQUIRE(h12);
    REQUIRE(h12->terms.at({2, 2}) == 9);  // d^2 x1^(d-1) x2^(d-1)
}

TEST_CASE("symmetric_coeff") {
    auto f = parse_form("x1*x2", 2);
    REQUIRE(symmetric_coeff(f, {1, 2}) == Rat(1, 2));
    auto g = parse_form("x1^2", 2);
    REQUIRE(symmetric_coeff(g, {1, 1}) == Rat(1));
    auto h = parse_form("x1^2*x2", 2);
    REQUIRE(symmetric_coeff(h, {1, 1, 2}) == Rat(1, 3));
    REQUIRE(symmetric_coeff(h, {1, 2, 1}) == Rat(1, 3));
    // d! * G_j is always an integer
    Rat r = symmetric_coeff(h, {1, 1, 2}) * Rat(factorial(3));
    REQUIRE(r.get_den() == 1);
}

TEST_CASE("gamma_eval small cases") {
    auto f = parse_form("x1*x2", 2);
    REQUIRE(gamma_eval(f, {unit_vector(2, 1), unit_vector(2, 2)}) == 1);
    REQUIRE(gamma_via_polarization(f, {unit_vector(2, 1), unit_vector(2, 2)}) == 1);

    auto g = parse_form("x1^2", 1);
    REQUIRE(gamma_via_polarization(g, {unit_vector(1, 1), unit_vector(1, 1)}) == 2);

    auto c = parse_form("x1^3", 1);
    REQUIRE(gamma_eval(c, {{Int(2)}, {Int(3)}, {Int(1)}}) == 36);  // 3! * x*y*z
}

TEST_CASE("gamma properties on random forms") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 60; ++iter) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 2 + static_cast<int>(rng() % 3);
        auto f = random_form(rng, n, d);
        std::vector<std::vector<Int>> xs;
        for (int i = 0; i < d; ++i) xs.push_back(random_point(rng, n, 4));

        Int g = gamma_eval(f, xs);
        // oracle equality
        REQUIRE(g == gamma_via_polarization(f, xs));
        // symmetry under a random transposition
        auto ys = xs;
        std::swap(ys[rng() % d], ys[rng() % d]);
        REQUIRE(gamma_eval(f, ys) == g);
        // diagonal law
        std::vector<std::vector<Int>> diag(d, xs[0]);
        REQUIRE(gamma_eval(f, diag) == factorial(d) * evaluate(f, xs[0]));
        // linearity in slot 0
        auto u = random_point(rng, n, 4);
        auto zs = xs;
        for (int v = 0; v < n; ++v) zs[0][v] += u[v];
        auto us = xs;
        us[0] = u;
        REQUIRE(gamma_eval(f, zs) == g + gamma_eval(f, us));
    }
}

TEST_CASE("hessian symmetry and second-derivative identity") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 40; ++iter) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 2 + static_cast<int>(rng() % 3);
        auto f = random_form(rng, n, d);
        auto x = random_point(rng, n, 5);
        for (int a = 1; a <= n; ++a) {
            for (int b = 1; b <= n; ++b) {
                auto hab = hessian_entry(f, a, b);
                auto hba = hessian_entry(f, b, a);
                REQUIRE(hab == hba);
                Int hval = 0;
                if (hab) hval = evaluate(*hab, x);
                std::vector<std::vector<Int>> xs(d - 2, x);
                xs.push_back(unit_vector(n, a));
                xs.push_back(unit_vector(n, b));
                // d(d-1) * Gamma(x,...,x,e_a,e_b) = d! * H_ab(x)
                REQUIRE(Int(d) * Int(d - 1) * gamma_eval(f, xs) == factorial(d) * hval);
            }
        }
    }
}

TEST_CASE("pencil_combine") {
    auto f = parse_form("x1^2", 2);
    auto g = parse_form("x2^2", 2);
    auto s = make_system({f, g});
    auto p = pencil_combine(s, {Int(2), Int(3)});
    REQUIRE(p);
    REQUIRE(*p == parse_form("2*x1^2 + 3*x2^2", 2));

    auto s2 = make_system({f, f});
    REQUIRE_FALSE(pencil_combine(s2, {Int(1), Int(-1)}));

    auto s1 = make_system({f});
    auto q = pencil_combine(s1, {Int(1)});
    REQUIRE(q);
    REQUIRE(*q == f);

    CHECK_THROWS_AS(pencil_combine(s, {Int(1)}), std::invalid_argument);
}
