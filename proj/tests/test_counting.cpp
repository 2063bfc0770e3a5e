#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <hessforms/counting.hpp>

using namespace hessforms;

namespace {

const char* kSenary = "x1^2 + x2^2 + x3^2 - x4^2 - x5^2 - x6^2";

}  // namespace

TEST_CASE("count_zeros_box") {
    auto prod = make_system({parse_form("x1*x2", 2)});
    REQUIRE(count_zeros_box(prod, 2.0, Box::full(2)) == 9);

    auto def = make_system({parse_form("x1^2 + x2^2", 2)});
    for (double P : {1.0, 3.0, 7.5}) REQUIRE(count_zeros_box(def, P, Box::full(2)) == 1);

    // nested boxes are monotone
    Box half;
    half.iv = {{Rat(-1, 2), Rat(1, 2)}, {Rat(-1, 2), Rat(1, 2)}};
    REQUIRE(count_zeros_box(prod, 4.0, half) <= count_zeros_box(prod, 4.0, Box::full(2)));

    CHECK_THROWS_AS(count_zeros_box(prod, 1e6, Box::full(2)), budget_error);
}

TEST_CASE("count_zeros_split equals count_zeros_box") {
    auto diff = parse_form("x1^2 - x2^2", 2);
    REQUIRE(count_zeros_split(diff, {0}, {1}, 10.0) ==
            count_zeros_box(make_system({diff}), 10.0, Box::full(2)));

    auto sen = parse_form(kSenary, 6);
    REQUIRE(count_zeros_split(sen, {0, 1, 2}, {3, 4, 5}, 8.0) ==
            count_zeros_box(make_system({sen}), 8.0, Box::full(6)));

    // definite form: the histograms only meet at value 0
    auto def = parse_form("x1^2 + x2^2", 2);
    REQUIRE(count_zeros_split(def, {0}, {1}, 9.0) == 1);

    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int iter = 0; iter < 20; ++iter) {
        // random form supported on {x1,x2} plus {x3}, always splittable
        std::map<Exponents, Int> acc;
        acc[{2u, 0u, 0u}] += coef(rng);
        acc[{1u, 1u, 0u}] += coef(rng);
        acc[{0u, 2u, 0u}] += coef(rng);
        acc[{0u, 0u, 2u}] += coef(rng);
        auto mf = detail::collect_form(3, std::move(acc));
        if (!mf) continue;
        double P = 2.0 + static_cast<double>(rng() % 4);
        REQUIRE(count_zeros_split(*mf, {0, 1}, {2}, P) ==
                count_zeros_box(make_system({*mf}), P, Box::full(3)));
    }
}

TEST_CASE("count_zeros_split validation") {
    auto f = parse_form("x1*x2", 2);
    CHECK_THROWS_AS(count_zeros_split(f, {0}, {1}, 4.0), std::invalid_argument);  // crossing term
    auto g = parse_form("x1^2 - x2^2", 2);
    CHECK_THROWS_AS(count_zeros_split(g, {0, 1}, {1}, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(count_zeros_split(g, {0}, {}, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(count_zeros_split(g, {0}, {2}, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(count_zeros_split(parse_form(kSenary, 6), {0, 1, 2}, {3, 4, 5}, 1e5),
                    budget_error);
}

TEST_CASE("auto_split") {
    auto d = auto_split(parse_form("x1^2 - x2^2", 2));
    REQUIRE(d);
    REQUIRE(d->first.size() + d->second.size() == 2);

    REQUIRE_FALSE(auto_split(parse_form("x1*x2", 2)));

    auto s = auto_split(parse_form(kSenary, 6));
    REQUIRE(s);
    REQUIRE(s->first.size() == 3);
    REQUIRE(s->second.size() == 3);

    // unused variables are still distributed
    auto u = auto_split(parse_form("x1^2", 2));
    REQUIRE(u);
    REQUIRE(u->first.size() == 1);
}

TEST_CASE("fit_leading_term") {
    auto sen = make_system({parse_form(kSenary, 6)});
    auto fit = fit_leading_term(sen, {8, 12, 16, 24, 32}, Box::full(6), true);
    REQUIRE_FALSE(fit.degenerate);
    REQUIRE(std::abs(fit.fitted_exponent - 4.0) < 0.25);
    REQUIRE(fit.c_fit > 0);

    auto pq = make_system({parse_form("x1*x2 - x3*x4", 4)});
    auto f2 = fit_leading_term(pq, {16, 24, 32, 48, 64}, Box::full(4), true);
    REQUIRE(std::abs(f2.fitted_exponent - 2.0) < 0.3);

    auto def = make_system({parse_form("x1^2 + x2^2", 2)});
    auto fd = fit_leading_term(def, {4, 5, 6, 7}, Box::full(2));
    REQUIRE(fd.degenerate);
    REQUIRE(fd.fitted_exponent == 0.0);

    CHECK_THROWS_AS(fit_leading_term(def, {4, 5, 6}, Box::full(2)), std::invalid_argument);
}

TEST_CASE("truncated_singular_series") {
    auto sen = make_system({parse_form(kSenary, 6)});
    auto s1 = truncated_singular_series(sen, 1);
    REQUIRE(s1.value == 1.0);

    // q = 2 complete sum vanishes: (1 + e(1/2))^6 = 0
    auto s2 = truncated_singular_series(sen, 2);
    REQUIRE(s2.value == Catch::Approx(1.0).margin(1e-12));

    // single square: q = 4 contributes (2+2i) + (2-2i) scaled by 1/4
    auto sq = make_system({parse_form("x1^2", 1)});
    auto s4 = truncated_singular_series(sq, 4);
    REQUIRE(s4.partials[1] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s4.partials[2] == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(s4.value == Catch::Approx(2.0).margin(1e-12));

    auto s50 = truncated_singular_series(sen, 50);
    REQUIRE(s50.stable);
    REQUIRE(s50.value > 0);
    REQUIRE(s50.partials.size() == 50);

    CHECK_THROWS_AS(truncated_singular_series(sen, 0), std::invalid_argument);
    CHECK_THROWS_AS(truncated_singular_series(sen, 10000, 1e5), budget_error);
}

TEST_CASE("singular_integral") {
    // definite quadratic: window volume is pi*eps exactly, so J = pi/2
    auto def = make_system({parse_form("x1^2 + x2^2", 2)});
    auto jd = singular_integral(def, Box::full(2), {0.08}, 400000);
    REQUIRE(jd.value == Catch::Approx(std::numbers::pi / 2).margin(0.05));
    REQUIRE(jd.std_error > 0);

    // grid oracle for the hyperbola window at fixed eps
    auto hyp = make_system({parse_form("x1^2 - x2^2", 2)});
    const double eps = 0.1;
    long grid = 1500, inside = 0;
    for (long i = 0; i < grid; ++i) {
        for (long j = 0; j < grid; ++j) {
            double x = -1.0 + (2.0 * i + 1.0) / grid;
            double y = -1.0 + (2.0 * j + 1.0) / grid;
            if (std::abs(x * x - y * y) < eps) ++inside;
        }
    }
    double oracle = 4.0 * static_cast<double>(inside) / (static_cast<double>(grid) * grid) / (2 * eps);
    auto jh = singular_integral(hyp, Box::full(2), {eps}, 400000);
    REQUIRE(std::abs(jh.value - oracle) / oracle < 0.02);

    // determinism under a fixed seed
    auto ja = singular_integral(hyp, Box::full(2), {0.2, 0.1, 0.05}, 50000);
    auto jb = singular_integral(hyp, Box::full(2), {0.2, 0.1, 0.05}, 50000);
    REQUIRE(ja.value == jb.value);
    REQUIRE(ja.per_eps == jb.per_eps);

    CHECK_THROWS_AS(singular_integral(def, Box::full(2), {}), std::invalid_argument);
    CHECK_THROWS_AS(singular_integral(def, Box::full(2), {-0.1}), std::invalid_argument);
}
