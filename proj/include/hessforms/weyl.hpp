#ifndef HESSFORMS_WEYL_HPP
#define HESSFORMS_WEYL_HPP

#include <cmath>

#include <hessforms/strata.hpp>

namespace hessforms {

inline constexpr double kDefaultWeylBudget = 1e7;

/*
 * Count of (d-1)-tuples (x_1,...,x_{d-1}) in [-B,B]^n each, solving the
 * multilinear system Gamma_F(x_1,...,x_{d-1},e_j) = 0 for j = 1..n.
 * by_rank[r] = number of outer (d-2)-tuples whose Gamma matrix has rank r
 * (stratified method only; for d = 2 the single empty outer tuple).
 */
struct WeylCountReport {
    long B = 0;
    Int count = 0;
    std::vector<Int> by_rank;
};

namespace detail {

inline void check_tuple_budget(int n, int d, long B, int slots, double budget) {
    if (B < 0) throw std::invalid_argument("B must be >= 0");
    if (d < 2) throw std::invalid_argument("degree must be >= 2");
    double tuples = std::pow(2.0 * static_cast<double>(B) + 1.0, static_cast<double>(n) * slots);
    if (tuples > budget)
        throw budget_error("tuple enumeration budget exceeded: (2B+1)^" + std::to_string(n * slots));
}

// n x n matrix with entry (j,k) = Gamma_F(outer..., e_k, e_j)
inline IntegerMatrix gamma_matrix(const HomogeneousForm& f, std::vector<std::vector<Int>>& slots) {
    const int n = f.n;
    IntegerMatrix m(n, n);
    for (int k = 1; k <= n; ++k) {
        slots[f.d - 2] = unit_vector(n, k);
        for (int j = k; j <= n; ++j) {
            slots[f.d - 1] = unit_vector(n, j);
            Int v = gamma_eval(f, slots);
            m.at(j - 1, k - 1) = v;
            m.at(k - 1, j - 1) = v;  // Gamma is symmetric in its slots
        }
    }
    return m;
}

template <typename Body>
void for_each_box_tuple(int n, int slots, long B, std::vector<std::vector<Int>>& xs, const Body& body) {
    const long total_vars = static_cast<long>(n) * slots;
    std::vector<long> odo(total_vars, -B);
    while (true) {
        for (int s = 0; s < slots; ++s)
            for (int v = 0; v < n; ++v) xs[s][v] = odo[static_cast<size_t>(s) * n + v];
        body();
        long k = 0;
        while (k < total_vars && odo[k] == B) odo[k++] = -B;
        if (k == total_vars) break;
        ++odo[k];
    }
}

}  // namespace detail

// direct enumeration of all (d-1)-tuples; oracle for the stratified count
inline Int gamma_zero_count_naive(const HomogeneousForm& f, long B,
                                  double budget = kDefaultWeylBudget) {
    detail::check_tuple_budget(f.n, f.d, B, f.d - 1, budget);
    std::vector<std::vector<Int>> xs(f.d, std::vector<Int>(f.n, 0));
    Int count = 0;
    detail::for_each_box_tuple(f.n, f.d - 1, B, xs, [&] {
        for (int j = 1; j <= f.n; ++j) {
            xs[f.d - 1] = unit_vector(f.n, j);
            if (gamma_eval(f, xs) != 0) return;
        }
        count += 1;
    });
    return count;
}

/*
 * Enumerates only the outer (d-2)-tuple; the innermost vector then ranges
 * over the kernel lattice of the Gamma matrix, counted in closed form.
 * Reduces the work from (2B+1)^{(d-1)n} points to (2B+1)^{(d-2)n} ranks.
 */
inline WeylCountReport gamma_zero_count_stratified(const HomogeneousForm& f, long B,
                                                   double budget = kDefaultWeylBudget) {
    WeylCountReport rep;
    rep.B = B;
    rep.by_rank.assign(f.n + 1, 0);
    if (f.d == 2) {
        if (B < 0) throw std::invalid_argument("B must be >= 0");
        auto h = constant_hessian(f);
        rep.count = count_kernel_points_in_box(h, B);
        rep.by_rank[rank_rational(h)] = 1;
        return rep;
    }
    detail::check_tuple_budget(f.n, f.d, B, f.d - 2, budget);
    std::vector<std::vector<Int>> xs(f.d, std::vector<Int>(f.n, 0));
    detail::for_each_box_tuple(f.n, f.d - 2, B, xs, [&] {
        auto m = detail::gamma_matrix(f, xs);
        rep.by_rank[rank_rational(m)] += 1;
        rep.count += count_kernel_points_in_box(m, B);
    });
    return rep;
}

// least-squares slope of log N(B) against log(2B+1); needs >= 2 distinct B
inline double fit_weyl_exponent(const std::vector<WeylCountReport>& pts) {
    std::vector<std::pair<double, double>> xy;
    for (const auto& r : pts) {
        if (r.count <= 0) continue;
        xy.emplace_back(std::log(2.0 * static_cast<double>(r.B) + 1.0), std::log(r.count.get_d()));
    }
    if (xy.size() < 2) throw std::invalid_argument("need >= 2 positive counts");
    double mx = 0, my = 0;
    for (auto [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double num = 0, den = 0;
    for (auto [x, y] : xy) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if (den == 0) throw std::invalid_argument("need >= 2 distinct B values");
    return num / den;
}

}  // namespace hessforms

#endif
