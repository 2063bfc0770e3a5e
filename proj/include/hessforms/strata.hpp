#ifndef HESSFORMS_STRATA_HPP
#define HESSFORMS_STRATA_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include <hessforms/matrix.hpp>

namespace hessforms {

inline const std::vector<long> kDefaultPrimes = {101, 211, 401};
inline constexpr double kDefaultModpBudget = 4e9;

// Multi-prime finite-field point counts and the Lang-Weil dimension fit.
struct DimensionEstimate {
    std::vector<std::pair<long, Int>> counts;  // (p, N_p)
    std::optional<int> dim;                    // nullopt = Empty
    bool agreement = false;
};

struct HessianReport {
    int n = 0;
    int d = 0;
    std::string method;  // "exact-quadratic" | "modp-estimate"
    int h = 0;
    std::vector<DimensionEstimate> strata;  // index r = 0..n (modp method only)
    int quadratic_rank = -1;                // rank of the constant Hessian (d = 2 only)
};

struct PencilReport {
    int sigma = 0;
    std::vector<Int> attaining_c;
    int radius = 0;
    std::vector<long> primes;
};

inline IntegerMatrix hessian_matrix_at(const HomogeneousForm& f, const std::vector<Int>& x) {
    if (static_cast<int>(x.size()) != f.n) throw std::invalid_argument("point dimension mismatch");
    IntegerMatrix h(f.n, f.n);
    for (int a = 1; a <= f.n; ++a) {
        for (int b = a; b <= f.n; ++b) {
            auto e = hessian_entry(f, a, b);
            if (e) {
                Int v = evaluate(*e, x);
                h.at(a - 1, b - 1) = v;
                h.at(b - 1, a - 1) = v;
            }
        }
    }
    return h;
}

// Constant Hessian of a quadratic form.
inline IntegerMatrix constant_hessian(const HomogeneousForm& f) {
    if (f.d != 2) throw std::invalid_argument("constant_hessian requires d = 2");
    return hessian_matrix_at(f, std::vector<Int>(f.n, 0));
}

inline int hessian_rank_at(const HomogeneousForm& f, const std::vector<Int>& x) {
    return rank_rational(hessian_matrix_at(f, x));
}

/*
 * Connected components of the variable-interaction graph (variables linked
 * when they share a monomial, across all given forms).  The Hessian of a
 * form is block-diagonal across components, so mod-p rank distributions and
 * gradient-vanishing counts factor exactly over them.
 */
struct VariableBlocks {
    std::vector<std::vector<int>> blocks;  // 0-based variable ids, each sorted
    int unused = 0;                        // variables appearing in no monomial
};

inline VariableBlocks split_variables(const std::vector<const HomogeneousForm*>& forms, int n) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<char> used(n, 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto* f : forms) {
        for (const auto& [e, c] : f->terms) {
            int first = -1;
            for (int v = 0; v < n; ++v) {
                if (e[v] == 0) continue;
                used[v] = 1;
                if (first < 0)
                    first = v;
                else
                    parent[find(v)] = find(first);
            }
        }
    }
    std::map<int, std::vector<int>> groups;
    VariableBlocks vb;
    for (int v = 0; v < n; ++v) {
        if (!used[v]) {
            ++vb.unused;
            continue;
        }
        groups[find(v)].push_back(v);
    }
    for (auto& [root, vars] : groups) vb.blocks.push_back(std::move(vars));
    return vb;
}

// Sub-form on a variable block, re-indexed to local variables.
inline HomogeneousForm restrict_form(const HomogeneousForm& f, const std::vector<int>& block) {
    std::map<Exponents, Int> acc;
    for (const auto& [e, c] : f.terms) {
        bool inside = true;
        int deg_in = 0;
        Exponents le(block.size(), 0);
        for (size_t i = 0; i < block.size(); ++i) {
            le[i] = e[block[i]];
            deg_in += static_cast<int>(le[i]);
        }
        if (deg_in == 0) continue;
        if (deg_in != f.d) inside = false;
        if (!inside) throw std::logic_error("monomial crosses block boundary");
        acc[le] += c;
    }
    return HomogeneousForm{static_cast<int>(block.size()), f.d, std::move(acc)};
}

namespace detail {

// Rejects p when it divides d! or the content of some Hessian entry; such
// primes collapse rank loci mod p.
inline void check_prime_for_hessian(const HomogeneousForm& f, long p) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    Int dfac = factorial(static_cast<unsigned>(f.d));
    if (mpz_divisible_ui_p(dfac.get_mpz_t(), static_cast<unsigned long>(p)))
        throw std::invalid_argument("bad prime: p divides d!");
    for (int a = 1; a <= f.n; ++a) {
        for (int b = a; b <= f.n; ++b) {
            auto e = hessian_entry(f, a, b);
            if (!e) continue;
            Int content = 0;
            for (const auto& [ex, c] : e->terms) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
            if (mpz_divisible_ui_p(content.get_mpz_t(), static_cast<unsigned long>(p)))
                throw std::invalid_argument("bad prime: p divides a Hessian entry content");
        }
    }
}

struct ModpPoly {
    std::vector<std::pair<Exponents, long long>> terms;  // coefficients reduced to [0,p)
};

inline ModpPoly reduce_mod_p(const std::optional<HomogeneousForm>& f, long p) {
    ModpPoly out;
    if (!f) return out;
    for (const auto& [e, c] : f->terms) {
        Int r = c % p;
        long long v = (r.get_si() % p + p) % p;
        if (v != 0) out.terms.emplace_back(e, v);
    }
    return out;
}

inline long long eval_modp(const ModpPoly& poly, const std::vector<std::vector<long long>>& powtab, long p) {
    long long s = 0;
    for (const auto& [e, c] : poly.terms) {
        long long prod = c;
        for (size_t v = 0; v < e.size(); ++v) {
            if (e[v]) prod = (__int128)prod * powtab[v][e[v]] % p;
        }
        s += prod;
        if (s >= (1LL << 62)) s %= p;
    }
    return s % p;
}

// rank-r counts over F_p^{n_b} for the Hessian of a block form
inline std::vector<Int> block_rank_distribution(const HomogeneousForm& fb, long p, double budget) {
    const int nb = fb.n;
    std::vector<Int> dist(nb + 1, 0);
    if (fb.d == 2) {
        int r = rank_mod_p(constant_hessian(fb), p);
        dist[r] = pow_int(Int(p), static_cast<unsigned>(nb));
        return dist;
    }
    if (std::pow(static_cast<double>(p), nb) > budget)
        throw budget_error("stratum enumeration budget exceeded: p^" + std::to_string(nb));
    const int deg = fb.d - 2;
    std::vector<std::vector<ModpPoly>> ent(nb, std::vector<ModpPoly>(nb));
    for (int a = 1; a <= nb; ++a)
        for (int b = a; b <= nb; ++b) ent[a - 1][b - 1] = reduce_mod_p(hessian_entry(fb, a, b), p);
    std::vector<std::vector<long long>> powtab(nb, std::vector<long long>(deg + 1, 1));
    std::vector<long long> x(nb, 0);
    std::vector<long long> h(static_cast<size_t>(nb) * nb);
    while (true) {
        for (int v = 0; v < nb; ++v)
            for (int e = 1; e <= deg; ++e) powtab[v][e] = (__int128)powtab[v][e - 1] * x[v] % p;
        for (int a = 0; a < nb; ++a)
            for (int b = a; b < nb; ++b) {
                long long val = eval_modp(ent[a][b], powtab, p);
                h[static_cast<size_t>(a) * nb + b] = val;
                h[static_cast<size_t>(b) * nb + a] = val;
            }
        auto work = h;
        dist[rank_mod_p_ll(work, nb, nb, p)] += 1;
        int k = 0;
        while (k < nb && x[k] == p - 1) x[k++] = 0;
        if (k == nb) break;
        ++x[k];
    }
    return dist;
}

inline std::vector<Int> convolve_dist(const std::vector<Int>& a, const std::vector<Int>& b) {
    std::vector<Int> out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

}  // namespace detail

/*
 * c[r] = #{x in F_p^n : rank H_F(x) = r}, computed per variable block and
 * convolved (the Hessian is block-diagonal, ranks add).  Exactly equal to
 * full enumeration of F_p^n.
 */
inline std::vector<Int> hessian_rank_distribution_mod_p(const HomogeneousForm& f, long p,
                                                        double budget = kDefaultModpBudget) {
    detail::check_prime_for_hessian(f, p);
    auto vb = split_variables({&f}, f.n);
    std::vector<Int> dist = {pow_int(Int(p), static_cast<unsigned>(vb.unused))};
    for (const auto& block : vb.blocks) {
        auto fb = restrict_form(f, block);
        dist = detail::convolve_dist(dist, detail::block_rank_distribution(fb, p, budget));
    }
    dist.resize(f.n + 1, 0);
    return dist;
}

inline Int stratum_count_mod_p(const HomogeneousForm& f, int r, long p,
                               double budget = kDefaultModpBudget) {
    if (r < 0 || r > f.n) throw std::invalid_argument("rank bound out of range");
    auto dist = hessian_rank_distribution_mod_p(f, p, budget);
    Int s = 0;
    for (int k = 0; k <= r; ++k) s += dist[k];
    return s;
}

namespace detail {

/*
 * Lang-Weil fit: dim ~ log_p N_p.  A prime reporting only forced points
 * (the origin when d > 2, nothing for a constant-Hessian stratum) casts an
 * "empty" vote; the stratum is Empty when empty votes have a strict
 * majority, else the dimension is the median over the remaining primes.
 */
inline DimensionEstimate estimate_from_counts(std::vector<std::pair<long, Int>> counts, Int forced,
                                              int ambient) {
    DimensionEstimate est;
    est.counts = std::move(counts);
    std::vector<int> dims;
    int empty_votes = 0;
    for (const auto& [p, np] : est.counts) {
        if (np < forced) throw std::logic_error("count below forced-point floor");
        if (np == 0) {
            ++empty_votes;
            continue;
        }
        if (np == 1) {
            dims.push_back(0);
            continue;
        }
        double dval = std::log(np.get_d()) / std::log(static_cast<double>(p));
        int r = static_cast<int>(std::lround(dval));
        r = std::clamp(r, 0, ambient);
        dims.push_back(r);
    }
    if (empty_votes > static_cast<int>(dims.size())) {
        est.dim = std::nullopt;
        est.agreement = dims.empty();
        return est;
    }
    std::sort(dims.begin(), dims.end());
    est.dim = dims[dims.size() / 2];
    est.agreement = empty_votes == 0 && std::all_of(dims.begin(), dims.end(),
                                                    [&](int v) { return v == dims.front(); });
    return est;
}

}  // namespace detail

inline DimensionEstimate estimate_stratum_dim(const HomogeneousForm& f, int r,
                                              const std::vector<long>& primes,
                                              double budget = kDefaultModpBudget) {
    if (primes.size() < 2) throw std::invalid_argument("need at least 2 primes");
    std::vector<std::pair<long, Int>> counts;
    for (long p : primes) counts.emplace_back(p, stratum_count_mod_p(f, r, p, budget));
    Int forced = f.d > 2 ? 1 : 0;
    return detail::estimate_from_counts(std::move(counts), forced, f.n);
}

// Forces the d>2 stratified pipeline regardless of degree (for d = 2 the
// Hessian is constant and every stratum count is 0 or p^n).
inline HessianReport hessian_invariant_via_strata(const HomogeneousForm& f,
                                                  const std::vector<long>& primes,
                                                  double budget = kDefaultModpBudget) {
    if (primes.size() < 2) throw std::invalid_argument("need at least 2 primes");
    HessianReport rep;
    rep.n = f.n;
    rep.d = f.d;
    rep.method = "modp-estimate";
    std::vector<std::vector<Int>> dists;
    for (long p : primes) dists.push_back(hessian_rank_distribution_mod_p(f, p, budget));
    Int forced = f.d > 2 ? 1 : 0;
    int best = 0;
    for (int r = 0; r <= f.n; ++r) {
        std::vector<std::pair<long, Int>> counts;
        for (size_t i = 0; i < primes.size(); ++i) {
            Int s = 0;
            for (int k = 0; k <= r; ++k) s += dists[i][k];
            counts.emplace_back(primes[i], s);
        }
        auto est = detail::estimate_from_counts(std::move(counts), forced, f.n);
        if (est.dim) best = std::max(best, *est.dim - r);
        rep.strata.push_back(std::move(est));
    }
    rep.h = best;
    return rep;
}

// H_G of eq-style definition: Hessian corank for d = 2, stratified
// dimension excess for d > 2.
inline HessianReport hessian_invariant(const HomogeneousForm& f, const std::vector<long>& primes,
                                       double budget = kDefaultModpBudget) {
    if (f.d == 2) {
        HessianReport rep;
        rep.n = f.n;
        rep.d = 2;
        rep.method = "exact-quadratic";
        rep.quadratic_rank = rank_rational(constant_hessian(f));
        rep.h = f.n - rep.quadratic_rank;
        return rep;
    }
    return hessian_invariant_via_strata(f, primes, budget);
}

namespace detail {

// #{x_b in F_p^{n_b} : grad F_b(x_b) = 0} for one variable block
inline Int block_gradient_zero_count(const HomogeneousForm& fb, long p, double budget) {
    const int nb = fb.n;
    if (fb.d == 2) {
        int r = rank_mod_p(constant_hessian(fb), p);
        return pow_int(Int(p), static_cast<unsigned>(nb - r));
    }
    if (std::pow(static_cast<double>(p), nb) > budget)
        throw budget_error("singular-locus enumeration budget exceeded: p^" + std::to_string(nb));
    const int deg = fb.d - 1;
    std::vector<ModpPoly> grad(nb);
    for (int i = 1; i <= nb; ++i) grad[i - 1] = reduce_mod_p(partial(fb, i), p);
    std::vector<std::vector<long long>> powtab(nb, std::vector<long long>(deg + 1, 1));
    std::vector<long long> x(nb, 0);
    Int count = 0;
    while (true) {
        for (int v = 0; v < nb; ++v)
            for (int e = 1; e <= deg; ++e) powtab[v][e] = (__int128)powtab[v][e - 1] * x[v] % p;
        bool zero = true;
        for (int i = 0; i < nb && zero; ++i)
            if (eval_modp(grad[i], powtab, p) != 0) zero = false;
        if (zero) count += 1;
        int k = 0;
        while (k < nb && x[k] == p - 1) x[k++] = 0;
        if (k == nb) break;
        ++x[k];
    }
    return count;
}

inline Int singular_count_mod_p(const FormSystem& s, long p, double budget) {
    const int n = s.n(), R = s.R();
    if (!is_prime(p)) throw std::invalid_argument("p must be prime");
    if (R == 1) {
        const auto& f = s.forms[0];
        auto vb = split_variables({&f}, n);
        Int count = pow_int(Int(p), static_cast<unsigned>(vb.unused));
        for (const auto& block : vb.blocks)
            count *= block_gradient_zero_count(restrict_form(f, block), p, budget);
        return count;
    }
    if (std::pow(static_cast<double>(p), n) > budget)
        throw budget_error("singular-locus enumeration budget exceeded: p^" + std::to_string(n));
    const int deg = s.d() - 1;
    std::vector<std::vector<ModpPoly>> jac(R, std::vector<ModpPoly>(n));
    for (int l = 0; l < R; ++l)
        for (int i = 1; i <= n; ++i) jac[l][i - 1] = reduce_mod_p(partial(s.forms[l], i), p);
    std::vector<std::vector<long long>> powtab(n, std::vector<long long>(deg + 1, 1));
    std::vector<long long> x(n, 0);
    std::vector<long long> m(static_cast<size_t>(R) * n);
    Int count = 0;
    while (true) {
        for (int v = 0; v < n; ++v)
            for (int e = 1; e <= deg; ++e) powtab[v][e] = (__int128)powtab[v][e - 1] * x[v] % p;
        for (int l = 0; l < R; ++l)
            for (int i = 0; i < n; ++i) m[static_cast<size_t>(l) * n + i] = eval_modp(jac[l][i], powtab, p);
        auto work = m;
        if (rank_mod_p_ll(work, R, n, p) < R) count += 1;
        int k = 0;
        while (k < n && x[k] == p - 1) x[k++] = 0;
        if (k == n) break;
        ++x[k];
    }
    return count;
}

}  // namespace detail

// dim V*_F: mod-p counts of {x : rank Jacobian < R}; for R = 1 the
// gradient-vanishing locus, factorized over variable blocks.
inline DimensionEstimate singular_locus_dim(const FormSystem& s, const std::vector<long>& primes,
                                            double budget = kDefaultModpBudget) {
    if (primes.size() < 2) throw std::invalid_argument("need at least 2 primes");
    std::vector<std::pair<long, Int>> counts;
    for (long p : primes) counts.emplace_back(p, detail::singular_count_mod_p(s, p, budget));
    return detail::estimate_from_counts(std::move(counts), Int(1), s.n());
}

// sigma = max over primitive |c|_inf <= radius (sign-deduplicated) of
// H_{c.F}; zero combinations are skipped.
inline PencilReport pencil_sigma(const FormSystem& s, const std::vector<long>& primes, int c_radius,
                                 double budget = kDefaultModpBudget) {
    if (c_radius < 1) throw std::invalid_argument("c_radius must be >= 1");
    const int R = s.R();
    PencilReport rep;
    rep.radius = c_radius;
    rep.primes = primes;
    rep.sigma = -1;
    std::vector<long> c(R, -c_radius);
    while (true) {
        bool allzero = std::all_of(c.begin(), c.end(), [](long v) { return v == 0; });
        if (!allzero) {
            long lead = 0;
            for (long v : c)
                if (v != 0) {
                    lead = v;
                    break;
                }
            long g = 0;
            for (long v : c) g = std::gcd(g, std::abs(v));
            if (lead > 0 && g == 1) {
                std::vector<Int> ci(c.begin(), c.end());
                auto comb = pencil_combine(s, ci);
                if (comb) {
                    auto h = hessian_invariant(*comb, primes, budget);
                    if (h.h > rep.sigma) {
                        rep.sigma = h.h;
                        rep.attaining_c = ci;
                    }
                }
            }
        }
        int k = 0;
        while (k < R && c[k] == c_radius) c[k++] = -c_radius;
        if (k == R) break;
        ++c[k];
    }
    if (rep.sigma < 0) throw std::invalid_argument("every pencil combination vanished");
    return rep;
}

}  // namespace hessforms

#endif
