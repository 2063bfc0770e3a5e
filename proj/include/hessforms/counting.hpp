#ifndef HESSFORMS_COUNTING_HPP
#define HESSFORMS_COUNTING_HPP

#include <random>

#include <hessforms/circle.hpp>

namespace hessforms {

// exact #{x in P*box : F_1(x) = ... = F_R(x) = 0} by enumeration
inline Int count_zeros_box(const FormSystem& s, double P, const Box& box,
                           double budget = kDefaultLatticeBudget) {
    const int n = s.n(), R = s.R();
    if (box.n() != n) throw std::invalid_argument("box dimension mismatch");
    auto range = detail::lattice_range(box, P);
    if (range.empty) return 0;
    if (range.points > budget) throw budget_error("lattice budget exceeded");

    Int maxabs = 0;
    for (int i = 0; i < n; ++i) maxabs = std::max({maxabs, Int(abs(range.lo[i])), Int(abs(range.hi[i]))});
    const Int ll_gate = Int(1) << 62;
    std::vector<bool> use_ll(R);
    for (int l = 0; l < R; ++l) use_ll[l] = form_value_bound(s.forms[l], maxabs) < ll_gate;

    std::vector<Int> x = range.lo;
    std::vector<long long> xll(n);
    Int count = 0;
    while (true) {
        for (int i = 0; i < n; ++i) xll[i] = x[i].get_si();
        bool zero = true;
        for (int l = 0; l < R && zero; ++l) {  // early rejection per form
            if (use_ll[l]) {
                if (evaluate_t<long long>(s.forms[l], xll) != 0) zero = false;
            } else if (evaluate(s.forms[l], x) != 0) {
                zero = false;
            }
        }
        if (zero) count += 1;
        int k = 0;
        while (k < n && x[k] == range.hi[k]) x[k] = range.lo[k], ++k;
        if (k == n) break;
        x[k] += 1;
    }
    return count;
}

namespace detail {

// value histogram of a sub-form over [-B,B]^{|block|}; empty block set of
// terms means the constant 0 on every point
inline std::map<Int, Int> value_histogram(const std::optional<HomogeneousForm>& g, int nb, long B) {
    std::map<Int, Int> hist;
    std::vector<Int> x(nb, -B);
    std::vector<long long> xll(nb);
    bool use_ll = false;
    if (g) use_ll = form_value_bound(*g, Int(B)) < (Int(1) << 62);
    while (true) {
        Int v = 0;
        if (g) {
            if (use_ll) {
                for (int i = 0; i < nb; ++i) xll[i] = x[i].get_si();
                v = static_cast<long>(evaluate_t<long long>(*g, xll));
            } else {
                v = evaluate(*g, x);
            }
        }
        hist[v] += 1;
        int k = 0;
        while (k < nb && x[k] == B) x[k] = -B, ++k;
        if (k == nb) break;
        x[k] += 1;
    }
    return hist;
}

}  // namespace detail

/*
 * Meet-in-the-middle count of F = 0 on [-floor(P), floor(P)]^n for a form
 * splitting as g(x_A) - h(x_B) over a caller-supplied variable partition:
 * match the value histograms of g and h.  Memory P^{max(|A|,|B|)} instead
 * of time P^n.
 */
inline Int count_zeros_split(const HomogeneousForm& f, const std::vector<int>& block_a,
                             const std::vector<int>& block_b, double P,
                             double budget = kDefaultLatticeBudget) {
    const int n = f.n;
    std::vector<int> owner(n, -1);
    for (int v : block_a) {
        if (v < 0 || v >= n || owner[v] != -1) throw std::invalid_argument("invalid split");
        owner[v] = 0;
    }
    for (int v : block_b) {
        if (v < 0 || v >= n || owner[v] != -1) throw std::invalid_argument("invalid split");
        owner[v] = 1;
    }
    if (std::count(owner.begin(), owner.end(), -1) > 0) throw std::invalid_argument("invalid split");
    if (block_a.empty() || block_b.empty()) throw std::invalid_argument("invalid split");

    std::map<Exponents, Int> ga, hb;
    for (const auto& [e, c] : f.terms) {
        bool in_a = true, in_b = true;
        for (int v = 0; v < n; ++v) {
            if (e[v] == 0) continue;
            (owner[v] == 0 ? in_b : in_a) = false;
        }
        if (in_a) {
            Exponents le(block_a.size(), 0);
            for (size_t i = 0; i < block_a.size(); ++i) le[i] = e[block_a[i]];
            ga[le] += c;
        } else if (in_b) {
            Exponents le(block_b.size(), 0);
            for (size_t i = 0; i < block_b.size(); ++i) le[i] = e[block_b[i]];
            hb[le] += -c;  // F = g - h
        } else {
            throw std::invalid_argument("invalid split: monomial crosses the blocks");
        }
    }
    if (P < 0 || !std::isfinite(P)) throw std::invalid_argument("P must be a nonnegative real");
    const long B = static_cast<long>(std::floor(P));
    const int half = std::max(block_a.size(), block_b.size());
    if (std::pow(2.0 * B + 1.0, half) > budget) throw budget_error("histogram budget exceeded");

    auto g = detail::collect_form(static_cast<int>(block_a.size()), std::move(ga));
    auto h = detail::collect_form(static_cast<int>(block_b.size()), std::move(hb));
    auto hist_a = detail::value_histogram(g, static_cast<int>(block_a.size()), B);
    auto hist_b = detail::value_histogram(h, static_cast<int>(block_b.size()), B);
    if (hist_b.size() < hist_a.size()) hist_a.swap(hist_b);
    Int count = 0;
    for (const auto& [v, ca] : hist_a) {
        auto it = hist_b.find(v);
        if (it != hist_b.end()) count += ca * it->second;
    }
    return count;
}

// variable partition into two halves, components kept whole and balanced
// greedily by size; nullopt when the form has a single inseparable block
inline std::optional<std::pair<std::vector<int>, std::vector<int>>> auto_split(
    const HomogeneousForm& f) {
    auto vb = split_variables({&f}, f.n);
    std::vector<std::vector<int>> units = vb.blocks;
    for (int v = 0; v < f.n; ++v) {
        bool used = false;
        for (const auto& b : vb.blocks) used = used || std::count(b.begin(), b.end(), v) > 0;
        if (!used) units.push_back({v});
    }
    if (units.size() < 2) return std::nullopt;
    std::stable_sort(units.begin(), units.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    std::vector<int> a, b;
    for (const auto& u : units) {
        auto& side = a.size() <= b.size() ? a : b;
        side.insert(side.end(), u.begin(), u.end());
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::make_pair(std::move(a), std::move(b));
}

struct CountFit {
    std::vector<double> Ps;
    std::vector<Int> counts;
    double fitted_exponent = 0;  // free least-squares slope of log N vs log P
    double c_fit = 0;            // constant with the exponent pinned to n - d R
    bool degenerate = false;
};

// N(P) across a P ladder plus the power-law fit against c P^{n - d R}
inline CountFit fit_leading_term(const FormSystem& s, const std::vector<double>& P_list,
                                 const Box& box, bool use_split = false,
                                 double budget = kDefaultLatticeBudget) {
    if (P_list.size() < 4) throw std::invalid_argument("need >= 4 P values");
    CountFit fit;
    std::optional<std::pair<std::vector<int>, std::vector<int>>> split;
    if (use_split) {
        if (s.R() != 1) throw std::invalid_argument("histogram counting needs R = 1");
        if (!box.symmetric() || box.iv != Box::full(s.n()).iv)
            throw std::invalid_argument("histogram counting needs the full box");
        split = auto_split(s.forms[0]);
        if (!split) throw std::invalid_argument("form does not split");
    }
    for (double P : P_list) {
        fit.Ps.push_back(P);
        fit.counts.push_back(split ? count_zeros_split(s.forms[0], split->first, split->second, P, budget)
                                   : count_zeros_box(s, P, box, budget));
    }
    const double pinned = s.n() - static_cast<double>(s.d()) * s.R();
    double mx = 0, my = 0, cgeo = 0;
    long pos = 0;
    std::vector<std::pair<double, double>> xy;
    for (size_t i = 0; i < fit.Ps.size(); ++i) {
        if (fit.counts[i] <= 0) continue;
        double lx = std::log(fit.Ps[i]), ly = std::log(fit.counts[i].get_d());
        xy.emplace_back(lx, ly);
        mx += lx;
        my += ly;
        cgeo += ly - pinned * lx;
        ++pos;
    }
    fit.degenerate = pos < 2;
    if (pos >= 1) fit.c_fit = std::exp(cgeo / static_cast<double>(pos));
    if (pos >= 2) {
        mx /= static_cast<double>(pos);
        my /= static_cast<double>(pos);
        double num = 0, den = 0;
        for (auto [x, y] : xy) {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        fit.fitted_exponent = den > 0 ? num / den : 0.0;
        if (den == 0) fit.degenerate = true;
    }
    Int cmin = fit.counts[0], cmax = fit.counts[0];
    for (const auto& c : fit.counts) {
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    if (cmin == cmax) {
        fit.degenerate = true;
        fit.fitted_exponent = 0;
    }
    return fit;
}

struct SeriesResult {
    double value = 0;
    std::vector<double> partials;  // partial sums through q = 1..Qmax
    bool stable = true;            // relative drift over the last 10 moduli <= 1%
};

/*
 * Truncated arithmetic density: sum over q <= Qmax of
 * q^{-nR} sum_{a mod q, gcd(a,q)=1} prod-free complete sum
 * sum_{x mod q} e((a.F)(x)/q), each complete sum factorized over variable
 * blocks and evaluated through an exact root-of-unity table.
 */
inline SeriesResult truncated_singular_series(const FormSystem& s, long Qmax,
                                              double budget = kDefaultLatticeBudget) {
    const int n = s.n(), R = s.R();
    if (Qmax < 1) throw std::invalid_argument("Qmax must be >= 1");
    std::vector<const HomogeneousForm*> fp;
    for (const auto& f : s.forms) fp.push_back(&f);
    auto vb = split_variables(fp, n);

    SeriesResult out;
    double total = 0;
    for (long q = 1; q <= Qmax; ++q) {
        double block_cost = 0;
        for (const auto& b : vb.blocks) block_cost += std::pow(q, static_cast<double>(b.size()));
        if (std::pow(q, static_cast<double>(R)) * std::max(block_cost, 1.0) > budget)
            throw budget_error("singular series budget exceeded at q = " + std::to_string(q));
        std::vector<std::complex<double>> roots(q);
        for (long r = 0; r < q; ++r) {
            double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
            roots[r] = {std::cos(ang), std::sin(ang)};
        }
        std::complex<double> qsum = 0;
        std::vector<long> a(R, 0);
        while (true) {
            long g = q;
            for (long ai : a) g = std::gcd(g, ai);
            if (g == 1) {
                // combined numerator form a.F reduced mod q, one block at a time
                std::complex<double> prod = std::pow(static_cast<double>(q), vb.unused);
                for (const auto& b : vb.blocks) {
                    std::map<Exponents, Int> acc;
                    for (int l = 0; l < R; ++l) {
                        if (a[l] == 0) continue;
                        auto rf = restrict_form(s.forms[l], b);
                        for (const auto& [e, c] : rf.terms) acc[e] += a[l] * c;
                    }
                    auto cf = hessforms::detail::collect_form(static_cast<int>(b.size()), std::move(acc));
                    std::complex<double> bs = 0;
                    std::vector<long> x(b.size(), 0);
                    while (true) {
                        long val = 0;
                        if (cf) {
                            Int v = 0;
                            for (const auto& [e, c] : cf->terms) {
                                Int p = c;
                                for (size_t i = 0; i < e.size(); ++i)
                                    for (unsigned k = 0; k < e[i]; ++k) p *= x[i];
                                v += p;
                            }
                            Int rem;
                            mpz_mod(rem.get_mpz_t(), v.get_mpz_t(), Int(q).get_mpz_t());
                            val = rem.get_si();
                        }
                        bs += roots[val];
                        size_t k = 0;
                        while (k < x.size() && x[k] == q - 1) x[k++] = 0;
                        if (k == x.size()) break;
                        ++x[k];
                    }
                    prod *= bs;
                }
                qsum += prod;
            }
            int k = 0;
            while (k < R && a[k] == q - 1) a[k++] = 0;
            if (k == R) break;
            ++a[k];
        }
        total += qsum.real() * std::pow(static_cast<double>(q), -static_cast<double>(n) * R);
        out.partials.push_back(total);
    }
    out.value = total;
    if (Qmax > 10) {
        double prev = out.partials[Qmax - 11];
        double denom = std::max(std::abs(out.value), 1e-12);
        out.stable = std::abs(out.value - prev) / denom <= 0.01;
    }
    return out;
}

struct SingularIntegral {
    double value = 0;      // epsilon -> 0 extrapolation
    double std_error = 0;  // binomial error at the finest epsilon
    std::vector<std::pair<double, double>> per_eps;
    long samples = 0;
    unsigned long seed = 0;
};

/*
 * Archimedean density J: Monte-Carlo volume of {z in box : |F_l(z)| < eps
 * for all l} scaled by (2 eps)^{-R}, extrapolated linearly in eps to 0.
 * Fixed seed and sequential accumulation keep the output deterministic.
 */
inline SingularIntegral singular_integral(const FormSystem& s, const Box& box,
                                          std::vector<double> eps_list, long samples = 200000,
                                          unsigned long seed = 12345) {
    const int n = s.n(), R = s.R();
    if (box.n() != n) throw std::invalid_argument("box dimension mismatch");
    box.validate();
    if (eps_list.empty()) throw std::invalid_argument("need at least one epsilon");
    for (double e : eps_list)
        if (!(e > 0)) throw std::invalid_argument("epsilon must be positive");
    std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
    if (samples < 1) throw std::invalid_argument("need samples >= 1");

    double vol = 1;
    std::vector<double> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = box.iv[i].first.get_d();
        hi[i] = box.iv[i].second.get_d();
        vol *= hi[i] - lo[i];
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<long> hits(eps_list.size(), 0);
    std::vector<double> z(n);
    for (long t = 0; t < samples; ++t) {
        for (int i = 0; i < n; ++i) z[i] = lo[i] + (hi[i] - lo[i]) * u01(rng);
        double worst = 0;
        for (int l = 0; l < R; ++l)
            worst = std::max(worst, std::abs(evaluate_t<double>(s.forms[l], z)));
        for (size_t e = 0; e < eps_list.size(); ++e)
            if (worst < eps_list[e]) ++hits[e];
    }
    SingularIntegral out;
    out.samples = samples;
    out.seed = seed;
    for (size_t e = 0; e < eps_list.size(); ++e) {
        double p = static_cast<double>(hits[e]) / static_cast<double>(samples);
        double scale = vol / std::pow(2.0 * eps_list[e], R);
        out.per_eps.emplace_back(eps_list[e], p * scale);
    }
    if (out.per_eps.size() == 1) {
        out.value = out.per_eps[0].second;
    } else {
        double mx = 0, my = 0;
        for (auto [x, y] : out.per_eps) {
            mx += x;
            my += y;
        }
        mx /= static_cast<double>(out.per_eps.size());
        my /= static_cast<double>(out.per_eps.size());
        double num = 0, den = 0;
        for (auto [x, y] : out.per_eps) {
            num += (x - mx) * (y - my);
            den += (x - mx) * (x - mx);
        }
        double slope = den > 0 ? num / den : 0.0;
        out.value = my - slope * mx;  // intercept at eps = 0
    }
    {
        double efin = eps_list.back();
        double p = static_cast<double>(hits.back()) / static_cast<double>(samples);
        double scale = vol / std::pow(2.0 * efin, R);
        out.std_error = scale * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
    }
    return out;
}

}  // namespace hessforms

#endif
