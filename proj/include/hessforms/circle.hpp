#ifndef HESSFORMS_CIRCLE_HPP
#define HESSFORMS_CIRCLE_HPP

#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include <hessforms/strata.hpp>

namespace hessforms {

inline constexpr int kScalarPrecBits = 128;  // mantissa contract: >= 80 bits
inline constexpr double kDefaultLatticeBudget = 1e8;
inline constexpr double kDefaultTupleBudget = 1e7;

/*
 * Frequency scalar: exact rational when written as `p/q` or an integer
 * literal, 128-bit float otherwise.  Mixing an inexact operand poisons the
 * whole expression into the float track.
 */
class Scalar {
public:
    Scalar() : f_(0, kScalarPrecBits) {}
    explicit Scalar(Rat r) : r_(std::move(r)), f_(0, kScalarPrecBits) { r_.canonicalize(); }
    explicit Scalar(const mpf_class& f) : exact_(false), f_(f, kScalarPrecBits) {}

    static Scalar parse(const std::string& s) {
        std::string t;
        for (char c : s)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (t.empty()) throw parse_error("empty scalar");
        try {
            if (t.find('/') != std::string::npos) {
                Rat r(t);
                if (r.get_den() == 0) throw parse_error("zero denominator: " + s);
                return Scalar(r);
            }
            if (t.find_first_of(".eE") == std::string::npos) return Scalar(Rat(Int(t)));
            return Scalar(mpf_class(t, kScalarPrecBits));
        } catch (const std::invalid_argument&) {
            throw parse_error("bad scalar: " + s);
        }
    }

    bool exact() const { return exact_; }
    const Rat& rat() const {
        if (!exact_) throw std::logic_error("scalar is not exact");
        return r_;
    }
    mpf_class real() const { return exact_ ? mpf_class(r_, kScalarPrecBits) : f_; }
    double to_double() const { return exact_ ? r_.get_d() : f_.get_d(); }

    Scalar times(const Int& k) const {
        if (exact_) return Scalar(Rat(r_ * k));
        mpf_class out(0, kScalarPrecBits);
        out = f_ * mpf_class(k, kScalarPrecBits);
        return Scalar(out);
    }

    Scalar& operator+=(const Scalar& o) {
        if (exact_ && o.exact_) {
            r_ += o.r_;
            r_.canonicalize();
            return *this;
        }
        mpf_class sum(real() + o.real(), kScalarPrecBits);
        exact_ = false;
        f_ = sum;
        r_ = 0;
        return *this;
    }

    Scalar minus_int(const Int& m) const {
        if (exact_) return Scalar(Rat(r_ - m));
        mpf_class out(f_ - mpf_class(m, kScalarPrecBits), kScalarPrecBits);
        return Scalar(out);
    }

    bool is_exact_zero() const { return exact_ && r_ == 0; }

    // nearest integer, half-integer ties toward even
    Int nearest_int() const {
        Int fl = floor_int();
        Scalar frac = minus_int(fl);
        int cmp;
        if (frac.exact_)
            cmp = cmp_half(frac.r_);
        else
            cmp = cmp_half_f(frac.f_);
        if (cmp < 0) return fl;
        if (cmp > 0) return fl + 1;
        return mpz_even_p(fl.get_mpz_t()) ? fl : fl + 1;
    }

    // distance to the nearest integer ||.||
    double dist_to_nearest() const {
        Int fl = floor_int();
        double frac = minus_int(fl).abs_double();
        return std::min(frac, 1.0 - frac);
    }

    double abs_double() const {
        double v = to_double();
        return v < 0 ? -v : v;
    }

private:
    Int floor_int() const {
        Int fl;
        if (exact_) {
            mpz_fdiv_q(fl.get_mpz_t(), r_.get_num_mpz_t(), r_.get_den_mpz_t());
        } else {
            mpf_class f(0, kScalarPrecBits);
            mpf_floor(f.get_mpf_t(), f_.get_mpf_t());
            fl = Int(f);
        }
        return fl;
    }
    static int cmp_half(const Rat& r) { return cmp(r, Rat(1, 2)); }
    static int cmp_half_f(const mpf_class& f) {
        mpf_class half(0.5, kScalarPrecBits);
        return cmp(f, half);
    }

    bool exact_ = true;
    Rat r_{};
    mpf_class f_;
};

inline bool all_exact(const std::vector<Scalar>& a) {
    return std::all_of(a.begin(), a.end(), [](const Scalar& s) { return s.exact(); });
}

// Closed rational box, every coordinate interval inside [-1, 1].
struct Box {
    std::vector<std::pair<Rat, Rat>> iv;

    static Box full(int n) {
        Box b;
        b.iv.assign(n, {Rat(-1), Rat(1)});
        return b;
    }
    int n() const { return static_cast<int>(iv.size()); }
    void validate() const {
        for (const auto& [lo, hi] : iv) {
            if (lo > hi) throw std::invalid_argument("box interval empty");
            if (lo < -1 || hi > 1) throw std::invalid_argument("box must sit inside [-1,1]^n");
        }
    }
    bool symmetric() const {
        return std::all_of(iv.begin(), iv.end(),
                           [](const auto& p) { return p.first == -p.second; });
    }
};

namespace detail {

struct LatticeRange {
    std::vector<Int> lo, hi;
    bool empty = false;
    double points = 1.0;
};

// integer points of P*box: ceil(P*l_i) <= x_i <= floor(P*u_i), exact in mpq
inline LatticeRange lattice_range(const Box& box, double P) {
    if (P < 0 || !std::isfinite(P)) throw std::invalid_argument("P must be a nonnegative real");
    box.validate();
    Rat Pq(P);  // binary doubles convert exactly
    LatticeRange r;
    for (const auto& [lo, hi] : box.iv) {
        Rat a = lo * Pq, b = hi * Pq;
        a.canonicalize();
        b.canonicalize();
        Int ia, ib;
        mpz_cdiv_q(ia.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
        mpz_fdiv_q(ib.get_mpz_t(), b.get_num_mpz_t(), b.get_den_mpz_t());
        if (ia > ib) r.empty = true;
        r.points *= Int(ib - ia + 1).get_d();
        r.lo.push_back(ia);
        r.hi.push_back(ib);
    }
    return r;
}

}  // namespace detail

/*
 * S(alpha) = sum over x in P*box of e(sum_l alpha_l F_l(x)).  Phases are
 * reduced mod 1 from exact integer form values before any rounding; exact
 * rational frequencies go through a root-of-unity table on the common
 * denominator.
 */
inline std::complex<double> exp_sum(const FormSystem& s, const std::vector<Scalar>& alpha, double P,
                                    const Box& box, double budget = kDefaultLatticeBudget) {
    const int n = s.n(), R = s.R();
    if (static_cast<int>(alpha.size()) != R) throw std::invalid_argument("alpha length must be R");
    if (box.n() != n) throw std::invalid_argument("box dimension mismatch");
    auto range = detail::lattice_range(box, P);
    if (range.empty) return {0.0, 0.0};
    if (range.points > budget) throw budget_error("lattice budget exceeded");

    Int maxabs = 0;
    for (int i = 0; i < n; ++i) maxabs = std::max({maxabs, Int(abs(range.lo[i])), Int(abs(range.hi[i]))});
    const Int ll_gate = Int(1) << 62;
    std::vector<bool> use_ll(R);
    for (int l = 0; l < R; ++l) use_ll[l] = form_value_bound(s.forms[l], maxabs) < ll_gate;

    const bool exact = all_exact(alpha);
    Int q = 1;
    std::vector<Int> numer(R);
    std::vector<std::complex<double>> roots;
    if (exact) {
        for (const auto& a : alpha) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), a.rat().get_den_mpz_t());
        for (int l = 0; l < R; ++l) numer[l] = Int(alpha[l].rat() * q);
        if (q <= 1 << 16) {
            long qi = q.get_si();
            roots.resize(qi);
            for (long r = 0; r < qi; ++r) {
                double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(qi);
                roots[r] = {std::cos(ang), std::sin(ang)};
            }
        }
    }
    std::vector<mpf_class> af;
    if (!exact)
        for (const auto& a : alpha) af.push_back(a.real());

    std::vector<Int> x = range.lo;
    std::vector<long long> xll(n);
    std::complex<double> total = 0, chunk = 0;
    long in_chunk = 0;
    while (true) {
        for (int i = 0; i < n; ++i) xll[i] = x[i].get_si();
        std::complex<double> term;
        if (exact) {
            Int val = 0;
            for (int l = 0; l < R; ++l) {
                Int fv = use_ll[l] ? Int(static_cast<long>(evaluate_t<long long>(s.forms[l], xll)))
                                   : evaluate(s.forms[l], x);
                val += numer[l] * fv;
            }
            Int rem;
            mpz_mod(rem.get_mpz_t(), val.get_mpz_t(), q.get_mpz_t());
            if (!roots.empty()) {
                term = roots[rem.get_si()];
            } else {
                double ang = 2.0 * std::numbers::pi * Rat(rem, q).get_d();
                term = {std::cos(ang), std::sin(ang)};
            }
        } else {
            mpf_class phase(0, kScalarPrecBits);
            for (int l = 0; l < R; ++l) {
                Int fv = use_ll[l] ? Int(static_cast<long>(evaluate_t<long long>(s.forms[l], xll)))
                                   : evaluate(s.forms[l], x);
                phase += af[l] * mpf_class(fv, kScalarPrecBits);
            }
            mpf_class fl(0, kScalarPrecBits);
            mpf_floor(fl.get_mpf_t(), phase.get_mpf_t());
            double ang = 2.0 * std::numbers::pi * mpf_class(phase - fl).get_d();
            term = {std::cos(ang), std::sin(ang)};
        }
        chunk += term;
        if (++in_chunk == 4096) {  // two-level accumulation limits roundoff drift
            total += chunk;
            chunk = 0;
            in_chunk = 0;
        }
        int k = 0;
        while (k < n && x[k] == range.hi[k]) x[k] = range.lo[k], ++k;
        if (k == n) break;
        x[k] += 1;
    }
    return total + chunk;
}

// one (d-1)-tuple of integer vectors from the differencing step
using WeylTuple = std::vector<std::vector<Int>>;

/*
 * Solutions of the differenced system: tuples with every coordinate in
 * [-floor(P^eta), floor(P^eta)] such that the fractional distance
 * ||sum_l alpha_l Gamma_l(tuple, e_i)|| stays below P^{(eta-1)(d-1)-1} for
 * all i.  The zero tuple always qualifies.  Output sorted.
 */
inline std::vector<WeylTuple> weyl_solution_set(const FormSystem& s, const std::vector<Scalar>& alpha,
                                                double P, double eta,
                                                double budget = kDefaultTupleBudget) {
    const int n = s.n(), d = s.d(), R = s.R();
    if (static_cast<int>(alpha.size()) != R) throw std::invalid_argument("alpha length must be R");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
    if (P < 1.0) throw std::invalid_argument("P must be >= 1");
    const long H = static_cast<long>(std::floor(std::pow(P, eta)));
    const double tau = std::pow(P, (eta - 1.0) * (d - 1) - 1.0);
    const int slots = d - 1;
    double tuples = std::pow(2.0 * H + 1.0, static_cast<double>(n) * slots);
    if (tuples > budget) throw budget_error("solution-set enumeration budget exceeded");

    std::vector<WeylTuple> out;
    std::vector<long> odo(static_cast<size_t>(n) * slots, -H);
    std::vector<std::vector<Int>> xs(d, std::vector<Int>(n, 0));
    while (true) {
        for (int sl = 0; sl < slots; ++sl)
            for (int v = 0; v < n; ++v) xs[sl][v] = odo[static_cast<size_t>(sl) * n + v];
        bool pass = true;
        for (int i = 1; i <= n && pass; ++i) {
            xs[d - 1] = unit_vector(n, i);
            Scalar theta{Rat(0)};
            for (int l = 0; l < R; ++l) theta += alpha[l].times(gamma_eval(s.forms[l], xs));
            if (!(theta.dist_to_nearest() < tau)) pass = false;
        }
        if (pass) out.emplace_back(xs.begin(), xs.begin() + slots);
        size_t k = 0;
        while (k < odo.size() && odo[k] == H) odo[k++] = -H;
        if (k == odo.size()) break;
        ++odo[k];
    }
    std::sort(out.begin(), out.end());
    return out;
}

// R x (n*|solutions|) matrix; entry (l, j*|S|+s) = Gamma_l(tuple_s, e_{j+1})
inline IntegerMatrix build_M_matrix(const FormSystem& s, const std::vector<WeylTuple>& solutions) {
    if (solutions.empty()) throw std::invalid_argument("solution list must be nonempty");
    const int n = s.n(), d = s.d(), R = s.R();
    const int S = static_cast<int>(solutions.size());
    IntegerMatrix m(R, n * S);
    std::vector<std::vector<Int>> xs(d);
    for (int si = 0; si < S; ++si) {
        for (int sl = 0; sl < d - 1; ++sl) xs[sl] = solutions[si][sl];
        for (int j = 0; j < n; ++j) {
            xs[d - 1] = unit_vector(n, j + 1);
            for (int l = 0; l < R; ++l) m.at(l, j * S + si) = gamma_eval(s.forms[l], xs);
        }
    }
    return m;
}

// q, a with gcd(q, a) = 1 and qa_l close to a_l; residuals as |q alpha_l - a_l|
struct RationalApprox {
    Int q = 1;
    std::vector<Int> a;
    std::vector<double> residuals;
    std::vector<double> residual_bounds;  // provable: (sum_s |c_ls| |gamma_s|) / gcd
    bool residuals_exact_zero = false;
    Int det;                   // det of the selected minor
    std::vector<int> columns;  // its column indices in M
};

/*
 * Lemma-style recovery: pick the first full-rank R x R minor M_0 by a
 * greedy rank scan over columns, split the exact frequency combinations
 * into nearest integer m_s plus error gamma_s, then with the cofactor
 * matrix c of M_0 set q = |det|/g and a_l = sign(det) (sum_s c_ls m_s)/g,
 * g the gcd making the output primitive.  Returns nullopt when M has rank
 * below R (the caller falls to the size-bound branch).
 */
inline std::optional<RationalApprox> rational_approx_from_minor(const FormSystem& s,
                                                                const std::vector<Scalar>& alpha,
                                                                const IntegerMatrix& m) {
    const int R = s.R();
    if (m.rows != R) throw std::invalid_argument("matrix row count must be R");
    std::vector<int> cols;
    {
        for (int c = 0; c < m.cols && static_cast<int>(cols.size()) < R; ++c) {
            std::vector<int> trial = cols;
            trial.push_back(c);
            IntegerMatrix t(R, static_cast<int>(trial.size()));
            for (int i = 0; i < R; ++i)
                for (size_t j = 0; j < trial.size(); ++j) t.at(i, static_cast<int>(j)) = m.at(i, trial[j]);
            if (rank_rational(t) == static_cast<int>(trial.size())) cols = trial;
        }
    }
    if (static_cast<int>(cols.size()) < R) return std::nullopt;

    IntegerMatrix m0(R, R);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < R; ++j) m0.at(i, j) = m.at(i, cols[j]);
    Int det = determinant(m0);
    IntegerMatrix cof = adjugate(m0);  // m0 * cof^T = det * I

    std::vector<Int> ms(R);
    std::vector<double> gabs(R);
    bool gamma_zero = true;
    for (int j = 0; j < R; ++j) {
        Scalar theta{Rat(0)};
        for (int l = 0; l < R; ++l) theta += alpha[l].times(m0.at(l, j));
        ms[j] = theta.nearest_int();
        Scalar g = theta.minus_int(ms[j]);
        gabs[j] = g.abs_double();
        if (!g.is_exact_zero()) gamma_zero = false;
    }

    std::vector<Int> t(R, 0);
    for (int l = 0; l < R; ++l)
        for (int j = 0; j < R; ++j) t[l] += cof.at(l, j) * ms[j];
    Int g = abs(det);
    for (const auto& v : t) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    int sign = det < 0 ? -1 : 1;

    RationalApprox out;
    out.det = det;
    out.columns = cols;
    out.q = abs(det) / g;
    out.residuals_exact_zero = true;
    double ginv = 1.0 / g.get_d();
    for (int l = 0; l < R; ++l) {
        out.a.push_back(sign * t[l] / g);
        Scalar res = alpha[l].times(out.q).minus_int(out.a.back());
        out.residuals.push_back(res.abs_double());
        if (!res.is_exact_zero()) out.residuals_exact_zero = false;
        double bound = 0;
        for (int j = 0; j < R; ++j) bound += Int(abs(cof.at(l, j))).get_d() * gabs[j];
        out.residual_bounds.push_back(bound * ginv);
    }
    // alpha exact and integral at the minor => provably zero residuals
    if (gamma_zero && !out.residuals_exact_zero)
        throw std::logic_error("exact construction produced nonzero residual");
    return out;
}

struct ExpSumParams {
    double P = 32;
    double eta = 0.5;
    Box box;
    double eps = 0.05;  // diagnostic slack exponent in the size-bound reference
    double lattice_budget = kDefaultLatticeBudget;
    double tuple_budget = kDefaultTupleBudget;

    void validate(int n) const {
        if (P < 1.0) throw std::invalid_argument("P must be >= 1");
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
        if (box.n() != n) throw std::invalid_argument("box dimension mismatch");
        box.validate();
    }
};

enum class Branch { MinorBound, RationalApproxFound };

struct DichotomyResult {
    Branch branch = Branch::MinorBound;
    double K = 0;  // (n - sigma) / 2^{d-1}
    size_t solution_count = 0;
    int m_rank = 0;
    // MinorBound branch
    double abs_sum = 0;
    double reference = 0;        // P^{n - (n-sigma) eta / 2^{d-1} + eps}
    double fitted_constant = 0;  // |S| / P^{n - (n-sigma) eta / 2^{d-1}}
    // RationalApproxFound branch
    std::optional<RationalApprox> approx;
    double exp_q = 0;         // R(d-1) eta: size bound exponent for q
    double exp_residual = 0;  // -d + R(d-1) eta: size bound exponent for residuals
};

/*
 * Either the solution set is rich enough that the stacked Gamma matrix has
 * full rank R, yielding a small-denominator rational approximation to
 * alpha, or the exponential sum obeys the power-saving size bound.  Both
 * certificates are computed, never assumed.
 */
inline DichotomyResult dichotomy_check(const FormSystem& s, const std::vector<Scalar>& alpha,
                                       const ExpSumParams& params, int sigma) {
    const int n = s.n(), d = s.d(), R = s.R();
    params.validate(n);
    if (sigma < 0 || sigma > n) throw std::invalid_argument("sigma out of range");
    DichotomyResult out;
    out.K = static_cast<double>(n - sigma) / std::pow(2.0, d - 1);
    auto sols = weyl_solution_set(s, alpha, params.P, params.eta, params.tuple_budget);
    out.solution_count = sols.size();
    auto m = build_M_matrix(s, sols);
    out.m_rank = rank_rational(m);
    if (out.m_rank == R) {
        out.branch = Branch::RationalApproxFound;
        out.approx = rational_approx_from_minor(s, alpha, m);
        if (!out.approx) throw std::logic_error("full-rank matrix must yield a minor");
        out.exp_q = R * (d - 1) * params.eta;
        out.exp_residual = -d + R * (d - 1) * params.eta;
        return out;
    }
    out.branch = Branch::MinorBound;
    out.abs_sum = std::abs(exp_sum(s, alpha, params.P, params.box, params.lattice_budget));
    double decay = n - out.K * params.eta;
    out.reference = std::pow(params.P, decay + params.eps);
    out.fitted_constant = out.abs_sum / std::pow(params.P, decay);
    return out;
}

}  // namespace hessforms

#endif
