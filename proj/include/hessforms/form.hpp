#ifndef HESSFORMS_FORM_HPP
#define HESSFORMS_FORM_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <hessforms/errors.hpp>

namespace hessforms {

using Int = mpz_class;
using Rat = mpq_class;

// Exponent of each variable in a monomial; length = ambient variable count.
using Exponents = std::vector<unsigned>;

inline Int factorial(unsigned k) {
    Int f;
    mpz_fac_ui(f.get_mpz_t(), k);
    return f;
}

inline Int pow_int(const Int& b, unsigned e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

/*
 * Sparse integer homogeneous polynomial.  All stored monomials share total
 * degree d and carry nonzero coefficients; the map's lexicographic key order
 * doubles as the canonical (graded-lex) serialization order.
 *
 * Forms built by the parser and the generators satisfy d >= 2; derivative
 * results reuse the same representation with smaller degrees (a degree-0
 * "form" is a constant).  The zero form is represented externally as an
 * empty optional, never as an empty term map.
 */
struct HomogeneousForm {
    int n = 0;
    int d = 0;
    std::map<Exponents, Int> terms;

    friend bool operator==(const HomogeneousForm&, const HomogeneousForm&) = default;
};

struct FormSystem {
    std::vector<HomogeneousForm> forms;

    int n() const { return forms.at(0).n; }
    int d() const { return forms.at(0).d; }
    int R() const { return static_cast<int>(forms.size()); }
};

inline FormSystem make_system(std::vector<HomogeneousForm> forms) {
    if (forms.empty()) throw std::invalid_argument("a system needs at least one form");
    for (const auto& f : forms) {
        if (f.n != forms[0].n || f.d != forms[0].d)
            throw std::invalid_argument("all forms in a system must share n and d");
    }
    return FormSystem{std::move(forms)};
}

namespace detail {

// Builds a validated form from collected coefficients: zero coefficients are
// dropped and the common total degree is checked.
inline std::optional<HomogeneousForm> collect_form(int n, std::map<Exponents, Int> acc) {
    int degree = -1;
    for (auto it = acc.begin(); it != acc.end();) {
        if (it->second == 0) {
            it = acc.erase(it);
            continue;
        }
        int deg = 0;
        for (unsigned e : it->first) deg += static_cast<int>(e);
        if (degree < 0)
            degree = deg;
        else if (deg != degree)
            throw parse_error("non-homogeneous: mixed term degrees");
        ++it;
    }
    if (acc.empty()) return std::nullopt;
    return HomogeneousForm{n, degree, std::move(acc)};
}

}  // namespace detail

/*
 * Form grammar: terms separated by '+'/'-'; each term
 * [coef][*]factor(*factor)* with factor = x<k> or x<k>^<e>; whitespace
 * ignored.  Example: "3*x1^2*x2 - x3^3".
 */
inline HomogeneousForm parse_form(const std::string& text, int n) {
    if (n < 1) throw parse_error("variable count must be >= 1");
    size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto digits = [&]() {
        std::string s;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) s += text[i++];
        return s;
    };

    std::map<Exponents, Int> acc;
    int degree = -1;
    skip();
    if (i >= text.size()) throw parse_error("empty form");
    bool first = true;
    while (i < text.size()) {
        int sign = 1;
        if (first) {
            if (text[i] == '+') {
                ++i;
            } else if (text[i] == '-') {
                sign = -1;
                ++i;
            }
            first = false;
        } else {
            if (text[i] == '+')
                sign = 1;
            else if (text[i] == '-')
                sign = -1;
            else
                throw parse_error(std::string("expected '+' or '-' at \"") + text.substr(i) + "\"");
            ++i;
        }
        skip();
        std::string coef_digits = digits();
        Int coef = coef_digits.empty() ? Int(1) : Int(coef_digits);
        coef *= sign;
        skip();
        if (!coef_digits.empty() && i < text.size() && text[i] == '*') {
            ++i;
            skip();
        }
        Exponents e(n, 0);
        int deg = 0;
        bool any_factor = false;
        while (i < text.size() && text[i] == 'x') {
            ++i;
            std::string vd = digits();
            if (vd.empty()) throw parse_error("expected variable index after 'x'");
            long k = std::stol(vd);
            if (k < 1 || k > n) throw parse_error("variable index out of range: x" + vd);
            unsigned ex = 1;
            skip();
            if (i < text.size() && text[i] == '^') {
                ++i;
                skip();
                std::string ed = digits();
                if (ed.empty()) throw parse_error("expected exponent after '^'");
                ex = static_cast<unsigned>(std::stoul(ed));
            }
            e[k - 1] += ex;
            deg += static_cast<int>(ex);
            any_factor = true;
            skip();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip();
            } else {
                break;
            }
        }
        if (!any_factor) throw parse_error("expected a variable factor in term");
        if (degree < 0)
            degree = deg;
        else if (deg != degree)
            throw parse_error("non-homogeneous: mixed term degrees");
        acc[e] += coef;
        skip();
    }
    auto f = detail::collect_form(n, std::move(acc));
    if (!f) throw parse_error("resulting form is zero (no terms)");
    if (f->d < 2) throw parse_error("degree must be >= 2");
    return *f;
}

inline std::string monomial_string(const Exponents& e) {
    std::string s;
    for (size_t v = 0; v < e.size(); ++v) {
        if (e[v] == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(v + 1);
        if (e[v] > 1) s += "^" + std::to_string(e[v]);
    }
    return s;
}

// Canonical serialization: graded-lex, leading monomial first.
inline std::string to_string(const HomogeneousForm& f) {
    std::string s;
    for (auto it = f.terms.rbegin(); it != f.terms.rend(); ++it) {
        Int c = it->second;
        bool neg = c < 0;
        Int ac = abs(c);
        if (s.empty()) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        std::string mono = monomial_string(it->first);
        if (ac != 1 || mono.empty()) {
            s += ac.get_str();
            if (!mono.empty()) s += "*";
        }
        s += mono;
    }
    return s;
}

template <class T>
T evaluate_t(const HomogeneousForm& f, const std::vector<T>& x) {
    if (static_cast<int>(x.size()) != f.n) throw std::invalid_argument("point dimension mismatch");
    T total{};
    for (const auto& [e, c] : f.terms) {
        T prod;
        if constexpr (std::is_same_v<T, Int>) {
            prod = c;
        } else {
            prod = static_cast<T>(c.get_si());
        }
        for (int v = 0; v < f.n; ++v) {
            for (unsigned k = 0; k < e[v]; ++k) prod *= x[v];
        }
        total += prod;
    }
    return total;
}

inline Int evaluate(const HomogeneousForm& f, const std::vector<Int>& x) {
    return evaluate_t<Int>(f, x);
}

// |F(x)| <= sum |c| * maxabs^d
inline Int form_value_bound(const HomogeneousForm& f, const Int& maxabs) {
    Int s = 0;
    for (const auto& [e, c] : f.terms) s += abs(c);
    return s * pow_int(maxabs, static_cast<unsigned>(f.d));
}

// Formal partial derivative with respect to x_i (1-based); nullopt = zero form.
inline std::optional<HomogeneousForm> partial(const HomogeneousForm& f, int i) {
    if (i < 1 || i > f.n) throw std::invalid_argument("variable index out of range");
    std::map<Exponents, Int> acc;
    for (const auto& [e, c] : f.terms) {
        if (e[i - 1] == 0) continue;
        Exponents de = e;
        de[i - 1] -= 1;
        acc[de] += c * static_cast<long>(e[i - 1]);
    }
    return detail::collect_form(f.n, std::move(acc));
}

// d^2 F / dx_a dx_b, a form of degree d-2 (constant when d = 2).
inline std::optional<HomogeneousForm> hessian_entry(const HomogeneousForm& f, int a, int b) {
    auto fa = partial(f, a);
    if (!fa) return std::nullopt;
    return partial(*fa, b);
}

/*
 * Symmetric tensor entry G_j with F(x) = sum_j G_j x_{j1}...x_{jd}.  For a
 * monomial c*x^alpha every index tuple realizing alpha carries c*alpha!/d!.
 * Indices are 1-based and there must be exactly d of them.
 */
inline Rat symmetric_coeff(const HomogeneousForm& f, const std::vector<int>& idx) {
    if (static_cast<int>(idx.size()) != f.d) throw std::invalid_argument("index tuple length must equal d");
    Exponents e(f.n, 0);
    for (int j : idx) {
        if (j < 1 || j > f.n) throw std::invalid_argument("index out of range in tuple");
        e[j - 1] += 1;
    }
    auto it = f.terms.find(e);
    if (it == f.terms.end()) return Rat(0);
    Int af = 1;
    for (unsigned k : e) af *= factorial(k);
    Rat r(it->second * af, factorial(static_cast<unsigned>(f.d)));
    r.canonicalize();
    return r;
}

namespace detail {

/*
 * Sum over the ways to assign each occurrence of a monomial's variables to
 * the d argument slots: for variable v with multiplicity m, choose m of the
 * still-free slots and multiply the corresponding coordinates.
 */
template <class T>
void gamma_assignments(const std::vector<std::pair<int, unsigned>>& vars, size_t vi,
                       unsigned free_from, unsigned pending, std::vector<char>& used,
                       const std::vector<std::vector<T>>& xs, const T& prod, T& acc) {
    if (vi == vars.size()) {
        acc += prod;
        return;
    }
    auto [v, mult] = vars[vi];
    if (pending == 0) {
        // advance to next variable with a fresh slot scan
        gamma_assignments(vars, vi + 1, 0,
                          vi + 1 < vars.size() ? vars[vi + 1].second : 0, used, xs, prod, acc);
        return;
    }
    for (unsigned s = free_from; s < used.size(); ++s) {
        if (used[s]) continue;
        if (used.size() - s < pending) break;
        used[s] = 1;
        T p2 = prod;
        p2 *= xs[s][static_cast<size_t>(v)];
        gamma_assignments(vars, vi, s + 1, pending - 1, used, xs, p2, acc);
        used[s] = 0;
    }
}

template <class T>
T gamma_eval_impl(const HomogeneousForm& f, const std::vector<std::vector<T>>& xs) {
    const unsigned d = static_cast<unsigned>(f.d);
    T total{};
    std::vector<char> used(d, 0);
    for (const auto& [e, c] : f.terms) {
        std::vector<std::pair<int, unsigned>> vars;
        Int af = 1;
        for (int v = 0; v < f.n; ++v) {
            if (e[v] > 0) {
                vars.emplace_back(v, e[v]);
                af *= factorial(e[v]);
            }
        }
        T acc{};
        T one;
        if constexpr (std::is_same_v<T, Int>)
            one = 1;
        else
            one = T(1);
        gamma_assignments<T>(vars, 0, 0, vars.empty() ? 0 : vars[0].second, used, xs, one, acc);
        T coef;
        if constexpr (std::is_same_v<T, Int>)
            coef = c * af;
        else
            coef = static_cast<T>(Int(c * af).get_si());
        total += coef * acc;
    }
    return total;
}

}  // namespace detail

/*
 * Gamma_F(x_1,...,x_d) = d! sum_j G_j x_{1,j1}...x_{d,jd}, evaluated by
 * iterating monomials and distributing their exponents over the argument
 * slots (never materializing the n^d tensor).  Always an exact integer.
 */
inline Int gamma_eval(const HomogeneousForm& f, const std::vector<std::vector<Int>>& xs) {
    if (static_cast<int>(xs.size()) != f.d) throw std::invalid_argument("gamma needs exactly d vectors");
    for (const auto& x : xs)
        if (static_cast<int>(x.size()) != f.n) throw std::invalid_argument("gamma vector length mismatch");
    return detail::gamma_eval_impl<Int>(f, xs);
}

// int64 fast path; caller must check gamma_value_bound fits.
inline long long gamma_eval_ll(const HomogeneousForm& f, const std::vector<std::vector<long long>>& xs) {
    return detail::gamma_eval_impl<long long>(f, xs);
}

// |Gamma_F(x_1..x_d)| <= sum_alpha |c|*d! * maxabs^d  (each slot bounded by maxabs).
inline Int gamma_value_bound(const HomogeneousForm& f, const Int& maxabs) {
    Int s = 0;
    for (const auto& [e, c] : f.terms) s += abs(c);
    return s * factorial(static_cast<unsigned>(f.d)) * pow_int(maxabs, static_cast<unsigned>(f.d));
}

/*
 * Inclusion-exclusion polarization identity,
 *   Gamma_F(x_1,...,x_d) = sum_{S nonempty} (-1)^{d-|S|} F(sum_{i in S} x_i),
 * used as an independent cross-check of gamma_eval.
 */
inline Int gamma_via_polarization(const HomogeneousForm& f, const std::vector<std::vector<Int>>& xs) {
    if (static_cast<int>(xs.size()) != f.d) throw std::invalid_argument("gamma needs exactly d vectors");
    for (const auto& x : xs)
        if (static_cast<int>(x.size()) != f.n) throw std::invalid_argument("gamma vector length mismatch");
    const int d = f.d;
    Int total = 0;
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
        std::vector<Int> s(f.n, 0);
        int sz = 0;
        for (int i = 0; i < d; ++i) {
            if (mask & (1u << i)) {
                ++sz;
                for (int v = 0; v < f.n; ++v) s[v] += xs[i][v];
            }
        }
        Int val = evaluate(f, s);
        total += ((d - sz) % 2 == 0) ? val : -val;
    }
    return total;
}

// c.F = c_1 F_1 + ... + c_R F_R; nullopt when the combination cancels.
inline std::optional<HomogeneousForm> pencil_combine(const FormSystem& s, const std::vector<Int>& c) {
    if (c.size() != s.forms.size()) throw std::invalid_argument("coefficient length mismatch");
    std::map<Exponents, Int> acc;
    for (size_t l = 0; l < c.size(); ++l) {
        if (c[l] == 0) continue;
        for (const auto& [e, coef] : s.forms[l].terms) acc[e] += c[l] * coef;
    }
    auto f = detail::collect_form(s.n(), std::move(acc));
    if (f) {
        f->n = s.n();
        if (f->d != s.d()) throw std::logic_error("pencil degree mismatch");
    }
    return f;
}

inline std::vector<Int> unit_vector(int n, int i) {
    std::vector<Int> e(n, 0);
    e[i - 1] = 1;
    return e;
}

}  // namespace hessforms

#endif
