#ifndef HESSFORMS_EXAMPLES_HPP
#define HESSFORMS_EXAMPLES_HPP

#include <hessforms/strata.hpp>

namespace hessforms {

/*
 * Family 1: F = sum_j a_j x_{2j-1}^d x_{2j}^d + sum_i b_i x_{2m+i}^{2d},
 * degree 2d in n = 2m + k variables.  k = 0 is accepted (empty b-sum) but
 * the stock verification matrix only uses k >= 1.
 */
inline HomogeneousForm example1_form(int m, int k, int d, const std::vector<Int>& a,
                                     const std::vector<Int>& b) {
    if (d <= 1) throw std::invalid_argument("family 1 needs d > 1");
    if (m < 0 || k < 0 || m + k == 0) throw std::invalid_argument("need m + k >= 1");
    if (static_cast<int>(a.size()) != m || static_cast<int>(b.size()) != k)
        throw std::invalid_argument("coefficient lengths must be m and k");
    for (const auto& c : a)
        if (c == 0) throw std::invalid_argument("coefficients must be nonzero");
    for (const auto& c : b)
        if (c == 0) throw std::invalid_argument("coefficients must be nonzero");
    const int n = 2 * m + k;
    std::map<Exponents, Int> terms;
    for (int j = 0; j < m; ++j) {
        Exponents e(n, 0);
        e[2 * j] = static_cast<unsigned>(d);
        e[2 * j + 1] = static_cast<unsigned>(d);
        terms[e] = a[j];
    }
    for (int i = 0; i < k; ++i) {
        Exponents e(n, 0);
        e[2 * m + i] = static_cast<unsigned>(2 * d);
        terms[e] = b[i];
    }
    return HomogeneousForm{n, 2 * d, std::move(terms)};
}

/*
 * Family 2 in its integral model: F = sum_j a_j (d x_{2j-1} x_{2j}^{d-1}
 * - x_{2j-1}^d), degree d in n = 2m variables, d > 3.  Scaling by d keeps
 * every verified quantity (rank loci, gradient zero sets) unchanged.
 */
inline HomogeneousForm example2_form(int m, int d, const std::vector<Int>& a) {
    if (d <= 3) throw std::invalid_argument("family 2 needs d > 3");
    if (m < 1) throw std::invalid_argument("need m >= 1");
    if (static_cast<int>(a.size()) != m) throw std::invalid_argument("coefficient length must be m");
    for (const auto& c : a)
        if (c == 0) throw std::invalid_argument("coefficients must be nonzero");
    const int n = 2 * m;
    std::map<Exponents, Int> terms;
    for (int j = 0; j < m; ++j) {
        Exponents mixed(n, 0), pure(n, 0);
        mixed[2 * j] = 1;
        mixed[2 * j + 1] = static_cast<unsigned>(d - 1);
        pure[2 * j] = static_cast<unsigned>(d);
        terms[mixed] = a[j] * d;
        terms[pure] = -a[j];
    }
    return HomogeneousForm{n, d, std::move(terms)};
}

struct VerifyReport {
    HessianReport hess;
    DimensionEstimate vstar;
    int expected_h = 0;
    int expected_dim = 0;
    bool h_ok = false;
    bool dim_ok = false;
    bool agreement = false;
    bool pass = false;
};

// runs the invariant and the singular-locus estimate against expectations;
// pass also demands cross-prime agreement on every reported dimension
inline VerifyReport verify_example(const HomogeneousForm& f, int expected_h, int expected_dim,
                                   const std::vector<long>& primes = kDefaultPrimes,
                                   double budget = kDefaultModpBudget) {
    VerifyReport rep;
    rep.expected_h = expected_h;
    rep.expected_dim = expected_dim;
    rep.hess = hessian_invariant(f, primes, budget);
    rep.vstar = singular_locus_dim(make_system({f}), primes, budget);
    rep.h_ok = rep.hess.h == expected_h;
    rep.dim_ok = rep.vstar.dim && *rep.vstar.dim == expected_dim;
    bool hess_agree = true;
    for (const auto& st : rep.hess.strata) hess_agree = hess_agree && st.agreement;
    rep.agreement = rep.vstar.agreement && hess_agree;
    rep.pass = rep.h_ok && rep.dim_ok && rep.agreement;
    return rep;
}

}  // namespace hessforms

#endif
