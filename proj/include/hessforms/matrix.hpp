#ifndef HESSFORMS_MATRIX_HPP
#define HESSFORMS_MATRIX_HPP

#include <cstdlib>
#include <vector>

#include <hessforms/form.hpp>

namespace hessforms {

// Dense arbitrary-precision integer matrix, row-major.
struct IntegerMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Int> a;

    IntegerMatrix() = default;
    IntegerMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    Int& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static IntegerMatrix identity(int n) {
        IntegerMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;
};

inline IntegerMatrix transpose(const IntegerMatrix& m) {
    IntegerMatrix t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

inline IntegerMatrix matmul(const IntegerMatrix& x, const IntegerMatrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("matmul shape mismatch");
    IntegerMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            if (x.at(i, k) == 0) continue;
            for (int j = 0; j < y.cols; ++j) r.at(i, j) += x.at(i, k) * y.at(k, j);
        }
    return r;
}

// Rank over Q by fraction-free (Bareiss) elimination.
inline int rank_rational(IntegerMatrix m) {
    int r = 0;
    Int prev = 1;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int piv = -1;
        for (int i = r; i < m.rows; ++i) {
            if (m.at(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(piv, j), m.at(r, j));
        for (int i = r + 1; i < m.rows; ++i) {
            for (int j = c + 1; j < m.cols; ++j) {
                Int t = m.at(r, c) * m.at(i, j) - m.at(i, c) * m.at(r, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m.at(i, c) = 0;
        }
        prev = m.at(r, c);
        ++r;
    }
    return r;
}

inline Int determinant(IntegerMatrix m) {
    if (m.rows != m.cols) throw std::invalid_argument("determinant needs a square matrix");
    const int n = m.rows;
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int i = c; i < n; ++i) {
            if (m.at(i, c) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) return 0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
            sign = -sign;
        }
        for (int i = c + 1; i < n; ++i) {
            for (int j = c + 1; j < n; ++j) {
                Int t = m.at(c, c) * m.at(i, j) - m.at(i, c) * m.at(c, j);
                mpz_divexact(m.at(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m.at(i, c) = 0;
        }
        prev = m.at(c, c);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

namespace detail {

inline bool is_prime(long p) {
    if (p < 2) return false;
    mpz_class z(p);
    return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

// Gaussian elimination rank over F_p on a dense long-long matrix (p < 2^31).
inline int rank_mod_p_ll(std::vector<long long>& m, int rows, int cols, long p) {
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i) {
            if (m[static_cast<size_t>(i) * cols + c] % p != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != r)
            for (int j = 0; j < cols; ++j)
                std::swap(m[static_cast<size_t>(piv) * cols + j], m[static_cast<size_t>(r) * cols + j]);
        long long pv = ((m[static_cast<size_t>(r) * cols + c] % p) + p) % p;
        // pv^(p-2) mod p
        long long inv = 1, base = pv;
        for (long e = p - 2; e > 0; e >>= 1) {
            if (e & 1) inv = (__int128)inv * base % p;
            base = (__int128)base * base % p;
        }
        for (int i = r + 1; i < rows; ++i) {
            long long f = ((m[static_cast<size_t>(i) * cols + c] % p) + p) % p;
            if (f == 0) continue;
            long long mult = (__int128)f * inv % p;
            for (int j = c; j < cols; ++j) {
                long long& x = m[static_cast<size_t>(i) * cols + j];
                x = ((x - (__int128)mult * m[static_cast<size_t>(r) * cols + j]) % p + p) % p;
            }
        }
        ++r;
    }
    return r;
}

}  // namespace detail

inline int rank_mod_p(const IntegerMatrix& m, long p) {
    if (!detail::is_prime(p)) throw std::invalid_argument("p must be prime");
    std::vector<long long> w(static_cast<size_t>(m.rows) * m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            Int r = m.at(i, j) % p;
            long long v = r.get_si();
            w[static_cast<size_t>(i) * m.cols + j] = (v % p + p) % p;
        }
    return detail::rank_mod_p_ll(w, m.rows, m.cols, p);
}

/*
 * Cofactor matrix C of a square M: integer matrix with
 *   M C^T = det(M) I = C M^T.
 */
inline IntegerMatrix adjugate(const IntegerMatrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("adjugate needs a square matrix");
    const int n = m.rows;
    IntegerMatrix c(n, n);
    if (n == 1) {
        c.at(0, 0) = 1;
        return c;
    }
    IntegerMatrix minor(n - 1, n - 1);
    for (int l = 0; l < n; ++l) {
        for (int s = 0; s < n; ++s) {
            int mi = 0;
            for (int i = 0; i < n; ++i) {
                if (i == l) continue;
                int mj = 0;
                for (int j = 0; j < n; ++j) {
                    if (j == s) continue;
                    minor.at(mi, mj) = m.at(i, j);
                    ++mj;
                }
                ++mi;
            }
            Int dm = determinant(minor);
            c.at(l, s) = ((l + s) % 2 == 0) ? dm : -dm;
        }
    }
    return c;
}

/*
 * Basis of the integer kernel lattice {y in Z^n : M y = 0}.  Computed via
 * unimodular column operations (column-style Hermite reduction), so the
 * basis is automatically saturated: every integer kernel point is an
 * integer combination of the basis vectors.
 */
struct KernelBasis {
    int n = 0;
    std::vector<std::vector<Int>> basis;
};

inline KernelBasis kernel_basis(const IntegerMatrix& m) {
    const int r = m.rows, n = m.cols;
    // column-major working copies
    std::vector<std::vector<Int>> A(n, std::vector<Int>(r));
    std::vector<std::vector<Int>> U(n, std::vector<Int>(n, 0));
    for (int j = 0; j < n; ++j) {
        U[j][j] = 1;
        for (int i = 0; i < r; ++i) A[j][i] = m.at(i, j);
    }
    int c = 0;
    for (int row = 0; row < r && c < n; ++row) {
        while (true) {
            int piv = -1;
            for (int j = c; j < n; ++j) {
                if (A[j][row] != 0 && (piv < 0 || abs(A[j][row]) < abs(A[piv][row]))) piv = j;
            }
            if (piv < 0) break;
            bool clean = true;
            for (int j = c; j < n; ++j) {
                if (j == piv || A[j][row] == 0) continue;
                Int q = A[j][row] / A[piv][row];  // truncated
                if (q != 0) {
                    for (int i = 0; i < r; ++i) A[j][i] -= q * A[piv][i];
                    for (int i = 0; i < n; ++i) U[j][i] -= q * U[piv][i];
                }
                if (A[j][row] != 0) clean = false;
            }
            if (clean) {
                std::swap(A[piv], A[c]);
                std::swap(U[piv], U[c]);
                ++c;
                break;
            }
        }
    }
    KernelBasis kb;
    kb.n = n;
    for (int j = c; j < n; ++j) {
        auto v = U[j];
        // sign normalization: first nonzero entry positive
        for (const Int& x : v) {
            if (x != 0) {
                if (x < 0)
                    for (Int& y : v) y = -y;
                break;
            }
        }
        kb.basis.push_back(std::move(v));
    }
    return kb;
}

namespace detail {

inline Int dot(const std::vector<Int>& x, const std::vector<Int>& y) {
    Int s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

// Pairwise size reduction; keeps the lattice, tightens the coefficient box.
inline void size_reduce(std::vector<std::vector<Int>>& v) {
    bool changed = true;
    int passes = 0;
    while (changed && passes++ < 32) {
        changed = false;
        for (size_t i = 0; i < v.size(); ++i) {
            for (size_t j = 0; j < v.size(); ++j) {
                if (i == j) continue;
                Int num = dot(v[i], v[j]);
                Int den = dot(v[j], v[j]);
                if (den == 0) continue;
                // round(num/den)
                Int rnum = 2 * num + den;
                Int rden = 2 * den;
                Int t;
                mpz_fdiv_q(t.get_mpz_t(), rnum.get_mpz_t(), rden.get_mpz_t());
                if (t != 0) {
                    Int before = dot(v[i], v[i]);
                    std::vector<Int> w = v[i];
                    for (size_t k = 0; k < w.size(); ++k) w[k] -= t * v[j][k];
                    Int after = dot(w, w);
                    if (after < before) {
                        v[i] = std::move(w);
                        changed = true;
                    }
                }
            }
        }
    }
}

inline void count_box_dfs(const std::vector<std::vector<Int>>& v, const std::vector<Int>& bounds,
                          const std::vector<std::vector<Int>>& slack, size_t level,
                          std::vector<Int>& y, const Int& B, Int& count) {
    const size_t k = v.size();
    const size_t n = y.size();
    if (level == k) {
        for (size_t j = 0; j < n; ++j)
            if (abs(y[j]) > B) return;
        count += 1;
        return;
    }
    Int lo = -bounds[level], hi = bounds[level];
    std::vector<Int> ysave = y;
    for (size_t j = 0; j < n; ++j) y[j] = ysave[j] + lo * v[level][j];
    for (Int c = lo; c <= hi; ++c) {
        bool ok = true;
        for (size_t j = 0; j < n; ++j) {
            if (abs(y[j]) > B + slack[level][j]) {
                ok = false;
                break;
            }
        }
        if (ok) count_box_dfs(v, bounds, slack, level + 1, y, B, count);
        if (c < hi)
            for (size_t j = 0; j < n; ++j) y[j] += v[level][j];
    }
    y = ysave;
}

}  // namespace detail

/*
 * Exact number of integer points y with M y = 0 and |y|_inf <= B, by
 * depth-first enumeration over the saturated kernel basis.  Coefficient
 * bounds come from the exact pseudo-inverse: c = G^{-1} V y with G = V V^T,
 * so |c_i| <= B * sum_j |(adj(G)^T V)_{ij}| / det G.
 */
inline Int count_kernel_points_in_box(const IntegerMatrix& m, long B) {
    if (B < 0) throw std::invalid_argument("B must be >= 0");
    if (B == 0) return 1;  // the box is {0}
    auto kb = kernel_basis(m);
    const int n = kb.n;
    const size_t k = kb.basis.size();
    if (k == 0) return 1;  // only y = 0
    if (static_cast<int>(k) == n) {
        // kernel is all of Z^n
        return pow_int(Int(2 * B + 1), static_cast<unsigned>(n));
    }
    auto v = kb.basis;
    detail::size_reduce(v);
    IntegerMatrix V(static_cast<int>(k), n);
    for (size_t i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) V.at(static_cast<int>(i), j) = v[i][j];
    IntegerMatrix G = matmul(V, transpose(V));
    Int detG = determinant(G);
    if (detG == 0) throw std::logic_error("kernel basis not independent");
    IntegerMatrix W = matmul(transpose(adjugate(G)), V);  // G^{-1} V * detG
    Int adetG = abs(detG);
    std::vector<Int> bounds(k);
    for (size_t i = 0; i < k; ++i) {
        Int s = 0;
        for (int j = 0; j < n; ++j) s += abs(W.at(static_cast<int>(i), j));
        // floor(s*B/|detG|)
        mpz_fdiv_q(bounds[i].get_mpz_t(), Int(s * B).get_mpz_t(), adetG.get_mpz_t());
    }
    // suffix slack for pruning: after fixing levels <= t, coordinate j can
    // still move by at most sum_{i>t} bounds_i*|v_ij|
    std::vector<std::vector<Int>> slack(k + 1, std::vector<Int>(n, 0));
    for (size_t t = k; t-- > 0;) {
        for (int j = 0; j < n; ++j) slack[t][j] = slack[t + 1][j] + bounds[t] * abs(v[t][j]);
    }
    // slack[level] used before the level'th coefficient is fixed
    std::vector<std::vector<Int>> slack_at(k);
    for (size_t t = 0; t < k; ++t) slack_at[t] = slack[t + 1];
    std::vector<Int> y(n, 0);
    Int count = 0;
    detail::count_box_dfs(v, bounds, slack_at, 0, y, Int(B), count);
    return count;
}

}  // namespace hessforms

#endif
