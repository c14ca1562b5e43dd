#pragma once

// Exact arithmetic in GF(p^k). Elements are polynomials over GF(p) reduced
// by a fixed irreducible modulus, so the same (p, k) always yields the same
// field, element order and trace values across runs. Multiplication and
// inversion go through log/antilog tables built once at field creation.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "steersim/errors.hpp"

namespace steersim::ff {

inline constexpr int kMaxFieldSize = 4096;

// Coefficients of the polynomial representation, c[0] + c[1] x + ..., each in [0, p).
struct FieldElement {
    std::vector<int> coeffs;

    bool operator==(const FieldElement& o) const { return coeffs == o.coeffs; }
};

namespace detail {

inline bool is_prime(int p) {
    if (p < 2) return false;
    for (int f = 2; f * f <= p; ++f)
        if (p % f == 0) return false;
    return true;
}

// Known moduli (low-to-high coefficients, monic). Any (p, k) not listed
// falls back to the lexicographically smallest monic irreducible, which is
// equally deterministic.
inline std::vector<int> modulus_table(int p, int k) {
    if (p == 2 && k == 2) return {1, 1, 1};        // x^2 + x + 1
    if (p == 2 && k == 3) return {1, 1, 0, 1};     // x^3 + x + 1
    if (p == 2 && k == 4) return {1, 1, 0, 0, 1};  // x^4 + x + 1
    if (p == 3 && k == 2) return {1, 0, 1};        // x^2 + 1
    if (p == 3 && k == 3) return {1, 2, 0, 1};     // x^3 + 2x + 1
    if (p == 5 && k == 2) return {2, 0, 1};        // x^2 + 2
    if (p == 7 && k == 2) return {1, 0, 1};        // x^2 + 1
    return {};
}

// Remainder of a by b over GF(p); b monic.
inline std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& b, int p) {
    const int db = static_cast<int>(b.size()) - 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
        const int f = a[i];
        if (f == 0) continue;
        for (int j = 0; j <= db; ++j) {
            a[i - db + j] = ((a[i - db + j] - f * b[j]) % p + p * p) % p;
        }
    }
    a.resize(db, 0);
    return a;
}

inline std::vector<int> poly_mul_mod(const std::vector<int>& a, const std::vector<int>& b,
                                     const std::vector<int>& modulus, int p) {
    std::vector<int> prod(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
    }
    return poly_mod(std::move(prod), modulus, p);
}

inline bool poly_is_zero(const std::vector<int>& a) {
    for (int c : a)
        if (c != 0) return false;
    return true;
}

// Exhaustive trial division: a degree-k reducible polynomial has a monic
// factor of degree <= k/2. Fine at the sizes in scope.
inline bool poly_irreducible(const std::vector<int>& f, int p) {
    const int k = static_cast<int>(f.size()) - 1;
    if (k < 1 || f[k] != 1) return false;
    for (int dd = 1; dd <= k / 2; ++dd) {
        long long count = 1;
        for (int i = 0; i < dd; ++i) count *= p;
        for (long long c = 0; c < count; ++c) {
            std::vector<int> div(dd + 1, 0);
            long long t = c;
            for (int i = 0; i < dd; ++i) {
                div[i] = static_cast<int>(t % p);
                t /= p;
            }
            div[dd] = 1;
            if (poly_is_zero(poly_mod(f, div, p))) return false;
        }
    }
    return true;
}

inline std::vector<int> find_modulus(int p, int k) {
    if (k == 1) return {0, 1};  // plain x: arithmetic is mod p
    auto tab = modulus_table(p, k);
    if (!tab.empty()) return tab;
    long long count = 1;
    for (int i = 0; i < k; ++i) count *= p;
    for (long long c = 0; c < count; ++c) {
        std::vector<int> f(k + 1, 0);
        long long t = c;
        for (int i = 0; i < k; ++i) {
            f[i] = static_cast<int>(t % p);
            t /= p;
        }
        f[k] = 1;
        if (poly_irreducible(f, p)) return f;
    }
    throw error("no irreducible modulus found");  // unreachable for valid (p,k)
}

}  // namespace detail

class Field {
  public:
    Field(int p, int k) : p_(p), k_(k) {
        if (k < 1) throw unsupported_size("field: extension degree must be >= 1");
        if (!detail::is_prime(p)) throw not_prime("field: characteristic " + std::to_string(p) + " is not prime");
        long long q = 1;
        for (int i = 0; i < k; ++i) {
            q *= p;
            if (q > kMaxFieldSize) throw unsupported_size("field: p^k exceeds supported size");
        }
        q_ = static_cast<int>(q);
        modulus_ = detail::find_modulus(p, k);
        if (k_ > 1 && !detail::poly_irreducible(modulus_, p_)) throw error("field: modulus is reducible");
        build_tables();
    }

    int p() const { return p_; }
    int k() const { return k_; }
    int q() const { return q_; }
    const std::vector<int>& modulus() const { return modulus_; }

    FieldElement zero() const { return element(0); }
    FieldElement one() const { return element(1); }

    // Element with base-p digit expansion idx = sum_i c_i p^i.
    FieldElement element(int idx) const {
        check_index(idx);
        FieldElement e;
        e.coeffs.resize(k_);
        for (int i = 0; i < k_; ++i) {
            e.coeffs[i] = idx % p_;
            idx /= p_;
        }
        return e;
    }

    int index_of(const FieldElement& a) const {
        check_element(a);
        int idx = 0;
        for (int i = k_ - 1; i >= 0; --i) idx = idx * p_ + a.coeffs[i];
        return idx;
    }

    FieldElement add(const FieldElement& a, const FieldElement& b) const {
        check_element(a);
        check_element(b);
        FieldElement out;
        out.coeffs.resize(k_);
        for (int i = 0; i < k_; ++i) out.coeffs[i] = (a.coeffs[i] + b.coeffs[i]) % p_;
        return out;
    }

    FieldElement negate(const FieldElement& a) const {
        check_element(a);
        FieldElement out;
        out.coeffs.resize(k_);
        for (int i = 0; i < k_; ++i) out.coeffs[i] = (p_ - a.coeffs[i]) % p_;
        return out;
    }

    FieldElement sub(const FieldElement& a, const FieldElement& b) const { return add(a, negate(b)); }

    FieldElement mul(const FieldElement& a, const FieldElement& b) const {
        const int ia = index_of(a), ib = index_of(b);
        if (ia == 0 || ib == 0) return zero();
        return element(antilog_[(log_[ia] + log_[ib]) % (q_ - 1)]);
    }

    FieldElement inv(const FieldElement& a) const {
        const int ia = index_of(a);
        if (ia == 0) throw division_by_zero("field: inverse of zero");
        return element(antilog_[(q_ - 1 - log_[ia]) % (q_ - 1)]);
    }

    FieldElement pow(const FieldElement& a, long long e) const {
        const int ia = index_of(a);
        if (ia == 0) {
            if (e == 0) return one();
            return zero();
        }
        long long t = (static_cast<long long>(log_[ia]) * (e % (q_ - 1))) % (q_ - 1);
        if (t < 0) t += q_ - 1;
        return element(antilog_[t]);
    }

    // Tr(a) = a + a^p + ... + a^{p^(k-1)}, an element of the prime subfield,
    // returned as an integer in [0, p).
    int trace(const FieldElement& a) const {
        FieldElement acc = a;
        FieldElement t = a;
        long long pe = p_;
        for (int i = 1; i < k_; ++i) {
            t = pow(a, pe);
            acc = add(acc, t);
            pe *= p_;
        }
        for (int i = 1; i < k_; ++i)
            if (acc.coeffs[i] != 0) throw error("field: trace left the prime subfield");
        return acc.coeffs[0];
    }

  private:
    void check_index(int idx) const {
        if (idx < 0 || idx >= q_) throw index_out_of_range("field: element index out of range");
    }
    void check_element(const FieldElement& a) const {
        if (static_cast<int>(a.coeffs.size()) != k_) throw dimension_mismatch("field: wrong coefficient count");
        for (int c : a.coeffs)
            if (c < 0 || c >= p_) throw invalid_state("field: coefficient out of range");
    }

    std::vector<int> raw_mul(const std::vector<int>& a, const std::vector<int>& b) const {
        return detail::poly_mul_mod(a, b, k_ == 1 ? std::vector<int>{0, 1} : modulus_, p_);
    }

    int raw_index(const std::vector<int>& c) const {
        int idx = 0;
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) idx = idx * p_ + c[i];
        return idx;
    }

    void build_tables() {
        log_.assign(q_, -1);
        antilog_.assign(q_ - 1, 0);
        // Find a generator of the multiplicative group by direct order test.
        for (int g = 1; g < q_; ++g) {
            std::vector<int> gc(k_);
            int t = g;
            for (int i = 0; i < k_; ++i) {
                gc[i] = t % p_;
                t /= p_;
            }
            std::vector<int> cur(k_, 0);
            cur[0] = 1;
            int order = 0;
            std::vector<int> seen;
            seen.reserve(q_ - 1);
            do {
                seen.push_back(raw_index(cur));
                cur = raw_mul(cur, gc);
                ++order;
            } while (raw_index(cur) != 1 && order < q_);
            if (order == q_ - 1) {
                for (int e = 0; e < q_ - 1; ++e) {
                    antilog_[e] = seen[e];
                    log_[seen[e]] = e;
                }
                return;
            }
        }
        throw error("field: no multiplicative generator found");  // unreachable
    }

    int p_, k_, q_;
    std::vector<int> modulus_;
    std::vector<int> log_, antilog_;
};

inline Field field_create(int p, int k) { return Field(p, k); }

inline FieldElement gf_add(const Field& f, const FieldElement& a, const FieldElement& b) { return f.add(a, b); }
inline FieldElement gf_mul(const Field& f, const FieldElement& a, const FieldElement& b) { return f.mul(a, b); }
inline FieldElement gf_inv(const Field& f, const FieldElement& a) { return f.inv(a); }
inline int gf_trace(const Field& f, const FieldElement& a) { return f.trace(a); }

}  // namespace steersim::ff
