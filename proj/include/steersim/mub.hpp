#pragma once

// Complete families of d+1 mutually unbiased bases for prime-power d.
//
// Odd prime powers use the finite-field construction with phases
// omega_p^Tr(b j^2 + a j) over GF(p^k). Even prime powers (d = 2, 4, 8) use
// the Galois-ring construction over GR(4, k) with fourth-root phases
// i^tr((b + 2a) j), j running over the Teichmuller set. Basis 0 is always
// the computational basis. The contract is verify_mub, not any particular
// phase convention.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "steersim/errors.hpp"
#include "steersim/finite_field.hpp"
#include "steersim/qlinalg.hpp"

namespace steersim::mub {

inline constexpr std::array<int, 9> kSupportedDims = {2, 3, 4, 5, 7, 8, 9, 11, 13};

inline bool dimension_supported(int d) {
    for (int s : kSupportedDims)
        if (s == d) return true;
    return false;
}

struct Basis {
    int d = 0;
    int label = 0;  // 0 = computational, 1..d = conjugate-type bases
    std::vector<la::CVec> vectors;
};

struct MubFamily {
    int d = 0;
    std::vector<Basis> bases;
};

struct VerifyReport {
    double max_orthonormality_dev = 0.0;
    double max_unbiasedness_dev = 0.0;
    double tol = 0.0;
    bool pass = false;
};

namespace detail {

// Minimal Galois ring GR(4, k) = Z4[x]/(f), f the Hensel lift of the GF(2)
// modulus, for k = 1, 2, 3. Elements are coefficient vectors mod 4.
class GaloisRing4 {
  public:
    using Elem = std::vector<int>;

    explicit GaloisRing4(int k) : k_(k) {
        switch (k) {
            case 1: mod_ = {3, 1}; break;           // x + 3  (xi = 1)
            case 2: mod_ = {1, 1, 1}; break;        // x^2 + x + 1
            case 3: mod_ = {3, 1, 2, 1}; break;     // x^3 + 2x^2 + x + 3
            default: throw unsupported_size("galois ring: k must be 1, 2 or 3");
        }
        const int units = (1 << k_) - 1;
        teich_.push_back(Elem(k_, 0));
        Elem xi(k_, 0);
        if (k_ == 1) {
            xi[0] = 1;
        } else {
            xi[1] = 1;
        }
        Elem cur(k_, 0);
        cur[0] = 1;
        for (int i = 0; i < units; ++i) {
            teich_.push_back(cur);
            cur = mul(cur, xi);
        }
        if (cur != teich_[1]) throw error("galois ring: xi does not have order 2^k - 1");
        // Teichmuller reps reduce mod 2 to distinct GF(2^k) elements.
        lift_.assign(1 << k_, -1);
        for (int i = 0; i < static_cast<int>(teich_.size()); ++i) {
            int bits = 0;
            for (int j = k_ - 1; j >= 0; --j) bits = bits * 2 + (teich_[i][j] & 1);
            if (lift_[bits] != -1) throw error("galois ring: Teichmuller residues collide");
            lift_[bits] = i;
        }
    }

    int k() const { return k_; }
    int teich_count() const { return static_cast<int>(teich_.size()); }
    const Elem& teich(int idx) const { return teich_[idx]; }

    Elem add(const Elem& a, const Elem& b) const {
        Elem out(k_);
        for (int i = 0; i < k_; ++i) out[i] = (a[i] + b[i]) & 3;
        return out;
    }

    Elem twice(const Elem& a) const {
        Elem out(k_);
        for (int i = 0; i < k_; ++i) out[i] = (2 * a[i]) & 3;
        return out;
    }

    Elem mul(const Elem& a, const Elem& b) const {
        std::vector<int> prod(2 * k_ - 1, 0);
        for (int i = 0; i < k_; ++i) {
            if (a[i] == 0) continue;
            for (int j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) & 3;
        }
        for (int i = static_cast<int>(prod.size()) - 1; i >= k_; --i) {
            const int f = prod[i];
            if (f == 0) continue;
            for (int j = 0; j <= k_; ++j) prod[i - k_ + j] = (prod[i - k_ + j] - f * mod_[j]) % 4;
        }
        Elem out(k_);
        for (int i = 0; i < k_; ++i) out[i] = ((prod[i] % 4) + 4) % 4;
        return out;
    }

    // y = a + 2b with a, b Teichmuller; the Frobenius maps y to a^2 + 2 b^2.
    Elem frobenius(const Elem& y) const {
        int abits = 0;
        for (int j = k_ - 1; j >= 0; --j) abits = abits * 2 + (y[j] & 1);
        const Elem& a = teich_[lift_[abits]];
        int bbits = 0;
        for (int j = k_ - 1; j >= 0; --j) {
            const int r = ((y[j] - a[j]) % 4 + 4) % 4;  // even by construction
            bbits = bbits * 2 + ((r / 2) & 1);
        }
        const Elem& b = teich_[lift_[bbits]];
        return add(mul(a, a), twice(mul(b, b)));
    }

    // Ring trace into Z4.
    int trace(const Elem& y) const {
        Elem acc = y;
        Elem z = y;
        for (int i = 1; i < k_; ++i) {
            z = frobenius(z);
            acc = add(acc, z);
        }
        for (int i = 1; i < k_; ++i)
            if (acc[i] != 0) throw error("galois ring: trace left Z4");
        return acc[0];
    }

  private:
    int k_;
    std::vector<int> mod_;
    std::vector<Elem> teich_;
    std::vector<int> lift_;
};

inline bool prime_power(int d, int& p, int& k) {
    for (int cand = 2; cand <= d; ++cand) {
        if (!ff::detail::is_prime(cand)) continue;
        int q = cand, kk = 1;
        while (q < d) {
            q *= cand;
            ++kk;
        }
        if (q == d) {
            p = cand;
            k = kk;
            return true;
        }
    }
    return false;
}

inline Basis computational_basis(int d) {
    Basis b;
    b.d = d;
    b.label = 0;
    b.vectors.assign(d, la::CVec(d, la::Cx{0.0, 0.0}));
    for (int a = 0; a < d; ++a) b.vectors[a][a] = 1.0;
    return b;
}

}  // namespace detail

inline MubFamily build_mubs(int d) {
    if (!dimension_supported(d))
        throw unsupported_dimension("build_mubs: dimension " + std::to_string(d) + " is not a supported prime power");
    int p = 0, k = 0;
    detail::prime_power(d, p, k);

    MubFamily fam;
    fam.d = d;
    fam.bases.reserve(d + 1);
    fam.bases.push_back(detail::computational_basis(d));

    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    if (p == 2) {
        const detail::GaloisRing4 ring(k);
        static const std::array<la::Cx, 4> kI = {la::Cx{1, 0}, la::Cx{0, 1}, la::Cx{-1, 0}, la::Cx{0, -1}};
        for (int x = 1; x <= d; ++x) {
            Basis basis;
            basis.d = d;
            basis.label = x;
            basis.vectors.assign(d, la::CVec(d));
            const auto& b = ring.teich(x % d);
            for (int a = 0; a < d; ++a) {
                const auto ba = ring.add(b, ring.twice(ring.teich(a)));
                for (int j = 0; j < d; ++j) {
                    const int t = ring.trace(ring.mul(ba, ring.teich(j)));
                    basis.vectors[a][j] = scale * kI[t];
                }
            }
            fam.bases.push_back(std::move(basis));
        }
        return fam;
    }

    const ff::Field field(p, k);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const double two_pi_over_p = kTwoPi / p;
    std::array<la::Cx, 16> omega{};
    for (int t = 0; t < p; ++t) omega[t] = la::Cx{std::cos(two_pi_over_p * t), std::sin(two_pi_over_p * t)};

    for (int x = 1; x <= d; ++x) {
        Basis basis;
        basis.d = d;
        basis.label = x;
        basis.vectors.assign(d, la::CVec(d));
        const auto b = field.element(x % d);
        for (int a = 0; a < d; ++a) {
            const auto ea = field.element(a);
            for (int j = 0; j < d; ++j) {
                const auto ej = field.element(j);
                const int t =
                    (field.trace(field.mul(b, field.mul(ej, ej))) + field.trace(field.mul(ea, ej))) % p;
                basis.vectors[a][j] = scale * omega[t];
            }
        }
        fam.bases.push_back(std::move(basis));
    }
    return fam;
}

inline VerifyReport verify_mub(const MubFamily& fam, double tol) {
    VerifyReport rep;
    rep.tol = tol;
    const double target = fam.d > 0 ? 1.0 / std::sqrt(static_cast<double>(fam.d)) : 0.0;
    for (std::size_t x = 0; x < fam.bases.size(); ++x) {
        const auto& bx = fam.bases[x];
        for (int a = 0; a < fam.d; ++a) {
            for (int b = a; b < fam.d; ++b) {
                const double ov = std::abs(la::inner(bx.vectors[a], bx.vectors[b]));
                const double want = (a == b) ? 1.0 : 0.0;
                rep.max_orthonormality_dev = std::max(rep.max_orthonormality_dev, std::abs(ov - want));
            }
        }
        for (std::size_t y = x + 1; y < fam.bases.size(); ++y) {
            const auto& by = fam.bases[y];
            for (int a = 0; a < fam.d; ++a)
                for (int b = 0; b < fam.d; ++b) {
                    const double ov = std::abs(la::inner(bx.vectors[a], by.vectors[b]));
                    rep.max_unbiasedness_dev = std::max(rep.max_unbiasedness_dev, std::abs(ov - target));
                }
        }
    }
    rep.pass = rep.max_orthonormality_dev <= tol && rep.max_unbiasedness_dev <= tol;
    return rep;
}

// Bob's measurement bases: every amplitude conjugated. An involution, and
// unbiasedness is preserved since overlaps only change by conjugation.
inline MubFamily conjugate_family(const MubFamily& fam) {
    MubFamily out;
    out.d = fam.d;
    out.bases.reserve(fam.bases.size());
    for (const auto& b : fam.bases) {
        Basis nb;
        nb.d = b.d;
        nb.label = b.label;
        nb.vectors.reserve(b.vectors.size());
        for (const auto& v : b.vectors) nb.vectors.push_back(la::conjugated(v));
        out.bases.push_back(std::move(nb));
    }
    return out;
}

}  // namespace steersim::mub
