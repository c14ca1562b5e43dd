#pragma once

// The n-setting steering functional and its bounds. Alice projects onto
// MUB vectors; Bob's measurement is the projector onto the conjugated
// vector, which realizes the transposed operator on his side. The quantum
// bound is d+1 (the number of settings), the local-hidden-state bound is
// 1 + sqrt(d), and the violation degree is their ratio.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "steersim/errors.hpp"
#include "steersim/mub.hpp"
#include "steersim/qlinalg.hpp"
#include "steersim/states.hpp"

namespace steersim::steering {

struct SteeringReport {
    int d = 0;
    int n_settings = 0;
    double S = 0.0;
    double S_sigma = 0.0;  // 0 for exact evaluation
    double lhs_bound = std::numeric_limits<double>::quiet_NaN();
    double quantum_bound = std::numeric_limits<double>::quiet_NaN();
    double violation = std::numeric_limits<double>::quiet_NaN();
    double violation_sigma = std::numeric_limits<double>::quiet_NaN();
    bool bounds_available = false;  // false for partial-family runs
};

inline double lhs_bound(int d) {
    if (d < 2) throw unsupported_dimension("lhs_bound: d must be >= 2");
    return 1.0 + std::sqrt(static_cast<double>(d));
}

inline double quantum_bound(int d) {
    if (d < 2) throw unsupported_dimension("quantum_bound: d must be >= 2");
    return d + 1.0;
}

// Theoretical violation (1 + d) / (1 + sqrt(d)); unbounded in d.
inline double violation(int d) { return quantum_bound(d) / lhs_bound(d); }

inline double violation_from_S(double S, int d) {
    if (S < 0.0) throw invalid_state("violation_from_S: S must be nonnegative");
    return S / lhs_bound(d);
}

// Ceiling of the 2-setting criteria: 2 / (1 + 1/sqrt(d)) < 2.
inline double two_setting_violation_max(int d) {
    if (d < 2) throw unsupported_dimension("two_setting_violation_max: d must be >= 2");
    return 2.0 / (1.0 + 1.0 / std::sqrt(static_cast<double>(d)));
}

// Closed form of the functional on the isotropic state.
inline double s_iso_theory(int d, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw bad_probability("s_iso_theory: p must lie in [0, 1]");
    if (d < 2) throw unsupported_dimension("s_iso_theory: d must be >= 2");
    return (d + 1.0) * (p + (1.0 - p) / d);
}

// Smallest entangled fraction that still violates: (d^{3/2} - 1)/(d^2 - 1).
inline double p_min_theory(int d) {
    if (d < 2) throw unsupported_dimension("p_min_theory: d must be >= 2");
    const double dd = d;
    return (dd * std::sqrt(dd) - 1.0) / (dd * dd - 1.0);
}

// 2-setting counterpart (1/2)[1 + (sqrt(d)-1)/(d-1)]; stays above 1/2.
inline double p_min_two_setting(int d) {
    if (d < 2) throw unsupported_dimension("p_min_two_setting: d must be >= 2");
    const double dd = d;
    return 0.5 * (1.0 + (std::sqrt(dd) - 1.0) / (dd - 1.0));
}

// sigma_{a|x} = Tr_A[(proj x I) rho] and its trace.
inline std::pair<la::Mat, double> conditional_state(const states::BipartiteState& state, const la::Mat& proj) {
    const int d = state.d;
    if (proj.dim() != d) throw dimension_mismatch("conditional_state: projector dimension mismatch");
    const la::Mat& rho = state.rho.mat();
    la::Mat sigma(d);
    for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp) {
            la::Cx s{0.0, 0.0};
            for (int i = 0; i < d; ++i)
                for (int m = 0; m < d; ++m) s += proj(i, m) * rho(m * d + j, i * d + jp);
            sigma(j, jp) = s;
        }
    const double prob = sigma.trace().real();
    return {std::move(sigma), prob};
}

namespace detail {

inline void check_family(const states::BipartiteState& state, const mub::MubFamily& fam) {
    if (fam.d != state.d) throw dimension_mismatch("steering: family and state dimensions differ");
}

}  // namespace detail

// P(a,b | x,x) = Tr[(P_a x P_b^T) rho]: Alice projects onto the family
// vector, Bob onto its complex conjugate.
inline double joint_prob_pair(const states::BipartiteState& state, const mub::MubFamily& fam, int x, int a, int b) {
    detail::check_family(state, fam);
    if (x < 0 || x >= static_cast<int>(fam.bases.size())) throw index_out_of_range("joint_prob: setting index");
    if (a < 0 || a >= fam.d || b < 0 || b >= fam.d) throw index_out_of_range("joint_prob: outcome index");
    const la::CVec v = la::kron_vec(fam.bases[x].vectors[a], la::conjugated(fam.bases[x].vectors[b]));
    return la::quad_form(state.rho.mat(), v);
}

inline double joint_prob(const states::BipartiteState& state, const mub::MubFamily& fam, int x, int a) {
    return joint_prob_pair(state, fam, x, a, a);
}

// Full d x d outcome table for one setting, row-major in (a, b). Tiny
// negative residues from the quadratic form are clamped to zero.
inline std::vector<double> joint_prob_table(const states::BipartiteState& state, const mub::MubFamily& fam, int x) {
    detail::check_family(state, fam);
    if (x < 0 || x >= static_cast<int>(fam.bases.size())) throw index_out_of_range("joint_prob_table: setting index");
    const int d = fam.d;
    std::vector<double> table(static_cast<std::size_t>(d) * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double p = joint_prob_pair(state, fam, x, a, b);
            if (p < 0.0 && p > -1e-12) p = 0.0;
            table[static_cast<std::size_t>(a) * d + b] = p;
        }
    return table;
}

inline SteeringReport steering_functional_partial(const states::BipartiteState& state, const mub::MubFamily& fam,
                                                  int n_settings) {
    detail::check_family(state, fam);
    if (n_settings < 1 || n_settings > static_cast<int>(fam.bases.size()))
        throw index_out_of_range("steering_functional: bad setting count");
    SteeringReport rep;
    rep.d = fam.d;
    rep.n_settings = n_settings;
    double s = 0.0;
    for (int x = 0; x < n_settings; ++x)
        for (int a = 0; a < fam.d; ++a) s += joint_prob(state, fam, x, a);
    rep.S = s;
    if (n_settings == fam.d + 1) {
        rep.bounds_available = true;
        rep.lhs_bound = lhs_bound(fam.d);
        rep.quantum_bound = quantum_bound(fam.d);
        rep.violation = rep.S / rep.lhs_bound;
        rep.violation_sigma = 0.0;
    }
    return rep;
}

// S = sum over all d+1 settings and outcomes of P(a,a|x,x).
inline SteeringReport steering_functional(const states::BipartiteState& state, const mub::MubFamily& fam) {
    return steering_functional_partial(state, fam, static_cast<int>(fam.bases.size()));
}

namespace detail {

// Deterministic-LHS objective: f(psi) = sum_x max_a |<phi_x^a|psi>|^2.
inline double lhs_objective(const mub::MubFamily& fam, const la::CVec& psi, std::vector<int>* active = nullptr) {
    double f = 0.0;
    if (active) active->assign(fam.bases.size(), 0);
    for (std::size_t x = 0; x < fam.bases.size(); ++x) {
        double best = 0.0;
        int besta = 0;
        for (int a = 0; a < fam.d; ++a) {
            const double w = std::norm(la::inner(fam.bases[x].vectors[a], psi));
            if (w > best) {
                best = w;
                besta = a;
            }
        }
        f += best;
        if (active) (*active)[x] = besta;
    }
    return f;
}

// Minorize-maximize ascent: freeze the active outcome per setting, power-
// iterate on the sum of active projectors (monotone in the objective),
// refresh the active set, repeat.
inline double lhs_ascent(const mub::MubFamily& fam, la::CVec psi, double tol, int max_iter = 500) {
    std::vector<int> active;
    double f = lhs_objective(fam, psi, &active);
    for (int it = 0; it < max_iter; ++it) {
        la::CVec next(psi.size(), la::Cx{0.0, 0.0});
        for (std::size_t x = 0; x < fam.bases.size(); ++x) {
            const auto& v = fam.bases[x].vectors[active[x]];
            const la::Cx c = la::inner(v, psi);
            for (std::size_t i = 0; i < next.size(); ++i) next[i] += c * v[i];
        }
        const double n = la::norm(next);
        if (n <= 0.0) break;
        for (auto& c : next) c /= n;
        psi = std::move(next);
        const double fnew = lhs_objective(fam, psi, &active);
        if (fnew <= f + tol) {
            f = std::max(f, fnew);
            break;
        }
        f = fnew;
    }
    return f;
}

}  // namespace detail

// Brute-force oracle for the best deterministic-LHS value over pure states.
// Multi-restart ascent, plus an exhaustive Bloch-sphere grid for d = 2.
// Always bounded by 1 + sqrt(d) up to tol.
inline double lhs_max_numeric(const mub::MubFamily& fam, int restarts, double tol, std::uint64_t seed = 20612) {
    if (restarts < 1) throw invalid_state("lhs_max_numeric: restarts must be >= 1");
    const int d = fam.d;
    double best = 0.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int r = 0; r < restarts; ++r) {
        la::CVec psi(d);
        for (auto& c : psi) c = la::Cx{gauss(rng), gauss(rng)};
        psi = la::normalized(psi);
        best = std::max(best, detail::lhs_ascent(fam, std::move(psi), tol));
    }
    if (d == 2) {
        constexpr double kPi = 3.14159265358979323846264338328;
        const int nt = 600, np = 1200;
        la::CVec psi(2);
        la::CVec seed_best(2);
        double grid_best = -1.0;
        for (int i = 0; i <= nt; ++i) {
            const double theta = kPi * i / nt;
            const double c0 = std::cos(0.5 * theta), s0 = std::sin(0.5 * theta);
            for (int j = 0; j < np; ++j) {
                const double phi = 2.0 * kPi * j / np;
                psi[0] = la::Cx{c0, 0.0};
                psi[1] = la::Cx{s0 * std::cos(phi), s0 * std::sin(phi)};
                const double f = detail::lhs_objective(fam, psi);
                if (f > grid_best) {
                    grid_best = f;
                    seed_best = psi;
                }
            }
        }
        best = std::max(best, detail::lhs_ascent(fam, seed_best, tol));
    }
    return best;
}

}  // namespace steersim::steering
