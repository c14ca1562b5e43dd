#pragma once

// Factories for the bipartite qudit states used throughout: maximally
// entangled, isotropic mixtures, spiral-bandwidth SPDC states, Procrustean
// concentration and a nearest-neighbour crosstalk channel on Bob's side.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "steersim/errors.hpp"
#include "steersim/qlinalg.hpp"

namespace steersim::states {

// OAM mode indices backing the computational basis, in increasing order.
// Odd d: -(d-1)/2 .. (d-1)/2. Even d: -d/2 .. d/2 with l = 0 omitted.
struct ModeLabels {
    int d = 0;
    std::vector<int> labels;
};

inline ModeLabels mode_labels(int d) {
    if (d < 1) throw unsupported_dimension("mode_labels: d must be >= 1");
    ModeLabels m;
    m.d = d;
    if (d % 2 == 1) {
        const int half = (d - 1) / 2;
        for (int l = -half; l <= half; ++l) m.labels.push_back(l);
    } else {
        const int half = d / 2;
        for (int l = -half; l <= half; ++l)
            if (l != 0) m.labels.push_back(l);
    }
    return m;
}

// Schmidt amplitudes c_l of the two-photon state, keyed by OAM index.
struct SpiralSpectrum {
    std::map<int, la::Cx> amplitudes;
};

inline SpiralSpectrum flat_spectrum(const ModeLabels& labels) {
    SpiralSpectrum s;
    for (int l : labels.labels) s.amplitudes[l] = 1.0;
    return s;
}

inline SpiralSpectrum gaussian_spectrum(const ModeLabels& labels, double sigma) {
    if (!(sigma > 0.0)) throw config_error("gaussian_spectrum: sigma must be positive");
    SpiralSpectrum s;
    for (int l : labels.labels) s.amplitudes[l] = std::exp(-static_cast<double>(l) * l / (2.0 * sigma * sigma));
    return s;
}

struct BipartiteState {
    int d = 0;
    la::DensityOperator rho;  // on the d*d space, index = alice*d + bob
    ModeLabels labels;
};

namespace detail {

inline BipartiteState from_pure(int d, const la::CVec& psi, ModeLabels labels) {
    return BipartiteState{d, la::DensityOperator(la::Mat::outer(psi, psi)), std::move(labels)};
}

// Pure-state vector extraction: the dominant eigenvector, with the phase
// fixed so the largest-magnitude component is real positive.
inline la::CVec pure_vector(const BipartiteState& s, double purity_tol = 1e-8) {
    if (std::abs(s.rho.purity() - 1.0) > purity_tol) throw invalid_state("state is not pure");
    auto [evals, vecs] = la::hermitian_eigensystem(s.rho.mat());
    const int n = s.rho.dim();
    la::CVec psi(n);
    for (int r = 0; r < n; ++r) psi[r] = vecs(r, n - 1);
    int imax = 0;
    double best = 0.0;
    for (int r = 0; r < n; ++r)
        if (std::abs(psi[r]) > best) {
            best = std::abs(psi[r]);
            imax = r;
        }
    const la::Cx ph = psi[imax] / std::abs(psi[imax]);
    for (auto& c : psi) c /= ph;
    return psi;
}

// The two "brick wall" pairing permutations whose mixture with the identity
// realizes a reflected nearest-neighbour random walk on mode indices:
// T1 swaps (0,1), (2,3), ...; T2 swaps (1,2), (3,4), ...
inline std::pair<la::Mat, la::Mat> pairing_permutations(int d) {
    la::Mat t1(d), t2(d);
    std::vector<int> p1(d), p2(d);
    for (int i = 0; i < d; ++i) p1[i] = p2[i] = i;
    for (int i = 0; i + 1 < d; i += 2) std::swap(p1[i], p1[i + 1]);
    for (int i = 1; i + 1 < d; i += 2) std::swap(p2[i], p2[i + 1]);
    for (int i = 0; i < d; ++i) {
        t1(p1[i], i) = 1.0;
        t2(p2[i], i) = 1.0;
    }
    return {t1, t2};
}

// Single-system crosstalk channel on a d-dim operator.
inline la::Mat crosstalk_single(const la::Mat& rho, double eps) {
    const int d = rho.dim();
    auto [t1, t2] = pairing_permutations(d);
    la::Mat out = (la::Cx{1.0 - 2.0 * eps, 0.0}) * rho;
    out += (la::Cx{eps, 0.0}) * (t1 * rho * t1.adjoint());
    out += (la::Cx{eps, 0.0}) * (t2 * rho * t2.adjoint());
    return out;
}

}  // namespace detail

inline BipartiteState max_entangled(int d) {
    if (d < 2) throw unsupported_dimension("max_entangled: d must be >= 2");
    la::CVec psi(static_cast<std::size_t>(d) * d, la::Cx{0.0, 0.0});
    const double a = 1.0 / std::sqrt(static_cast<double>(d));
    for (int l = 0; l < d; ++l) psi[static_cast<std::size_t>(l) * d + l] = a;
    return detail::from_pure(d, psi, mode_labels(d));
}

// p * base + (1 - p) * I/d^2.
inline BipartiteState isotropic_mix(const BipartiteState& base, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw bad_probability("isotropic_mix: p must lie in [0, 1]");
    const int n = base.rho.dim();
    la::Mat m = (la::Cx{p, 0.0}) * base.rho.mat();
    const double w = (1.0 - p) / n;
    for (int i = 0; i < n; ++i) m(i, i) += w;
    return BipartiteState{base.d, la::DensityOperator(std::move(m)), base.labels};
}

inline BipartiteState isotropic(int d, double p) { return isotropic_mix(max_entangled(d), p); }

inline BipartiteState spdc_state(const SpiralSpectrum& spectrum, const ModeLabels& labels) {
    const int d = labels.d;
    if (d < 2) throw unsupported_dimension("spdc_state: d must be >= 2");
    double norm2 = 0.0;
    std::vector<la::Cx> c(d);
    for (int i = 0; i < d; ++i) {
        const auto it = spectrum.amplitudes.find(labels.labels[i]);
        const la::Cx amp = (it == spectrum.amplitudes.end()) ? la::Cx{0.0, 0.0} : it->second;
        if (std::abs(amp) == 0.0)
            throw degenerate_spectrum("spdc_state: spectrum vanishes on mode l = " +
                                      std::to_string(labels.labels[i]));
        c[i] = amp;
        norm2 += std::norm(amp);
    }
    la::CVec psi(static_cast<std::size_t>(d) * d, la::Cx{0.0, 0.0});
    const double inv = 1.0 / std::sqrt(norm2);
    for (int i = 0; i < d; ++i) psi[static_cast<std::size_t>(i) * d + i] = c[i] * inv;
    return detail::from_pure(d, psi, labels);
}

// Local filtering that equalizes the Schmidt amplitudes of a pure state
// diagonal in |l,l>. Returns the concentrated state (maximally entangled up
// to numerical residue) and the success probability d * min_l |c_l|^2.
inline std::pair<BipartiteState, double> procrustean_concentrate(const BipartiteState& state) {
    const int d = state.d;
    const la::CVec psi = detail::pure_vector(state);
    double off = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (i != j) off = std::max(off, std::abs(psi[static_cast<std::size_t>(i) * d + j]));
    if (off > 1e-8) throw invalid_state("procrustean_concentrate: state is not Schmidt-diagonal in |l,l>");
    double min2 = 1.0;
    for (int i = 0; i < d; ++i) {
        const double w = std::norm(psi[static_cast<std::size_t>(i) * d + i]);
        if (w < 1e-12) throw degenerate_spectrum("procrustean_concentrate: vanishing Schmidt amplitude");
        min2 = std::min(min2, w);
    }
    BipartiteState out = max_entangled(d);
    out.labels = state.labels;
    return {std::move(out), d * min2};
}

// Nearest-neighbour crosstalk on Bob's side: each mode stays put with
// probability 1 - 2*eps and hops to an adjacent mode label with probability
// eps, reflecting at the edges. Realized as a mixture of the identity and
// the two pairing permutations, so eps = 0 is exactly the identity channel.
inline BipartiteState crosstalk(const BipartiteState& state, double eps) {
    if (!(eps >= 0.0 && eps <= 0.5)) throw bad_probability("crosstalk: eps must lie in [0, 0.5]");
    const int d = state.d;
    auto [t1, t2] = detail::pairing_permutations(d);
    const la::Mat k1 = la::kron(la::Mat::identity(d), t1);
    const la::Mat k2 = la::kron(la::Mat::identity(d), t2);
    la::Mat out = (la::Cx{1.0 - 2.0 * eps, 0.0}) * state.rho.mat();
    out += (la::Cx{eps, 0.0}) * (k1 * state.rho.mat() * k1.adjoint());
    out += (la::Cx{eps, 0.0}) * (k2 * state.rho.mat() * k2.adjoint());
    return BipartiteState{d, la::DensityOperator(std::move(out)), state.labels};
}

}  // namespace steersim::states
