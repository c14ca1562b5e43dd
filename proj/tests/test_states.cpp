#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "steersim/states.hpp"
#include "testutil.hpp"

using namespace steersim;
using la::Cx;

TEST_CASE("mode labels") {
    CHECK(states::mode_labels(5).labels == std::vector<int>{-2, -1, 0, 1, 2});
    CHECK(states::mode_labels(4).labels == std::vector<int>{-2, -1, 1, 2});
    CHECK(states::mode_labels(1).labels == std::vector<int>{0});
    CHECK(states::mode_labels(2).labels == std::vector<int>{-1, 1});
}

TEST_CASE("maximally entangled state") {
    const auto s2 = states::max_entangled(2);
    const double a = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(s2.rho.mat()(0, 0) - Cx{0.5, 0}) < 1e-14);
    CHECK(std::abs(s2.rho.mat()(0, 3) - Cx{0.5, 0}) < 1e-14);
    CHECK(std::abs(s2.rho.mat()(3, 3) - Cx{0.5, 0}) < 1e-14);
    CHECK(a * a == doctest::Approx(0.5));

    for (int d : {2, 3, 5, 11}) {
        const auto s = states::max_entangled(d);
        CHECK(s.rho.purity() == doctest::Approx(1.0).epsilon(1e-12));
        const auto red = la::partial_trace(s.rho.mat(), d, d, la::Side::A);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const Cx want = (r == c) ? Cx{1.0 / d, 0.0} : Cx{0.0, 0.0};
                CHECK(std::abs(red(r, c) - want) < 1e-12);
            }
    }
}

TEST_CASE("isotropic state endpoints and spectrum") {
    const auto pure = states::isotropic(3, 1.0);
    CHECK(pure.rho.purity() == doctest::Approx(1.0).epsilon(1e-12));

    const auto mixed = states::isotropic(3, 0.0);
    const auto evals = la::hermitian_eigenvalues(mixed.rho.mat());
    for (double e : evals) CHECK(e == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    // d=4, p=0.5: top eigenvalue 0.53125, the 15 others 0.03125
    const auto iso = states::isotropic(4, 0.5);
    const auto ev = la::hermitian_eigenvalues(iso.rho.mat());
    CHECK(ev.back() == doctest::Approx(0.53125).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) CHECK(ev[i] == doctest::Approx(0.03125).epsilon(1e-12));

    CHECK_THROWS_AS(states::isotropic(3, -0.1), bad_probability);
    CHECK_THROWS_AS(states::isotropic(3, 1.1), bad_probability);
}

TEST_CASE("isotropic is affine in p") {
    const int d = 3;
    const double p1 = 0.2, p2 = 0.9, alpha = 0.35;
    const auto a = states::isotropic(d, p1);
    const auto b = states::isotropic(d, p2);
    const auto mix = states::isotropic(d, alpha * p1 + (1 - alpha) * p2);
    for (int r = 0; r < d * d; ++r)
        for (int c = 0; c < d * d; ++c) {
            const Cx want = alpha * a.rho.mat()(r, c) + (1 - alpha) * b.rho.mat()(r, c);
            CHECK(std::abs(mix.rho.mat()(r, c) - want) < 1e-12);
        }
}

TEST_CASE("spdc state from spectra") {
    const auto labels3 = states::mode_labels(3);

    const auto flat = states::spdc_state(states::flat_spectrum(labels3), labels3);
    const auto maxent = states::max_entangled(3);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 9; ++c) CHECK(std::abs(flat.rho.mat()(r, c) - maxent.rho.mat()(r, c)) < 1e-12);

    // Gaussian, sigma = 3, d = 3: weights exp(-1/9), 1, exp(-1/9) renormalized.
    const auto g = states::spdc_state(states::gaussian_spectrum(labels3, 3.0), labels3);
    const double w_out = std::exp(-1.0 / 9.0);
    const double z = 2.0 * w_out + 1.0;
    CHECK(g.rho.mat()(0, 0).real() == doctest::Approx(w_out / z).epsilon(1e-12));
    CHECK(g.rho.mat()(4, 4).real() == doctest::Approx(1.0 / z).epsilon(1e-12));
    CHECK(g.rho.mat()(8, 8).real() == doctest::Approx(w_out / z).epsilon(1e-12));

    states::SpiralSpectrum zero_at_center;
    zero_at_center.amplitudes[-1] = 1.0;
    zero_at_center.amplitudes[0] = 0.0;
    zero_at_center.amplitudes[1] = 1.0;
    CHECK_THROWS_AS(states::spdc_state(zero_at_center, labels3), degenerate_spectrum);
}

TEST_CASE("procrustean concentration") {
    const auto flat = states::max_entangled(4);
    const auto [same, prob] = states::procrustean_concentrate(flat);
    CHECK(prob == doctest::Approx(1.0).epsilon(1e-12));

    // d=2, amplitudes (sqrt 0.8, sqrt 0.2): success probability 2*0.2 = 0.4.
    const auto labels2 = states::mode_labels(2);
    states::SpiralSpectrum s;
    s.amplitudes[-1] = std::sqrt(0.8);
    s.amplitudes[1] = std::sqrt(0.2);
    const auto skew = states::spdc_state(s, labels2);
    const auto [conc, p] = states::procrustean_concentrate(skew);
    CHECK(p == doctest::Approx(0.4).epsilon(1e-12));

    // output has fidelity 1 with the maximally entangled state
    const auto target = states::max_entangled(2);
    CHECK(la::expect(conc.rho, target.rho.mat()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("procrustean concentration on random spectra yields I/d marginals") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    for (int d : {3, 5}) {
        const auto labels = states::mode_labels(d);
        states::SpiralSpectrum s;
        for (int l : labels.labels) s.amplitudes[l] = u(rng);
        const auto [conc, p] = states::procrustean_concentrate(states::spdc_state(s, labels));
        CHECK(p > 0.0);
        CHECK(p <= 1.0 + 1e-12);
        const auto red = la::partial_trace(conc.rho.mat(), d, d, la::Side::B);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const Cx want = (r == c) ? Cx{1.0 / d, 0.0} : Cx{0.0, 0.0};
                CHECK(std::abs(red(r, c) - want) < 1e-10);
            }
    }
}

TEST_CASE("procrustean rejects degenerate and non-diagonal inputs") {
    // product state |0,0>: Schmidt rank 1, concentration undefined
    la::CVec psi(4, Cx{0, 0});
    psi[0] = 1.0;
    const states::BipartiteState prod{2, la::DensityOperator(la::Mat::outer(psi, psi)), states::mode_labels(2)};
    CHECK_THROWS_AS(states::procrustean_concentrate(prod), degenerate_spectrum);

    // |0,1> is pure but not diagonal in |l,l>
    la::CVec off(4, Cx{0, 0});
    off[1] = 1.0;
    const states::BipartiteState offd{2, la::DensityOperator(la::Mat::outer(off, off)), states::mode_labels(2)};
    CHECK_THROWS_AS(states::procrustean_concentrate(offd), invalid_state);
}

TEST_CASE("crosstalk channel basics") {
    const auto s = states::max_entangled(3);
    const auto same = states::crosstalk(s, 0.0);
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 9; ++c) CHECK(std::abs(same.rho.mat()(r, c) - s.rho.mat()(r, c)) < 1e-14);

    CHECK_THROWS_AS(states::crosstalk(s, -0.01), bad_probability);
    CHECK_THROWS_AS(states::crosstalk(s, 0.51), bad_probability);

    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 5; ++trial) {
        const states::BipartiteState in{3, la::DensityOperator(testutil::random_density(9, rng)),
                                        states::mode_labels(3)};
        const auto out = states::crosstalk(in, 0.2);
        CHECK(out.rho.mat().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(out.rho.min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("crosstalk moves populations like a reflected random walk") {
    // Bob's marginal populations of |0><0| x |1><1| under eps = 0.1:
    // mode 1 (of 3) keeps 0.8 and sends 0.1 to each neighbour.
    la::CVec psi(9, Cx{0, 0});
    psi[0 * 3 + 1] = 1.0;
    const states::BipartiteState in{3, la::DensityOperator(la::Mat::outer(psi, psi)), states::mode_labels(3)};
    const auto out = states::crosstalk(in, 0.1);
    const auto bob = la::partial_trace(out.rho.mat(), 3, 3, la::Side::A);
    CHECK(bob(0, 0).real() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(bob(1, 1).real() == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(bob(2, 2).real() == doctest::Approx(0.1).epsilon(1e-12));

    // edge mode reflects: mode 0 keeps 0.9
    la::CVec edge(9, Cx{0, 0});
    edge[0] = 1.0;
    const states::BipartiteState in0{3, la::DensityOperator(la::Mat::outer(edge, edge)), states::mode_labels(3)};
    const auto out0 = states::crosstalk(in0, 0.1);
    const auto bob0 = la::partial_trace(out0.rho.mat(), 3, 3, la::Side::A);
    CHECK(bob0(0, 0).real() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(bob0(1, 1).real() == doctest::Approx(0.1).epsilon(1e-12));
}
