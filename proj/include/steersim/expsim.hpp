#pragma once

// Monte Carlo reproduction of the coincidence experiment: Poissonian
// per-cell counts, the time-multiplexed hologram-pool noise injection and
// the sweep-and-fit extraction of the empirical noise threshold p_min.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "steersim/errors.hpp"
#include "steersim/mub.hpp"
#include "steersim/qlinalg.hpp"
#include "steersim/states.hpp"
#include "steersim/steering.hpp"

namespace steersim::expsim {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// A seeded random stream. Substreams are derived deterministically from a
// master seed and an index, so sweep points are reproducible independently
// of evaluation order.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    static RngStream substream(std::uint64_t master, std::uint64_t index) {
        return RngStream(splitmix64(master + 0x9E3779B97F4A7C15ull * (index + 1)));
    }

    std::mt19937_64& engine() { return eng_; }

    double uniform() {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return u(eng_);
    }

    long long poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::poisson_distribution<long long> p(mean);
        return p(eng_);
    }

  private:
    std::mt19937_64 eng_;
};

// Cumulative-weight sampler over a fixed finite distribution.
class DiscreteSampler {
  public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(const std::vector<double>& weights) {
        cum_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            acc += std::max(w, 0.0);
            cum_.push_back(acc);
        }
        if (!(acc > 0.0)) throw invalid_state("discrete sampler: no positive weight");
        total_ = acc;
    }

    int sample(RngStream& rng) const {
        std::uniform_real_distribution<double> u(0.0, total_);
        const double r = u(rng.engine());
        auto it = std::upper_bound(cum_.begin(), cum_.end(), r);
        if (it == cum_.end()) --it;
        return static_cast<int>(it - cum_.begin());
    }

  private:
    std::vector<double> cum_;
    double total_ = 0.0;
};

enum class ErrorMethod { poisson_propagation, repeat_trials };

struct ExperimentConfig {
    int d = 2;
    double p = 1.0;                 // target pure-state fraction
    long long counts = 100000;      // mean coincidences per setting
    std::uint64_t seed = 1;
    double eps_crosstalk = 0.0;
    bool spiral_flat = true;        // flat spectrum = ideal source
    double spiral_sigma = 4.0;      // Gaussian width when not flat
    std::optional<states::SpiralSpectrum> custom_spectrum;
    ErrorMethod error_method = ErrorMethod::poisson_propagation;
    int repeat_trials = 16;
    bool exact = false;  // evaluate probabilities analytically, no sampling

    void validate() const {
        if (d < 2) throw config_error("config: d must be >= 2");
        if (!(p >= 0.0 && p <= 1.0)) throw config_error("config: p must lie in [0, 1]");
        if (!exact && counts < 1) throw config_error("config: counts must be >= 1");
        if (!(eps_crosstalk >= 0.0 && eps_crosstalk <= 0.5)) throw config_error("config: crosstalk must lie in [0, 0.5]");
        if (!spiral_flat && !custom_spectrum && !(spiral_sigma > 0.0))
            throw config_error("config: spiral_sigma must be positive");
        if (error_method == ErrorMethod::repeat_trials && repeat_trials < 2)
            throw config_error("config: repeat trials must be >= 2");
    }
};

// The pure two-photon source before any mixing: ideal |Phi+> for a flat
// spectrum, otherwise the (unconcentrated) spiral-bandwidth state.
inline states::BipartiteState build_source_state(const ExperimentConfig& cfg) {
    const auto labels = states::mode_labels(cfg.d);
    if (cfg.custom_spectrum) return states::spdc_state(*cfg.custom_spectrum, labels);
    if (cfg.spiral_flat) return states::max_entangled(cfg.d);
    return states::spdc_state(states::gaussian_spectrum(labels, cfg.spiral_sigma), labels);
}

// Source mixed with white noise at fraction p, then sent through the
// crosstalk channel. This is the state the pool protocol realizes on
// average, so exact evaluation and Monte Carlo share one definition.
inline states::BipartiteState build_prepared_state(const ExperimentConfig& cfg, double p) {
    auto mixed = states::isotropic_mix(build_source_state(cfg), p);
    if (cfg.eps_crosstalk > 0.0) return states::crosstalk(mixed, cfg.eps_crosstalk);
    return mixed;
}

struct CoincidenceTable {
    int d = 0;
    int setting = 0;
    std::vector<long long> counts;  // row-major in (alice, bob)

    long long total() const {
        long long t = 0;
        for (long long c : counts) t += c;
        return t;
    }
    long long diagonal() const {
        long long t = 0;
        for (int a = 0; a < d; ++a) t += counts[static_cast<std::size_t>(a) * d + a];
        return t;
    }
};

// Each cell is an independent Poisson draw with mean N * P(a,b|x,x).
inline CoincidenceTable simulate_coincidences(const states::BipartiteState& state, const mub::MubFamily& fam, int x,
                                              long long n_per_setting, RngStream& rng) {
    const auto probs = steering::joint_prob_table(state, fam, x);
    CoincidenceTable table;
    table.d = fam.d;
    table.setting = x;
    table.counts.resize(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) table.counts[i] = rng.poisson(n_per_setting * probs[i]);
    return table;
}

inline std::vector<CoincidenceTable> simulate_all_settings(const states::BipartiteState& state,
                                                           const mub::MubFamily& fam, long long n_per_setting,
                                                           RngStream& rng) {
    std::vector<CoincidenceTable> tables;
    tables.reserve(fam.bases.size());
    for (int x = 0; x < static_cast<int>(fam.bases.size()); ++x)
        tables.push_back(simulate_coincidences(state, fam, x, n_per_setting, rng));
    return tables;
}

// Plug-in estimator. Per setting S_x = D/T with D the diagonal and T the
// table total; independent Poisson cells give Var(S_x) = D*O/T^3 (O = T-D)
// by the delta method, propagated through the per-setting normalization.
inline steering::SteeringReport estimate_functional(const std::vector<CoincidenceTable>& tables) {
    if (tables.empty()) throw empty_table("estimate_functional: no tables");
    const int d = tables.front().d;
    double s = 0.0, var = 0.0;
    for (const auto& t : tables) {
        if (t.d != d) throw dimension_mismatch("estimate_functional: mixed dimensions");
        const double total = static_cast<double>(t.total());
        if (!(total > 0.0)) throw empty_table("estimate_functional: empty table for setting " + std::to_string(t.setting));
        const double diag = static_cast<double>(t.diagonal());
        s += diag / total;
        var += diag * (total - diag) / (total * total * total);
    }
    steering::SteeringReport rep;
    rep.d = d;
    rep.n_settings = static_cast<int>(tables.size());
    rep.S = s;
    rep.S_sigma = std::sqrt(var);
    if (rep.n_settings == d + 1) {
        rep.bounds_available = true;
        rep.lhs_bound = steering::lhs_bound(d);
        rep.quantum_bound = steering::quantum_bound(d);
        rep.violation = rep.S / rep.lhs_bound;
        rep.violation_sigma = rep.S_sigma / rep.lhs_bound;
    }
    return rep;
}

struct PoolElement {
    enum class Kind { grating, product };
    Kind kind = Kind::product;
    int basis = -1;  // y: 0 = computational, 1..d = the other MUBs
    int alice = -1;  // prepared Alice vector index
    int bob = -1;    // prepared Bob vector index
    double probability = 0.0;
};

// Time-multiplexed preparation pool: one diffraction grating passing the
// entangled state, plus (d+1)*d^2 holograms preparing the product states
// whose uniform mixture is I/d^2. The grating emerges with probability
// P = p / [p + (1-p) d]; its coincidence rate is d times a product
// hologram's, which is what makes the rate-weighted average isotropic.
struct HologramPool {
    int d = 0;
    double p = 0.0;
    double grating_probability = 0.0;
    mub::MubFamily family;  // preparation family (not conjugated)
    std::vector<PoolElement> elements;
};

inline HologramPool hologram_pool(int d, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw bad_probability("hologram_pool: p must lie in [0, 1]");
    HologramPool pool;
    pool.d = d;
    pool.p = p;
    pool.family = mub::build_mubs(d);
    pool.grating_probability = p / (p + (1.0 - p) * d);
    const double each = (1.0 - pool.grating_probability) / ((d + 1.0) * d * d);
    pool.elements.reserve(1 + (d + 1) * d * d);
    PoolElement grating;
    grating.kind = PoolElement::Kind::grating;
    grating.probability = pool.grating_probability;
    pool.elements.push_back(grating);
    for (int y = 0; y <= d; ++y)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                PoolElement e;
                e.kind = PoolElement::Kind::product;
                e.basis = y;
                e.alice = a;
                e.bob = b;
                e.probability = each;
                pool.elements.push_back(e);
            }
    return pool;
}

// Rate-weighted average of the prepared states; must reproduce the
// isotropic state. The grating's d-fold rate advantage is the event-level
// realization of the p*d*t : (1-p)*d^2*t time-sharing ratio.
inline states::BipartiteState pool_average_state(const HologramPool& pool) {
    const int d = pool.d;
    const int n = d * d;
    la::Mat acc(n);
    double wsum = 0.0;
    for (const auto& e : pool.elements) {
        const double w = e.probability * (e.kind == PoolElement::Kind::grating ? d : 1.0);
        if (w <= 0.0) continue;
        la::CVec v;
        if (e.kind == PoolElement::Kind::grating) {
            v.assign(n, la::Cx{0.0, 0.0});
            const double a = 1.0 / std::sqrt(static_cast<double>(d));
            for (int l = 0; l < d; ++l) v[static_cast<std::size_t>(l) * d + l] = a;
        } else {
            v = la::kron_vec(pool.family.bases[e.basis].vectors[e.alice], pool.family.bases[e.basis].vectors[e.bob]);
        }
        acc += la::Cx{w, 0.0} * la::Mat::outer(v, v);
        wsum += w;
    }
    acc *= la::Cx{1.0 / wsum, 0.0};
    return states::BipartiteState{d, la::DensityOperator(std::move(acc)), states::mode_labels(d)};
}

struct PoolRunOptions {
    std::optional<states::BipartiteState> source;  // grating preparation override
    double eps_crosstalk = 0.0;
};

// Per-event sampling machinery for a pool, reusable across noise fractions
// and seeds: outcome distributions do not depend on p.
class PoolSimulator {
  public:
    PoolSimulator(const mub::MubFamily& preparation, const mub::MubFamily& measurement,
                  const PoolRunOptions& opts = {})
        : d_(measurement.d) {
        if (preparation.d != measurement.d) throw dimension_mismatch("pool simulator: family dimensions differ");
        const int d = d_;
        const int nb = static_cast<int>(measurement.bases.size());
        const double eps = opts.eps_crosstalk;

        states::BipartiteState source = opts.source ? *opts.source : states::max_entangled(d);
        if (eps > 0.0) source = states::crosstalk(source, eps);

        grating_.resize(nb);
        alice_.assign(nb, std::vector<DiscreteSampler>(static_cast<std::size_t>(nb) * d));
        bob_.assign(nb, std::vector<DiscreteSampler>(static_cast<std::size_t>(nb) * d));

        // Crosstalked single-photon preparations on Bob's side, if any.
        std::vector<la::Mat> bob_prepared;
        if (eps > 0.0) {
            bob_prepared.reserve(static_cast<std::size_t>(nb) * d);
            for (int y = 0; y < nb; ++y)
                for (int c = 0; c < d; ++c) {
                    const auto& v = preparation.bases[y].vectors[c];
                    bob_prepared.push_back(states::detail::crosstalk_single(la::Mat::outer(v, v), eps));
                }
        }

        for (int x = 0; x < nb; ++x) {
            grating_[x] = DiscreteSampler(steering::joint_prob_table(source, measurement, x));
            for (int y = 0; y < nb; ++y)
                for (int c = 0; c < d; ++c) {
                    std::vector<double> acol(d), bcol(d);
                    const auto& prep = preparation.bases[y].vectors[c];
                    for (int o = 0; o < d; ++o) {
                        acol[o] = std::norm(la::inner(measurement.bases[x].vectors[o], prep));
                        if (eps > 0.0) {
                            bcol[o] = la::quad_form(bob_prepared[static_cast<std::size_t>(y) * d + c],
                                                    la::conjugated(measurement.bases[x].vectors[o]));
                        } else {
                            // <conj(m)|prep> is the bilinear overlap sum_j m_j prep_j.
                            la::Cx s{0.0, 0.0};
                            for (int j = 0; j < d; ++j) s += measurement.bases[x].vectors[o][j] * prep[j];
                            bcol[o] = std::norm(s);
                        }
                    }
                    alice_[x][static_cast<std::size_t>(y) * d + c] = DiscreteSampler(acol);
                    bob_[x][static_cast<std::size_t>(y) * d + c] = DiscreteSampler(bcol);
                }
        }
    }

    // One full run: every setting gets Poisson(N) events, each event drawn
    // as (pool element, then outcome pair) with the grating rate-boosted d-fold.
    std::vector<CoincidenceTable> run(const HologramPool& pool, long long n_per_setting, RngStream& rng) const {
        if (pool.d != d_) throw dimension_mismatch("pool simulator: pool dimension differs");
        std::vector<double> weights;
        weights.reserve(pool.elements.size());
        for (const auto& e : pool.elements)
            weights.push_back(e.probability * (e.kind == PoolElement::Kind::grating ? d_ : 1.0));
        const DiscreteSampler element_sampler(weights);

        std::vector<CoincidenceTable> tables;
        const int nb = static_cast<int>(grating_.size());
        tables.reserve(nb);
        for (int x = 0; x < nb; ++x) {
            CoincidenceTable t;
            t.d = d_;
            t.setting = x;
            t.counts.assign(static_cast<std::size_t>(d_) * d_, 0);
            const long long events = rng.poisson(static_cast<double>(n_per_setting));
            for (long long ev = 0; ev < events; ++ev) {
                const auto& e = pool.elements[element_sampler.sample(rng)];
                int a, b;
                if (e.kind == PoolElement::Kind::grating) {
                    const int cell = grating_[x].sample(rng);
                    a = cell / d_;
                    b = cell % d_;
                } else {
                    const std::size_t idx = static_cast<std::size_t>(e.basis) * d_ + e.alice;
                    a = alice_[x][idx].sample(rng);
                    b = bob_[x][static_cast<std::size_t>(e.basis) * d_ + e.bob].sample(rng);
                }
                ++t.counts[static_cast<std::size_t>(a) * d_ + b];
            }
            tables.push_back(std::move(t));
        }
        return tables;
    }

  private:
    int d_;
    std::vector<DiscreteSampler> grating_;              // per setting, over d^2 cells
    std::vector<std::vector<DiscreteSampler>> alice_;   // [x][y*d+c] over outcomes
    std::vector<std::vector<DiscreteSampler>> bob_;     // [x][y*d+c'] over outcomes
};

inline std::vector<CoincidenceTable> simulate_pool_run(const HologramPool& pool, const mub::MubFamily& fam,
                                                       long long n_per_setting, RngStream& rng,
                                                       const PoolRunOptions& opts = {}) {
    const PoolSimulator sim(pool.family, fam, opts);
    return sim.run(pool, n_per_setting, rng);
}

struct SweepPoint {
    double p = 0.0;
    double S = 0.0;
    double S_sigma = 0.0;
};

struct SweepResult {
    int d = 0;
    bool exact = false;
    std::vector<SweepPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double cov00 = 0.0;  // Var(intercept)
    double cov01 = 0.0;  // Cov(intercept, slope)
    double cov11 = 0.0;  // Var(slope)
    double lhs_bound = 0.0;
    double p_min = 0.0;
    double p_min_sigma = 0.0;
};

namespace detail {

struct LineFit {
    double intercept, slope, cov00, cov01, cov11;
};

// Weighted least squares for y = intercept + slope * x. The parameter
// covariance is (X^T W X)^-1 with the weights taken as known a priori.
inline LineFit wls_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
    double sw = 0.0, swx = 0.0, swxx = 0.0, swy = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swxx += w[i] * x[i] * x[i];
        swy += w[i] * y[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (!(std::abs(det) > 1e-12 * std::max(1.0, sw * swxx)))
        throw singular_fit("fit: degenerate design (need at least two distinct p values)");
    LineFit f{};
    f.intercept = (swxx * swy - swx * swxy) / det;
    f.slope = (sw * swxy - swx * swy) / det;
    f.cov00 = swxx / det;
    f.cov01 = -swx / det;
    f.cov11 = sw / det;
    return f;
}

inline steering::SteeringReport estimate_with_method(const ExperimentConfig& cfg, const PoolSimulator& sim,
                                                     const HologramPool& pool, RngStream point_stream) {
    if (cfg.error_method == ErrorMethod::poisson_propagation) {
        const auto tables = sim.run(pool, cfg.counts, point_stream);
        return estimate_functional(tables);
    }
    const int reps = cfg.repeat_trials;
    std::vector<double> values(reps);
    steering::SteeringReport rep;
    for (int r = 0; r < reps; ++r) {
        const auto tables = sim.run(pool, cfg.counts, point_stream);
        rep = estimate_functional(tables);
        values[r] = rep.S;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= reps;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    rep.S = mean;
    rep.S_sigma = std::sqrt(ss / (reps - 1));
    if (rep.bounds_available) {
        rep.violation = rep.S / rep.lhs_bound;
        rep.violation_sigma = rep.S_sigma / rep.lhs_bound;
    }
    return rep;
}

}  // namespace detail

// Run the pool protocol (or exact evaluation) on an increasing grid of p
// values, fit a weighted line through (p, S) and intersect it with the LHS
// bound. Exact points are fitted unweighted and carry zero covariance.
inline SweepResult sweep_and_fit(const ExperimentConfig& cfg, std::vector<double> p_list) {
    cfg.validate();
    std::sort(p_list.begin(), p_list.end());
    p_list.erase(std::unique(p_list.begin(), p_list.end()), p_list.end());
    if (p_list.size() < 2) throw singular_fit("sweep: need at least two distinct p values");
    for (double p : p_list)
        if (!(p >= 0.0 && p <= 1.0)) throw bad_probability("sweep: p must lie in [0, 1]");

    const auto fam = mub::build_mubs(cfg.d);
    SweepResult result;
    result.d = cfg.d;
    result.exact = cfg.exact;
    result.lhs_bound = steering::lhs_bound(cfg.d);

    std::optional<PoolSimulator> sim;
    if (!cfg.exact) {
        PoolRunOptions opts;
        opts.eps_crosstalk = cfg.eps_crosstalk;
        if (!(cfg.spiral_flat && !cfg.custom_spectrum)) opts.source = build_source_state(cfg);
        sim.emplace(fam, fam, opts);
    }

    for (std::size_t i = 0; i < p_list.size(); ++i) {
        SweepPoint pt;
        pt.p = p_list[i];
        if (cfg.exact) {
            pt.S = steering::steering_functional(build_prepared_state(cfg, pt.p), fam).S;
            pt.S_sigma = 0.0;
        } else {
            const auto pool = hologram_pool(cfg.d, pt.p);
            auto rep = detail::estimate_with_method(cfg, *sim, pool, RngStream::substream(cfg.seed, i));
            pt.S = rep.S;
            pt.S_sigma = rep.S_sigma;
        }
        result.points.push_back(pt);
    }

    std::vector<double> xs, ys, ws;
    bool all_exact = true;
    for (const auto& pt : result.points) all_exact = all_exact && pt.S_sigma == 0.0;
    for (const auto& pt : result.points) {
        xs.push_back(pt.p);
        ys.push_back(pt.S);
        ws.push_back(all_exact ? 1.0 : 1.0 / std::max(pt.S_sigma * pt.S_sigma, 1e-24));
    }
    auto fit = detail::wls_line(xs, ys, ws);
    if (all_exact) fit.cov00 = fit.cov01 = fit.cov11 = 0.0;

    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.cov00 = fit.cov00;
    result.cov01 = fit.cov01;
    result.cov11 = fit.cov11;
    if (std::abs(fit.slope) < 1e-9) throw singular_fit("sweep: fitted slope is numerically zero");
    result.p_min = (result.lhs_bound - fit.intercept) / fit.slope;
    const double var = (fit.cov00 + 2.0 * result.p_min * fit.cov01 + result.p_min * result.p_min * fit.cov11) /
                       (fit.slope * fit.slope);
    result.p_min_sigma = var > 0.0 ? std::sqrt(var) : 0.0;
    return result;
}

// Direct (non-pool) simulation of the fully prepared state, used by the
// single-point simulate command.
inline steering::SteeringReport run_direct(const ExperimentConfig& cfg, const states::BipartiteState& state,
                                           const mub::MubFamily& fam, std::vector<CoincidenceTable>* out_tables) {
    cfg.validate();
    if (cfg.exact) {
        auto rep = steering::steering_functional(state, fam);
        if (out_tables) out_tables->clear();
        return rep;
    }
    if (cfg.error_method == ErrorMethod::poisson_propagation) {
        RngStream rng = RngStream::substream(cfg.seed, 0);
        auto tables = simulate_all_settings(state, fam, cfg.counts, rng);
        auto rep = estimate_functional(tables);
        if (out_tables) *out_tables = std::move(tables);
        return rep;
    }
    const int reps = cfg.repeat_trials;
    std::vector<double> values(reps);
    steering::SteeringReport rep;
    std::vector<CoincidenceTable> first;
    for (int r = 0; r < reps; ++r) {
        RngStream rng = RngStream::substream(cfg.seed, static_cast<std::uint64_t>(r));
        auto tables = simulate_all_settings(state, fam, cfg.counts, rng);
        rep = estimate_functional(tables);
        values[r] = rep.S;
        if (r == 0) first = std::move(tables);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= reps;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    rep.S = mean;
    rep.S_sigma = std::sqrt(ss / (reps - 1));
    if (rep.bounds_available) {
        rep.violation = rep.S / rep.lhs_bound;
        rep.violation_sigma = rep.S_sigma / rep.lhs_bound;
    }
    if (out_tables) *out_tables = std::move(first);
    return rep;
}

}  // namespace steersim::expsim
