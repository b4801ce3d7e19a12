#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "tlf/errors.hpp"
#include "tlf/stable_dist.hpp"
#include "tlf/truncation_model.hpp"

namespace tlf {

using RandomStream = std::mt19937_64;

/// Independent stream number `index` derived from a master seed (splitmix64
/// expansion into a seed_seq). Streams depend only on (seed, index).
RandomStream make_stream(std::uint64_t seed, std::uint64_t index);

inline constexpr std::uint64_t kMaxRejections = 1'000'000;

/// Exact draw from C P_L(x) g(x/ell) by rejection from the stable law:
/// a stable draw x is kept with probability g(x/ell). `trials` is
/// incremented once per stable draw.
template <class URBG>
double truncated_sample(const TlfModel& model, URBG& rng, std::uint64_t& trials) {
    const DeformationSpec& g = model.deformation();
    const double ell = model.ell();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t t = 0; t < kMaxRejections; ++t) {
        const double x = stable_sample(model.stable(), rng);
        ++trials;
        const double gx = g(x / ell);
        if (gx >= 1.0) return x;
        if (gx > 0.0 && unit(rng) < gx) return x;
    }
    std::ostringstream msg;
    msg << "truncated_sample: no acceptance after " << kMaxRejections << " trials";
    throw IterationLimitError(msg.str());
}

template <class URBG>
double truncated_sample(const TlfModel& model, URBG& rng) {
    std::uint64_t trials = 0;
    return truncated_sample(model, rng, trials);
}

inline constexpr std::int64_t kMinWalkers = 100;
/// Walkers sharing one random stream. Stream b drives walkers
/// [b * kWalkersPerStream, (b + 1) * kWalkersPerStream).
inline constexpr std::int64_t kWalkersPerStream = 256;

struct WalkConfig {
    TlfModel model;
    std::int64_t steps;
    std::int64_t walkers;
    std::uint64_t seed;
    std::vector<std::int64_t> record_steps;
    /// Keep every walker's position at the recorded steps.
    bool keep_positions = false;
    /// Worker threads; 0 means hardware concurrency. Results do not depend
    /// on this value.
    unsigned threads = 0;
};

/// Throws DomainError when the configuration violates its invariants.
void validate(const WalkConfig& config);

struct StepStats {
    std::int64_t n;
    double mean;
    double mean_se;
    double variance;
    double variance_se;
    double kurtosis;  // m4 / m2^2 - 3
    double kurtosis_se;
    double return_density;
    double return_density_se;
    double window;  // half-width delta_n of the return window
    std::int64_t count;
};

struct EnsembleStats {
    std::vector<StepStats> rows;
    /// positions[r][w]: walker w at record_steps[r]; empty unless requested.
    std::vector<std::vector<double>> positions;
    std::uint64_t trials = 0;
    std::uint64_t draws = 0;
};

/// delta_n = 0.1 gamma n^(1/alpha).
double return_window(const StableParams& stable, std::int64_t n);

EnsembleStats run_ensemble(const WalkConfig& config);

struct DiffusionFit {
    double slope;
    double slope_se;
    double r_squared;
};

/// Least-squares line through the origin of variance against n with
/// weights 1/n^2. The standard error accounts for the correlation between
/// recorded steps of the same walkers, so kept positions are required.
DiffusionFit fit_diffusion(const EnsembleStats& stats);

struct ReturnScalingRow {
    std::int64_t n;
    double rescaled;     // W_hat(0, n) n^(1/alpha)
    double rescaled_se;
};

/// Requires every recorded n <= 0.1 (ell/gamma)^alpha.
std::vector<ReturnScalingRow> return_scaling_check(const WalkConfig& config);

struct CollapseRow {
    std::int64_t n;
    double distance;  // two-sample KS statistic
    double critical;
    bool passed;
};

/// Levy-regime collapse: positions after n steps of `model` against single
/// draws from the same model with gamma -> gamma n^(1/alpha) (same ell),
/// compared by a two-sample KS test at `level`. Both samples have `walkers`
/// members. Same guard on n as return_scaling_check.
std::vector<CollapseRow> collapse_check(const TlfModel& model, std::span<const std::int64_t> n_list,
                                        std::int64_t walkers, std::uint64_t seed,
                                        double level = 0.01, unsigned threads = 0);

}  // namespace tlf
