#include "tlf/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "tlf/statistics.hpp"

namespace tlf {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Raw power sums x^1..x^8 plus the count inside the return window.
constexpr std::size_t kSums = 9;

struct Central {
    double mean, c2, c4, c6, c8;
};

Central central_moments(const double* sums, double walkers) {
    std::array<double, 9> raw{};
    raw[0] = 1.0;
    for (std::size_t k = 1; k <= 8; ++k) raw[k] = sums[k - 1] / walkers;
    const double mu = raw[1];
    auto central = [&](int k) {
        double c = 0.0;
        double binom = 1.0;
        for (int i = 0; i <= k; ++i) {
            c += binom * raw[static_cast<std::size_t>(i)] * std::pow(-mu, k - i);
            binom = binom * (k - i) / (i + 1);
        }
        return c;
    };
    return {mu, central(2), central(4), central(6), central(8)};
}

}  // namespace

RandomStream make_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    splitmix64(state);
    state ^= index * 0xd1b54a32d192ed03ULL;
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t z = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(z);
        words[i + 1] = static_cast<std::uint32_t>(z >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return RandomStream(seq);
}

void validate(const WalkConfig& config) {
    if (config.steps < 1) throw DomainError("steps must be >= 1");
    if (config.walkers < kMinWalkers) {
        std::ostringstream msg;
        msg << "walkers must be >= " << kMinWalkers << ", got " << config.walkers;
        throw DomainError(msg.str());
    }
    if (config.record_steps.empty()) throw DomainError("record_steps must not be empty");
    for (std::size_t i = 0; i < config.record_steps.size(); ++i) {
        const auto n = config.record_steps[i];
        if (n < 1 || n > config.steps) {
            std::ostringstream msg;
            msg << "recorded step " << n << " is outside [1, " << config.steps << "]";
            throw DomainError(msg.str());
        }
        if (i > 0 && n <= config.record_steps[i - 1]) {
            throw DomainError("record_steps must be strictly increasing");
        }
    }
}

double return_window(const StableParams& stable, std::int64_t n) {
    return 0.1 * stable.gamma() * std::pow(static_cast<double>(n), 1.0 / stable.alpha());
}

EnsembleStats run_ensemble(const WalkConfig& config) {
    validate(config);
    const auto& records = config.record_steps;
    const std::size_t n_records = records.size();
    const std::int64_t walkers = config.walkers;
    const std::int64_t blocks = (walkers + kWalkersPerStream - 1) / kWalkersPerStream;

    std::vector<double> windows(n_records);
    for (std::size_t r = 0; r < n_records; ++r) {
        windows[r] = return_window(config.model.stable(), records[r]);
    }

    std::vector<double> block_sums(static_cast<std::size_t>(blocks) * n_records * kSums, 0.0);
    std::vector<std::uint64_t> block_trials(static_cast<std::size_t>(blocks), 0);
    EnsembleStats stats;
    if (config.keep_positions) {
        stats.positions.assign(n_records, std::vector<double>(static_cast<std::size_t>(walkers)));
    }

    auto run_block = [&](std::int64_t b) {
        RandomStream rng = make_stream(config.seed, static_cast<std::uint64_t>(b));
        double* sums = block_sums.data() + static_cast<std::size_t>(b) * n_records * kSums;
        std::uint64_t trials = 0;
        const std::int64_t first = b * kWalkersPerStream;
        const std::int64_t last = std::min(walkers, first + kWalkersPerStream);
        for (std::int64_t w = first; w < last; ++w) {
            double x = 0.0;
            std::size_t r = 0;
            for (std::int64_t step = 1; step <= config.steps && r < n_records; ++step) {
                x += truncated_sample(config.model, rng, trials);
                if (step != records[r]) continue;
                double* s = sums + r * kSums;
                double p = x;
                for (std::size_t k = 0; k < 8; ++k, p *= x) s[k] += p;
                if (std::abs(x) <= windows[r]) s[8] += 1.0;
                if (config.keep_positions) stats.positions[r][static_cast<std::size_t>(w)] = x;
                ++r;
            }
        }
        block_trials[static_cast<std::size_t>(b)] = trials;
    };

    unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (std::int64_t b = next++; b < blocks; b = next++) run_block(b);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Fixed reduction order over blocks.
    const double wd = static_cast<double>(walkers);
    for (std::size_t r = 0; r < n_records; ++r) {
        std::array<double, kSums> total{};
        for (std::int64_t b = 0; b < blocks; ++b) {
            const double* s = block_sums.data() + (static_cast<std::size_t>(b) * n_records + r) * kSums;
            for (std::size_t k = 0; k < kSums; ++k) total[k] += s[k];
        }
        const Central c = central_moments(total.data(), wd);
        const double d2 = -2.0 * c.c4 / (c.c2 * c.c2 * c.c2);
        const double d4 = 1.0 / (c.c2 * c.c2);
        const double kurt_var = (d2 * d2 * (c.c4 - c.c2 * c.c2) + 2.0 * d2 * d4 * (c.c6 - c.c2 * c.c4) +
                                 d4 * d4 * (c.c8 - c.c4 * c.c4)) / wd;
        const double p = total[8] / wd;
        const double width = 2.0 * windows[r];

        StepStats row{};
        row.n = records[r];
        row.mean = c.mean;
        row.mean_se = std::sqrt(c.c2 / wd);
        row.variance = c.c2 * wd / (wd - 1.0);
        row.variance_se = std::sqrt(std::max(0.0, c.c4 - c.c2 * c.c2) / wd);
        row.kurtosis = c.c4 / (c.c2 * c.c2) - 3.0;
        row.kurtosis_se = std::sqrt(std::max(0.0, kurt_var));
        row.return_density = p / width;
        row.return_density_se = std::sqrt(p * (1.0 - p) / wd) / width;
        row.window = windows[r];
        row.count = walkers;
        stats.rows.push_back(row);
    }
    for (auto t : block_trials) stats.trials += t;
    stats.draws = static_cast<std::uint64_t>(walkers) * static_cast<std::uint64_t>(records.back());
    return stats;
}

DiffusionFit fit_diffusion(const EnsembleStats& stats) {
    const std::size_t n_records = stats.rows.size();
    if (n_records == 0 || stats.positions.size() != n_records) {
        throw DomainError("fit_diffusion needs an ensemble run with keep_positions = true");
    }
    const std::size_t walkers = stats.positions.front().size();
    const double wd = static_cast<double>(walkers);
    const double rd = static_cast<double>(n_records);

    // slope = (1/R) sum_n v_n / n; per-walker contributions give its SE.
    double slope = 0.0;
    for (const auto& row : stats.rows) slope += row.variance / static_cast<double>(row.n) / rd;

    std::vector<double> contribution(walkers, 0.0);
    for (std::size_t r = 0; r < n_records; ++r) {
        const double mean = stats.rows[r].mean;
        const double scale = 1.0 / (static_cast<double>(stats.rows[r].n) * rd) * wd / (wd - 1.0);
        const auto& pos = stats.positions[r];
        for (std::size_t w = 0; w < walkers; ++w) {
            const double d = pos[w] - mean;
            contribution[w] += d * d * scale;
        }
    }
    double mean_c = 0.0;
    for (double c : contribution) mean_c += c;
    mean_c /= wd;
    double var_c = 0.0;
    for (double c : contribution) var_c += (c - mean_c) * (c - mean_c);
    var_c /= (wd - 1.0);

    double resid = 0.0;
    double total = 0.0;
    for (const auto& row : stats.rows) {
        const double n = static_cast<double>(row.n);
        const double w = 1.0 / (n * n);
        resid += w * (row.variance - slope * n) * (row.variance - slope * n);
        total += w * row.variance * row.variance;
    }
    return {slope, std::sqrt(var_c / wd), 1.0 - resid / total};
}

namespace {

void check_levy_guard(const TlfModel& model, std::span<const std::int64_t> n_list) {
    const double bound = 0.1 / model.epsilon();
    std::ostringstream bad;
    bool violated = false;
    for (auto n : n_list) {
        if (static_cast<double>(n) > bound) {
            bad << (violated ? ", " : "") << n;
            violated = true;
        }
    }
    if (violated) {
        std::ostringstream msg;
        msg << "return scaling requires n <= 0.1 (ell/gamma)^alpha = " << bound
            << "; violating n: " << bad.str();
        throw DomainError(msg.str());
    }
}

// Stream indices for the reference samples start far above any walker block.
constexpr std::uint64_t kReferenceStreamBase = 1ULL << 62;

}  // namespace

std::vector<ReturnScalingRow> return_scaling_check(const WalkConfig& config) {
    check_levy_guard(config.model, config.record_steps);
    const EnsembleStats stats = run_ensemble(config);
    std::vector<ReturnScalingRow> rows;
    const double inv_alpha = 1.0 / config.model.alpha();
    for (const auto& row : stats.rows) {
        const double scale = std::pow(static_cast<double>(row.n), inv_alpha);
        rows.push_back({row.n, row.return_density * scale, row.return_density_se * scale});
    }
    return rows;
}

std::vector<CollapseRow> collapse_check(const TlfModel& model, std::span<const std::int64_t> n_list,
                                        std::int64_t walkers, std::uint64_t seed, double level,
                                        unsigned threads) {
    if (n_list.empty()) throw DomainError("collapse_check needs at least one n");
    check_levy_guard(model, n_list);
    WalkConfig config{model, n_list.back(), walkers, seed,
                      std::vector<std::int64_t>(n_list.begin(), n_list.end()), true, threads};
    EnsembleStats stats = run_ensemble(config);

    std::vector<CollapseRow> rows;
    for (std::size_t r = 0; r < n_list.size(); ++r) {
        const std::int64_t n = n_list[r];
        const TlfModel rescaled =
            model.with_gamma(model.gamma() * std::pow(static_cast<double>(n), 1.0 / model.alpha()));
        RandomStream rng = make_stream(seed, kReferenceStreamBase + r);
        std::vector<double> reference(static_cast<std::size_t>(walkers));
        for (double& x : reference) x = truncated_sample(rescaled, rng);

        std::vector<double>& walk = stats.positions[r];
        std::sort(walk.begin(), walk.end());
        std::sort(reference.begin(), reference.end());
        const double d = ks_two_sample(walk, reference);
        const double crit = ks_critical_two_sample(walk.size(), reference.size(), level);
        rows.push_back({n, d, crit, d <= crit});
    }
    return rows;
}

}  // namespace tlf
