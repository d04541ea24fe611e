#pragma once

#include "relaylab/channel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relaylab {

/// All scheme tags the harness can evaluate, in alphabetical order.
const std::vector<std::string>& known_schemes();
bool is_known_scheme(const std::string& name);

/// Half-duplex schemes carry a bandwidth split alongside the rate.
bool scheme_uses_bandwidth(const std::string& name);

/// Sorted, deduplicated copy; throws std::invalid_argument on unknown names
/// or an empty list.
std::vector<std::string> canonical_schemes(const std::vector<std::string>& names);

double db_to_power(double db);

struct ExperimentSpec {
    AntennaConfig antennas;
    PowerConstraints power;
    Topology topology;
    std::vector<double> dx_grid;  // sweep positions; ignored by run()
    std::vector<std::string> schemes;
    int trials = 50;
    std::uint64_t seed = 1;
    bool per_antenna = false;
    double tol_nats = 1e-6;

    void validate() const;
};

struct TrialFailure {
    std::string scheme;
    int trial = 0;
    std::string message;
};

/// Rate (and bandwidth split, for half-duplex schemes) of one scheme on one
/// realization, under the spec's power/tolerance/per-antenna settings.
struct SchemeValue {
    double rate_bits = 0.0;
    std::optional<double> w1;
};

SchemeValue evaluate_scheme(const std::string& name, const ChannelRealization& ch,
                            const ExperimentSpec& spec);

/// Per-trial per-scheme outcomes. A missing rate marks a failed solve; the
/// trial's other schemes are unaffected. channel_checksums[t] is the
/// fingerprint of the one realization every scheme saw in trial t.
struct ExperimentResult {
    std::map<std::string, std::vector<std::optional<double>>> rates;
    std::map<std::string, std::vector<std::optional<double>>> w1;
    std::vector<TrialFailure> failures;
    std::vector<std::uint64_t> channel_checksums;

    int trials() const { return static_cast<int>(channel_checksums.size()); }
    int failed_solves() const { return static_cast<int>(failures.size()); }
};

/// Evaluates every requested scheme on shared per-trial realizations.
/// Deterministic given the spec; trials may run on a worker pool capped by
/// RELAYLAB_THREADS, and scheduling never changes the result.
ExperimentResult run(const ExperimentSpec& spec);

struct CdfPoint {
    double rate_bits = 0.0;
    double quantile = 0.0;
};

/// Step function of the sorted samples: quantile k/n at the k-th sorted
/// sample; tied values share the higher step, so each distinct value appears
/// once. Throws std::invalid_argument on an empty sample set.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

struct SampleStats {
    double mean = 0.0;
    double stderr_mean = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
    int count = 0;
};

SampleStats sample_stats(const std::vector<double>& samples);

struct SweepRow {
    double dx = 0.0;
    std::string scheme;
    double mean_rate_bits = 0.0;
    double stderr_bits = 0.0;
    std::optional<double> mean_w1;  // bandwidth schemes only
    int samples = 0;
};

/// Rows are dx-major in grid order, scheme-alphabetical within a dx. A
/// (dx, scheme) pair with zero successful trials emits no row; degenerate
/// grid entries are recorded in skipped_dx and produce nothing.
struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<TrialFailure> failures;
    std::vector<double> skipped_dx;
};

/// Runs the spec once per dx in dx_grid. Fading depends only on (cfg, seed,
/// trial), so every position sees the same draws under different path-loss
/// scales.
SweepResult position_sweep(const ExperimentSpec& spec);

}  // namespace relaylab
