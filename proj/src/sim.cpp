#include "relaylab/sim.hpp"

#include "relaylab/compress_forward.hpp"
#include "relaylab/fullduplex.hpp"
#include "relaylab/halfduplex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace relaylab {

SchemeValue evaluate_scheme(const std::string& name, const ChannelRealization& ch,
                            const ExperimentSpec& spec) {
    const PowerConstraints& pc = spec.power;
    if (name == "cf-rd") return {cf_rate(ch, pc, CompressionScheme::RD).rate_bits, {}};
    if (name == "cf-wz") return {cf_rate(ch, pc, CompressionScheme::WZ).rate_bits, {}};
    if (name == "coloc-dst") return {colocated_dest_capacity(ch, pc).rate_bits, {}};
    if (name == "coloc-src") {
        return {colocated_source_capacity(ch, pc, spec.tol_nats).rate_bits, {}};
    }
    if (name == "cs") {
        return {cutset_rate(ch, pc, spec.per_antenna, spec.tol_nats).rate_bits, {}};
    }
    if (name == "df") {
        return {df_rate(ch, pc, spec.per_antenna, spec.tol_nats).rate_bits, {}};
    }
    if (name == "direct") return {direct_capacity(ch, pc).rate_bits, {}};
    if (name == "hcs") {
        const HalfDuplexSolution s = hcs_rate(ch, pc, spec.tol_nats);
        return {s.report.rate_bits, s.band.w1};
    }
    if (name == "hdf") {
        const HalfDuplexSolution s = hdf_rate(ch, pc, spec.tol_nats);
        return {s.report.rate_bits, s.band.w1};
    }
    if (name == "twohop") {
        const HalfDuplexSolution s = twohop_rate(ch, pc, spec.tol_nats);
        return {s.report.rate_bits, s.band.w1};
    }
    throw std::invalid_argument("unknown scheme: " + name);
}

namespace {

int worker_cap() {
    if (const char* env = std::getenv("RELAYLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace

const std::vector<std::string>& known_schemes() {
    static const std::vector<std::string> names = {
        "cf-rd",  "cf-wz", "coloc-dst", "coloc-src", "cs",
        "df",     "direct", "hcs",      "hdf",       "twohop"};
    return names;
}

bool is_known_scheme(const std::string& name) {
    const auto& all = known_schemes();
    return std::binary_search(all.begin(), all.end(), name);
}

bool scheme_uses_bandwidth(const std::string& name) {
    return name == "hcs" || name == "hdf" || name == "twohop";
}

std::vector<std::string> canonical_schemes(const std::vector<std::string>& names) {
    if (names.empty()) throw std::invalid_argument("scheme list is empty");
    std::vector<std::string> out = names;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (const auto& name : out) {
        if (!is_known_scheme(name)) throw std::invalid_argument("unknown scheme: " + name);
    }
    return out;
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

void ExperimentSpec::validate() const {
    antennas.validate();
    power.validate();
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    if (!(tol_nats > 0.0)) throw std::invalid_argument("ExperimentSpec: tol must be > 0");
    canonical_schemes(schemes);
}

ExperimentResult run(const ExperimentSpec& spec) {
    spec.validate();
    spec.topology.validate();
    const std::vector<std::string> schemes = canonical_schemes(spec.schemes);

    ExperimentResult res;
    res.channel_checksums.assign(spec.trials, 0);
    for (const auto& name : schemes) {
        res.rates[name].assign(spec.trials, std::nullopt);
        if (scheme_uses_bandwidth(name)) res.w1[name].assign(spec.trials, std::nullopt);
    }

    std::atomic<int> next{0};
    std::mutex failures_mutex;
    const auto work = [&] {
        for (int t = next.fetch_add(1); t < spec.trials; t = next.fetch_add(1)) {
            const ChannelRealization ch =
                generate_realization(spec.antennas, spec.topology, spec.seed,
                                     static_cast<std::uint64_t>(t));
            res.channel_checksums[t] = realization_checksum(ch);
            for (const auto& name : schemes) {
                try {
                    const SchemeValue v = evaluate_scheme(name, ch, spec);
                    res.rates[name][t] = v.rate_bits;
                    if (v.w1) res.w1[name][t] = v.w1;
                } catch (const std::exception& e) {
                    const std::lock_guard<std::mutex> lock(failures_mutex);
                    res.failures.push_back({name, t, e.what()});
                }
            }
        }
    };

    const int workers = std::min(worker_cap(), spec.trials);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // Collection order depends on scheduling; the stored order must not.
    std::sort(res.failures.begin(), res.failures.end(),
              [](const TrialFailure& a, const TrialFailure& b) {
                  return std::tie(a.trial, a.scheme) < std::tie(b.trial, b.scheme);
              });
    return res;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical_cdf: empty sample set");
    for (const double s : samples) {
        if (!std::isfinite(s)) throw std::invalid_argument("empirical_cdf: non-finite sample");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    std::vector<CdfPoint> out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
        out.push_back({samples[i], static_cast<double>(i + 1) / n});
    }
    return out;
}

SampleStats sample_stats(const std::vector<double>& samples) {
    SampleStats st;
    st.count = static_cast<int>(samples.size());
    if (st.count == 0) return st;
    double sum = 0.0;
    for (const double s : samples) sum += s;
    st.mean = sum / st.count;
    if (st.count < 2) return st;
    double ss = 0.0;
    for (const double s : samples) ss += (s - st.mean) * (s - st.mean);
    st.stderr_mean = std::sqrt(ss / (st.count - 1)) / std::sqrt(static_cast<double>(st.count));
    return st;
}

SweepResult position_sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.dx_grid.empty()) {
        throw std::invalid_argument("position_sweep: dx grid is empty");
    }
    const std::vector<std::string> schemes = canonical_schemes(spec.schemes);

    SweepResult out;
    for (const double dx : spec.dx_grid) {
        ExperimentSpec local = spec;
        local.topology.dx = dx;
        local.dx_grid.clear();
        try {
            local.topology.validate();
        } catch (const TopologyDegenerateError&) {
            out.skipped_dx.push_back(dx);
            continue;
        }

        const ExperimentResult res = run(local);
        for (const TrialFailure& f : res.failures) {
            std::ostringstream msg;
            msg << "dx=" << dx << ": " << f.message;
            out.failures.push_back({f.scheme, f.trial, msg.str()});
        }
        for (const auto& name : schemes) {
            std::vector<double> rates;
            std::vector<double> splits;
            const auto& slots = res.rates.at(name);
            for (int t = 0; t < local.trials; ++t) {
                if (!slots[t]) continue;
                rates.push_back(*slots[t]);
                if (scheme_uses_bandwidth(name)) {
                    const auto& w = res.w1.at(name)[t];
                    if (w) splits.push_back(*w);
                }
            }
            if (rates.empty()) continue;
            const SampleStats st = sample_stats(rates);
            SweepRow row;
            row.dx = dx;
            row.scheme = name;
            row.mean_rate_bits = st.mean;
            row.stderr_bits = st.stderr_mean;
            row.samples = st.count;
            if (scheme_uses_bandwidth(name) && !splits.empty()) {
                row.mean_w1 = sample_stats(splits).mean;
            }
            out.rows.push_back(row);
        }
    }
    return out;
}

}  // namespace relaylab
