#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaylab/fullduplex.hpp"
#include "relaylab/sim.hpp"

#include <cstdlib>
#include <cmath>

using namespace relaylab;

namespace {

ExperimentSpec small_spec(std::vector<std::string> schemes, int trials) {
    ExperimentSpec spec;
    spec.antennas.m1 = spec.antennas.n1 = spec.antennas.m2 = spec.antennas.n2 = 2;
    spec.schemes = std::move(schemes);
    spec.trials = trials;
    return spec;
}

}  // namespace

TEST_CASE("scheme registry") {
    CHECK(known_schemes().size() == 10);
    CHECK(is_known_scheme("cf-wz"));
    CHECK(!is_known_scheme("amplify"));
    CHECK(scheme_uses_bandwidth("hcs"));
    CHECK(scheme_uses_bandwidth("twohop"));
    CHECK(!scheme_uses_bandwidth("cs"));

    const auto canon = canonical_schemes({"df", "cs", "df", "direct"});
    CHECK(canon == std::vector<std::string>{"cs", "df", "direct"});
    CHECK_THROWS_AS(canonical_schemes({}), std::invalid_argument);
    CHECK_THROWS_AS(canonical_schemes({"cs", "bogus"}), std::invalid_argument);

    CHECK(std::abs(db_to_power(0.0) - 1.0) <= 1e-15);
    CHECK(std::abs(db_to_power(10.0) - 10.0) <= 1e-12);
    CHECK(std::abs(db_to_power(-3.0) - std::pow(10.0, -0.3)) <= 1e-12);
}

TEST_CASE("empirical cdf steps") {
    SUBCASE("distinct samples") {
        const auto cdf = empirical_cdf({3.0, 1.0, 2.0});
        REQUIRE(cdf.size() == 3);
        CHECK(cdf[0].rate_bits == 1.0);
        CHECK(std::abs(cdf[0].quantile - 1.0 / 3.0) <= 1e-15);
        CHECK(cdf[1].rate_bits == 2.0);
        CHECK(std::abs(cdf[1].quantile - 2.0 / 3.0) <= 1e-15);
        CHECK(cdf[2].rate_bits == 3.0);
        CHECK(cdf[2].quantile == 1.0);
    }
    SUBCASE("ties share the higher step") {
        const auto cdf = empirical_cdf({5.0, 5.0});
        REQUIRE(cdf.size() == 1);
        CHECK(cdf[0].rate_bits == 5.0);
        CHECK(cdf[0].quantile == 1.0);
    }
    SUBCASE("random samples give a monotone curve ending at one") {
        GaussianSource src(7);
        std::vector<double> samples;
        for (int i = 0; i < 50; ++i) samples.push_back(src.next_complex().real());
        const auto cdf = empirical_cdf(samples);
        REQUIRE(!cdf.empty());
        for (std::size_t i = 1; i < cdf.size(); ++i) {
            CHECK(cdf[i].rate_bits > cdf[i - 1].rate_bits);
            CHECK(cdf[i].quantile > cdf[i - 1].quantile);
        }
        CHECK(cdf.back().quantile == 1.0);
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(empirical_cdf({}), std::invalid_argument);
        CHECK_THROWS_AS(empirical_cdf({1.0, std::nan("")}), std::invalid_argument);
    }
}

TEST_CASE("sample statistics") {
    const SampleStats st = sample_stats({1.0, 2.0, 3.0, 4.0});
    CHECK(st.count == 4);
    CHECK(std::abs(st.mean - 2.5) <= 1e-15);
    // sample variance 5/3, stderr = sqrt(5/3)/2
    CHECK(std::abs(st.stderr_mean - std::sqrt(5.0 / 3.0) / 2.0) <= 1e-15);

    const SampleStats one = sample_stats({7.0});
    CHECK(one.count == 1);
    CHECK(one.mean == 7.0);
    CHECK(one.stderr_mean == 0.0);
}

TEST_CASE("run is deterministic and scheduling independent") {
    const ExperimentSpec spec = small_spec({"direct", "df", "twohop"}, 4);
    setenv("RELAYLAB_THREADS", "1", 1);
    const ExperimentResult a = run(spec);
    const ExperimentResult b = run(spec);
    setenv("RELAYLAB_THREADS", "3", 1);
    const ExperimentResult c = run(spec);
    unsetenv("RELAYLAB_THREADS");

    CHECK(a.channel_checksums == b.channel_checksums);
    CHECK(a.channel_checksums == c.channel_checksums);
    REQUIRE(a.rates.size() == 3);
    for (const auto& [name, slots] : a.rates) {
        CHECK(slots == b.rates.at(name));
        CHECK(slots == c.rates.at(name));
        CHECK(static_cast<int>(slots.size()) == spec.trials);
        for (const auto& r : slots) CHECK(r.has_value());
    }
    CHECK(a.w1.at("twohop") == c.w1.at("twohop"));
    CHECK(a.failures.empty());

    // every scheme saw the realization the generator produces for (seed, t)
    for (int t = 0; t < spec.trials; ++t) {
        const ChannelRealization ch = generate_realization(
            spec.antennas, spec.topology, spec.seed, static_cast<std::uint64_t>(t));
        CHECK(a.channel_checksums[t] == realization_checksum(ch));
    }
}

TEST_CASE("per-trial dominance from a shared realization") {
    const ExperimentSpec spec = small_spec({"cs", "df", "direct"}, 3);
    const ExperimentResult res = run(spec);
    for (int t = 0; t < spec.trials; ++t) {
        const double cs = *res.rates.at("cs")[t];
        CHECK(*res.rates.at("df")[t] <= cs + 2e-6);
        CHECK(*res.rates.at("direct")[t] <= cs + 2e-6);
    }
}

TEST_CASE("failures are recorded without poisoning the run") {
    ExperimentSpec spec = small_spec({"cs", "direct"}, 3);
    spec.per_antenna = true;
    spec.power.per_antenna_source = RVector::Constant(5, 0.2);  // m1 is 2
    const ExperimentResult res = run(spec);

    CHECK(static_cast<int>(res.failures.size()) == spec.trials);
    for (int t = 0; t < spec.trials; ++t) {
        CHECK(res.failures[t].scheme == "cs");
        CHECK(res.failures[t].trial == t);
        CHECK(!res.rates.at("cs")[t].has_value());
        CHECK(res.rates.at("direct")[t].has_value());
    }
}

TEST_CASE("position sweep shares fading across the grid") {
    ExperimentSpec spec = small_spec({"twohop", "direct"}, 2);
    spec.dx_grid = {0.2, 0.5};
    const SweepResult sweep = position_sweep(spec);

    REQUIRE(sweep.rows.size() == 4);
    CHECK(sweep.rows[0].dx == 0.2);
    CHECK(sweep.rows[0].scheme == "direct");
    CHECK(sweep.rows[1].dx == 0.2);
    CHECK(sweep.rows[1].scheme == "twohop");
    CHECK(sweep.rows[2].dx == 0.5);
    CHECK(sweep.rows[3].dx == 0.5);
    for (const auto& row : sweep.rows) {
        CHECK(row.samples == spec.trials);
        CHECK(std::isfinite(row.mean_rate_bits));
        CHECK(std::isfinite(row.stderr_bits));
        CHECK(row.mean_w1.has_value() == (row.scheme == "twohop"));
    }
    // the source-destination distance never changes, so the direct rate is
    // identical at both relay positions only if the fading draws repeat
    CHECK(sweep.rows[0].mean_rate_bits == sweep.rows[2].mean_rate_bits);
    CHECK(sweep.failures.empty());
    CHECK(sweep.skipped_dx.empty());
}

TEST_CASE("degenerate sweep positions are skipped and recorded") {
    ExperimentSpec spec = small_spec({"direct"}, 1);
    spec.topology.dy = 0.0;
    spec.dx_grid = {0.0, 0.5, 1.0};
    const SweepResult sweep = position_sweep(spec);
    CHECK(sweep.skipped_dx == std::vector<double>{0.0, 1.0});
    REQUIRE(sweep.rows.size() == 1);
    CHECK(sweep.rows[0].dx == 0.5);
}

TEST_CASE("single-scheme sweep row matches the scheme mean") {
    ExperimentSpec spec = small_spec({"coloc-src"}, 3);
    spec.dx_grid = {0.4};
    const SweepResult sweep = position_sweep(spec);
    REQUIRE(sweep.rows.size() == 1);

    Topology topo = spec.topology;
    topo.dx = 0.4;
    std::vector<double> rates;
    for (int t = 0; t < spec.trials; ++t) {
        const ChannelRealization ch =
            generate_realization(spec.antennas, topo, spec.seed, t);
        rates.push_back(colocated_source_capacity(ch, spec.power).rate_bits);
    }
    const SampleStats st = sample_stats(rates);
    CHECK(std::abs(sweep.rows[0].mean_rate_bits - st.mean) <= 1e-12);
    CHECK(std::abs(sweep.rows[0].stderr_bits - st.stderr_mean) <= 1e-12);
}

TEST_CASE("spec validation") {
    ExperimentSpec spec = small_spec({"cs"}, 0);
    CHECK_THROWS_AS(run(spec), std::invalid_argument);
    spec.trials = 1;
    spec.schemes = {};
    CHECK_THROWS_AS(run(spec), std::invalid_argument);
    spec.schemes = {"cs"};
    spec.tol_nats = 0.0;
    CHECK_THROWS_AS(run(spec), std::invalid_argument);
    spec.tol_nats = 1e-6;
    CHECK_THROWS_AS(position_sweep(spec), std::invalid_argument);  // empty grid
}
