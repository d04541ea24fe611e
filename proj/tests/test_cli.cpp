#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "relaylab/cli.hpp"
#include "relaylab/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace relaylab;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"relaylab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> fields;
    std::string part;
    std::istringstream is(line);
    while (std::getline(is, part, ',')) fields.push_back(part);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

const std::vector<std::string> kSmall = {"--m1", "2", "--n1", "2",
                                         "--m2", "2", "--n2", "2"};

std::vector<std::string> with_small(std::vector<std::string> args) {
    args.insert(args.end(), kSmall.begin(), kSmall.end());
    return args;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli({}).code == kExitUsage);
    CHECK(run_cli({"cdf", "--bogus"}).code == kExitUsage);
    CHECK(run_cli({"cdf", "--schemes", "cs,nonsense"}).code == kExitUsage);
    CHECK(run_cli({"single", "--format", "xml"}).code == kExitUsage);
    CHECK(run_cli({"single", "--trials", "0", "--schemes", "direct"}).code == kExitUsage);
    CHECK(run_cli({"cdf", "--m1", "0"}).code == kExitUsage);

    const CliRun unknown = run_cli({"cdf", "--schemes", "cs,nonsense"});
    CHECK(unknown.err.find("nonsense") != std::string::npos);
    CHECK(unknown.out.empty());
}

TEST_CASE("help text exits cleanly") {
    const CliRun top = run_cli({"--help"});
    CHECK(top.code == kExitOk);
    CHECK(top.out.find("single") != std::string::npos);
    CHECK(top.out.find("sweep") != std::string::npos);
}

TEST_CASE("single prints one alphabetical row per scheme") {
    const CliRun r = run_cli(with_small({"single", "--schemes", "direct,df,cs"}));
    REQUIRE(r.code == kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "scheme,rate_bits");
    CHECK(fields_of(lines[1])[0] == "cs");
    CHECK(fields_of(lines[2])[0] == "df");
    CHECK(fields_of(lines[3])[0] == "direct");

    // values are the solver's, formatted with 12 significant digits
    ExperimentSpec spec;
    spec.antennas = {2, 2, 2, 2};
    spec.schemes = {"cs", "df", "direct"};
    const ChannelRealization ch =
        generate_realization(spec.antennas, spec.topology, spec.seed, 0);
    CHECK(fields_of(lines[1])[1] == format_rate(evaluate_scheme("cs", ch, spec).rate_bits));
    CHECK(fields_of(lines[3])[1] ==
          format_rate(evaluate_scheme("direct", ch, spec).rate_bits));
}

TEST_CASE("cdf rows are trial-major and scheme-alphabetical") {
    const CliRun r =
        run_cli(with_small({"cdf", "--trials", "3", "--schemes", "direct,cs"}));
    REQUIRE(r.code == kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "trial,scheme,rate_bits");
    const char* expect[6][2] = {{"0", "cs"}, {"0", "direct"}, {"1", "cs"},
                                {"1", "direct"}, {"2", "cs"}, {"2", "direct"}};
    for (int i = 0; i < 6; ++i) {
        const auto f = fields_of(lines[i + 1]);
        REQUIRE(f.size() == 3);
        CHECK(f[0] == expect[i][0]);
        CHECK(f[1] == expect[i][1]);
        CHECK(std::stod(f[2]) > 0.0);
    }
}

TEST_CASE("rate formatting pins 12 significant digits") {
    CHECK(format_rate(2.0) == "2");
    CHECK(format_rate(1.0 / 3.0) == "0.333333333333");
    CHECK(format_rate(3.14159265358979) == "3.14159265359");
    CHECK(format_rate(-1.25e-7) == "-1.25e-07");
}

TEST_CASE("identical invocations produce byte-identical files") {
    const std::string a = temp_path("relaylab_cli_det_a.csv");
    const std::string b = temp_path("relaylab_cli_det_b.csv");
    const auto args = with_small(
        {"cdf", "--trials", "10", "--seed", "7", "--schemes", "cs,df,direct"});

    auto with_out = [&](const std::string& path) {
        auto v = args;
        v.insert(v.end(), {"--out", path});
        return v;
    };
    REQUIRE(run_cli(with_out(a)).code == kExitOk);
    REQUIRE(run_cli(with_out(b)).code == kExitOk);
    const std::string text_a = slurp(a);
    CHECK(text_a == slurp(b));
    CHECK(!text_a.empty());

    // stdout and --out carry the same bytes
    const CliRun direct_run = run_cli(args);
    CHECK(direct_run.out == text_a);
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("sweep emits the dx grid with bandwidth means only where defined") {
    const std::string path = temp_path("relaylab_cli_sweep.csv");
    const CliRun r = run_cli(with_small({"sweep", "--dx-grid", "0:1:0.5", "--trials",
                                         "2", "--schemes", "twohop,direct", "--out",
                                         path}));
    REQUIRE(r.code == kExitOk);
    const auto lines = lines_of(slurp(path));
    std::remove(path.c_str());
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "dx,scheme,mean_rate_bits,stderr_bits,mean_w1");

    std::vector<std::string> direct_means;
    for (int i = 1; i < 7; ++i) {
        const auto f = fields_of(lines[i]);
        REQUIRE(f.size() == 5);
        const std::string expected_dx = format_rate(0.5 * ((i - 1) / 2));
        CHECK(f[0] == expected_dx);
        if (f[1] == "direct") {
            CHECK(f[4].empty());
            direct_means.push_back(f[2]);
        } else {
            CHECK(f[1] == "twohop");
            const double w1 = std::stod(f[4]);
            CHECK(w1 > 0.0);
            CHECK(w1 < 1.0);
        }
    }
    // fading is shared across dx and the direct path does not see the relay
    REQUIRE(direct_means.size() == 3);
    CHECK(direct_means[0] == direct_means[1]);
    CHECK(direct_means[0] == direct_means[2]);
}

TEST_CASE("sweep flag validation") {
    CHECK(run_cli({"sweep", "--dx-grid", "0:1:0.5"}).code == kExitUsage);  // no --out
    CHECK(run_cli({"sweep", "--out", "/tmp/x.csv"}).code == kExitUsage);   // no grid
    for (const char* grid : {"0:1", "1:0:0.5", "0:1:0", "a:b:c"}) {
        CHECK(run_cli({"sweep", "--dx-grid", grid, "--out", "/tmp/x.csv"}).code ==
              kExitUsage);
    }
}

TEST_CASE("unwritable output path exits with the I/O code") {
    const CliRun r = run_cli(with_small({"single", "--schemes", "direct", "--out",
                                         "/dev/null/impossible.csv"}));
    CHECK(r.code == kExitIo);
    CHECK(r.err.find("impossible.csv") != std::string::npos);
}

TEST_CASE("oracle compares solver and grid search on scalar instances") {
    const CliRun r =
        run_cli({"oracle", "--schemes", "cs,df,twohop", "--trials", "5"});
    REQUIRE(r.code == kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 17);  // header + 15 rows + footer
    CHECK(lines[0] == "trial,scheme,solver_bits,oracle_bits,delta_bits");
    CHECK(lines.back().rfind("# max_abs_delta_bits = ", 0) == 0);
    double max_delta = 0.0;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        const auto f = fields_of(lines[i]);
        REQUIRE(f.size() == 5);
        const double delta = std::abs(std::stod(f[4]));
        CHECK(delta <= 1e-3);
        max_delta = std::max(max_delta, delta);
        CHECK(std::abs(std::stod(f[2]) - std::stod(f[3])) ==
              doctest::Approx(delta).epsilon(1e-6));
    }
    CHECK(lines.back() == "# max_abs_delta_bits = " + format_rate(max_delta));

    CHECK(run_cli({"oracle", "--m1", "2"}).code == kExitUsage);
}

TEST_CASE("json output carries the same rows as csv") {
    const CliRun csv = run_cli(with_small({"single", "--schemes", "twohop,direct"}));
    const CliRun js = run_cli(
        with_small({"single", "--schemes", "twohop,direct", "--format", "json"}));
    REQUIRE(csv.code == kExitOk);
    REQUIRE(js.code == kExitOk);

    const auto doc = nlohmann::json::parse(js.out);
    CHECK(doc.at("command") == "single");
    const auto& rows = doc.at("rows");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("scheme") == "direct");
    CHECK(rows[1].at("scheme") == "twohop");

    const auto csv_lines = lines_of(csv.out);
    CHECK(format_rate(rows[0].at("rate_bits").get<double>()) ==
          fields_of(csv_lines[1])[1]);

    const std::string sweep_path = temp_path("relaylab_cli_sweep.json");
    const CliRun sw = run_cli(with_small({"sweep", "--dx-grid", "0.5:0.5:1", "--trials",
                                          "2", "--schemes", "twohop,direct", "--format",
                                          "json", "--out", sweep_path}));
    REQUIRE(sw.code == kExitOk);
    const auto sweep_doc = nlohmann::json::parse(slurp(sweep_path));
    std::remove(sweep_path.c_str());
    REQUIRE(sweep_doc.at("rows").size() == 2);
    CHECK(sweep_doc.at("rows")[0].at("mean_w1").is_null());
    CHECK(sweep_doc.at("rows")[1].at("mean_w1").is_number());
}

TEST_CASE("channel dump mirrors the generator output") {
    const std::string path = temp_path("relaylab_cli_dump.txt");
    const CliRun r = run_cli(with_small({"single", "--schemes", "direct", "--seed",
                                         "3", "--dump-channels", path}));
    REQUIRE(r.code == kExitOk);

    AntennaConfig cfg{2, 2, 2, 2};
    Topology topo;
    std::ostringstream expected;
    write_channel_dump(expected, cfg, topo, 3, generate_realizations(cfg, topo, 3, 1));
    CHECK(slurp(path) == expected.str());
    std::remove(path.c_str());
}

TEST_CASE("power flags are read in decibels") {
    const CliRun r = run_cli(
        {"single", "--m1", "1", "--n1", "1", "--m2", "1", "--n2", "1", "--schemes",
         "direct", "--p1-db", "10"});
    REQUIRE(r.code == kExitOk);

    const ChannelRealization ch = generate_realization({1, 1, 1, 1}, Topology{}, 1, 0);
    const double g11 = std::norm(ch.h11(0, 0));
    const double expected = std::log2(1.0 + 10.0 * g11);
    CHECK(std::stod(fields_of(lines_of(r.out)[1])[1]) == doctest::Approx(expected));
}
