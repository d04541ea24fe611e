#include "relaylab/cli.hpp"

#include "relaylab/oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace relaylab {

std::string format_rate(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

struct ParsedFlags {
    int m1 = 4;
    int n1 = 4;
    int m2 = 4;
    int n2 = 4;
    double p1_db = 0.0;
    double p2_db = 0.0;
    double dx = 1.0 / 3.0;
    double dy = 0.5;
    double eta = 4.0;
    int trials = 50;
    std::uint64_t seed = 1;
    std::vector<std::string> schemes;
    bool per_antenna = false;
    double tol = 1e-6;
    std::string dx_grid;
    std::string out;
    std::string format = "csv";
    std::string dump_channels;
};

struct SubFlags {
    CLI::Option* m1 = nullptr;
    CLI::Option* n1 = nullptr;
    CLI::Option* m2 = nullptr;
    CLI::Option* n2 = nullptr;
};

SubFlags add_experiment_flags(CLI::App* sub, ParsedFlags& f, bool with_dx) {
    SubFlags opts;
    opts.m1 = sub->add_option("--m1", f.m1, "source transmit antennas");
    opts.n1 = sub->add_option("--n1", f.n1, "destination receive antennas");
    opts.m2 = sub->add_option("--m2", f.m2, "relay transmit antennas");
    opts.n2 = sub->add_option("--n2", f.n2, "relay receive antennas");
    sub->add_option("--p1-db", f.p1_db, "source power in dB");
    sub->add_option("--p2-db", f.p2_db, "relay power in dB");
    if (with_dx) sub->add_option("--dx", f.dx, "relay x position");
    sub->add_option("--dy", f.dy, "relay y position");
    sub->add_option("--eta", f.eta, "path-loss exponent");
    sub->add_option("--trials", f.trials, "number of channel realizations")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "base RNG seed");
    sub->add_option("--schemes", f.schemes, "comma-separated scheme list")
        ->delimiter(',');
    sub->add_flag("--per-antenna", f.per_antenna,
                  "split each node's power equally across its antennas");
    sub->add_option("--tol", f.tol, "solver tolerance in nats");
    sub->add_option("--out", f.out, "output file (default: stdout)");
    return opts;
}

std::vector<double> parse_dx_grid(const std::string& text) {
    std::istringstream is(text);
    std::string part;
    std::vector<double> vals;
    while (std::getline(is, part, ':')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || part.empty()) {
            throw std::invalid_argument("--dx-grid expects start:stop:step");
        }
        vals.push_back(v);
    }
    if (vals.size() != 3) throw std::invalid_argument("--dx-grid expects start:stop:step");
    const double start = vals[0], stop = vals[1], step = vals[2];
    if (!(step > 0.0)) throw std::invalid_argument("--dx-grid step must be > 0");
    if (stop < start - 1e-12) throw std::invalid_argument("--dx-grid stop precedes start");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = start + i * step;
    return grid;
}

int write_text(const std::string& text, const std::optional<std::string>& path,
               std::ostream& out, std::ostream& err) {
    if (!path) {
        out << text;
        return kExitOk;
    }
    std::ofstream file(*path, std::ios::binary | std::ios::trunc);
    if (!file) {
        err << "relaylab: cannot open output file: " << *path << "\n";
        return kExitIo;
    }
    file << text;
    file.flush();
    return file ? kExitOk : (err << "relaylab: write failed: " << *path << "\n", kExitIo);
}

void report_failures(const std::vector<TrialFailure>& failures, std::ostream& err) {
    for (const TrialFailure& f : failures) {
        err << "relaylab: solve failed: trial " << f.trial << " scheme " << f.scheme
            << ": " << f.message << "\n";
    }
}

int failure_rate_exit(std::size_t failed, std::size_t attempted, std::ostream& err) {
    if (attempted == 0) return kExitOk;
    const double rate = static_cast<double>(failed) / static_cast<double>(attempted);
    if (rate <= kMaxFailureRate) return kExitOk;
    err << "relaylab: " << failed << " of " << attempted
        << " solves failed (above the " << kMaxFailureRate * 100.0 << "% threshold)\n";
    return kExitSolverFailures;
}

int dump_channels_file(const CliConfig& cfg, std::ostream& err) {
    std::ofstream file(*cfg.dump_channels_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        err << "relaylab: cannot open channel dump: " << *cfg.dump_channels_path << "\n";
        return kExitIo;
    }
    const auto chs = generate_realizations(cfg.spec.antennas, cfg.spec.topology,
                                           cfg.spec.seed, cfg.spec.trials);
    write_channel_dump(file, cfg.spec.antennas, cfg.spec.topology, cfg.spec.seed, chs);
    file.flush();
    if (!file) {
        err << "relaylab: write failed: " << *cfg.dump_channels_path << "\n";
        return kExitIo;
    }
    return kExitOk;
}

// ---- emitters ----------------------------------------------------------

struct RateRow {
    int trial = 0;
    std::string scheme;
    double rate_bits = 0.0;
};

std::vector<RateRow> collect_rows(const ExperimentResult& res,
                                  const std::vector<std::string>& schemes) {
    std::vector<RateRow> rows;
    const int trials = res.trials();
    for (int t = 0; t < trials; ++t) {
        for (const auto& name : schemes) {
            const auto& slot = res.rates.at(name)[t];
            if (slot) rows.push_back({t, name, *slot});
        }
    }
    return rows;
}

std::string render_rows_csv(const std::vector<RateRow>& rows, bool with_trial) {
    std::ostringstream os;
    os << (with_trial ? "trial,scheme,rate_bits" : "scheme,rate_bits") << "\n";
    for (const RateRow& r : rows) {
        if (with_trial) os << r.trial << ",";
        os << r.scheme << "," << format_rate(r.rate_bits) << "\n";
    }
    return os.str();
}

std::string render_rows_json(const std::vector<RateRow>& rows, bool with_trial,
                             const std::string& command) {
    std::ostringstream os;
    os << "{\n  \"command\": \"" << command << "\",\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << (i ? ",\n    " : "\n    ") << "{";
        if (with_trial) os << "\"trial\": " << rows[i].trial << ", ";
        os << "\"scheme\": \"" << rows[i].scheme << "\", \"rate_bits\": "
           << format_rate(rows[i].rate_bits) << "}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

std::string render_sweep_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "dx,scheme,mean_rate_bits,stderr_bits,mean_w1\n";
    for (const SweepRow& r : sweep.rows) {
        os << format_rate(r.dx) << "," << r.scheme << "," << format_rate(r.mean_rate_bits)
           << "," << format_rate(r.stderr_bits) << ","
           << (r.mean_w1 ? format_rate(*r.mean_w1) : "") << "\n";
    }
    return os.str();
}

std::string render_sweep_json(const SweepResult& sweep) {
    std::ostringstream os;
    os << "{\n  \"command\": \"sweep\",\n  \"rows\": [";
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
        const SweepRow& r = sweep.rows[i];
        os << (i ? ",\n    " : "\n    ") << "{\"dx\": " << format_rate(r.dx)
           << ", \"scheme\": \"" << r.scheme << "\", \"mean_rate_bits\": "
           << format_rate(r.mean_rate_bits) << ", \"stderr_bits\": "
           << format_rate(r.stderr_bits) << ", \"mean_w1\": "
           << (r.mean_w1 ? format_rate(*r.mean_w1) : "null") << "}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

// ---- subcommands -------------------------------------------------------

int run_rate_table(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const bool with_trial = cfg.command == "cdf";
    const ExperimentResult res = run(cfg.spec);
    report_failures(res.failures, err);

    const auto schemes = canonical_schemes(cfg.spec.schemes);
    const auto rows = collect_rows(res, schemes);
    const std::string text = cfg.format == "json"
                                 ? render_rows_json(rows, with_trial, cfg.command)
                                 : render_rows_csv(rows, with_trial);
    if (const int rc = write_text(text, cfg.out_path, out, err); rc != kExitOk) return rc;
    if (cfg.dump_channels_path) {
        if (const int rc = dump_channels_file(cfg, err); rc != kExitOk) return rc;
    }
    return failure_rate_exit(res.failures.size(),
                             static_cast<std::size_t>(res.trials()) * schemes.size(), err);
}

int run_sweep_command(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const SweepResult sweep = position_sweep(cfg.spec);
    report_failures(sweep.failures, err);
    for (const double dx : sweep.skipped_dx) {
        err << "relaylab: skipped degenerate relay position dx=" << dx << "\n";
    }

    const std::string text =
        cfg.format == "json" ? render_sweep_json(sweep) : render_sweep_csv(sweep);
    if (const int rc = write_text(text, cfg.out_path, out, err); rc != kExitOk) return rc;

    const std::size_t positions = cfg.spec.dx_grid.size() - sweep.skipped_dx.size();
    const std::size_t attempted = positions * cfg.spec.trials *
                                  canonical_schemes(cfg.spec.schemes).size();
    return failure_rate_exit(sweep.failures.size(), attempted, err);
}

int run_oracle_command(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto schemes = canonical_schemes(cfg.spec.schemes);
    std::vector<TrialFailure> failures;
    double max_abs_delta = 0.0;

    std::ostringstream os;
    os << "trial,scheme,solver_bits,oracle_bits,delta_bits\n";
    for (int t = 0; t < cfg.spec.trials; ++t) {
        const ChannelRealization ch =
            generate_realization(cfg.spec.antennas, cfg.spec.topology, cfg.spec.seed,
                                 static_cast<std::uint64_t>(t));
        for (const auto& name : schemes) {
            double solver = 0.0;
            try {
                solver = evaluate_scheme(name, ch, cfg.spec).rate_bits;
            } catch (const std::exception& e) {
                failures.push_back({name, t, e.what()});
                continue;
            }
            const double oracle = scalar_oracle_bits(name, ch, cfg.spec.power);
            const double delta = solver - oracle;
            max_abs_delta = std::max(max_abs_delta, std::abs(delta));
            os << t << "," << name << "," << format_rate(solver) << ","
               << format_rate(oracle) << "," << format_rate(delta) << "\n";
        }
    }
    os << "# max_abs_delta_bits = " << format_rate(max_abs_delta) << "\n";

    report_failures(failures, err);
    if (const int rc = write_text(os.str(), cfg.out_path, out, err); rc != kExitOk) {
        return rc;
    }
    return failure_rate_exit(failures.size(),
                             static_cast<std::size_t>(cfg.spec.trials) * schemes.size(),
                             err);
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"MIMO relay-channel rate experiments"};
    app.require_subcommand(1);

    ParsedFlags f;
    CLI::App* single = app.add_subcommand(
        "single", "rates of one channel realization, one row per scheme");
    CLI::App* cdf = app.add_subcommand(
        "cdf", "per-trial rates over seeded realizations, one row per (trial, scheme)");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "mean rates and bandwidth splits across relay positions");
    CLI::App* oracle = app.add_subcommand(
        "oracle", "solver-vs-brute-force deltas on scalar instances");

    add_experiment_flags(single, f, true);
    add_experiment_flags(cdf, f, true);
    add_experiment_flags(sweep, f, false);
    const SubFlags oracle_antennas = add_experiment_flags(oracle, f, true);

    for (CLI::App* sub : {single, cdf, sweep}) {
        sub->add_option("--format", f.format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    }
    for (CLI::App* sub : {single, cdf}) {
        sub->add_option("--dump-channels", f.dump_channels,
                        "write the generated realizations to this file");
    }
    sweep->add_option("--dx-grid", f.dx_grid, "relay x positions as start:stop:step")
        ->required();
    sweep->get_option("--out")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "relaylab: " << e.what() << "\n";
        return kExitUsage;
    }

    CliConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.format = f.format;
    if (!f.out.empty()) cfg.out_path = f.out;
    if (!f.dump_channels.empty()) cfg.dump_channels_path = f.dump_channels;

    if (cfg.command == "oracle") {
        // defined for scalar instances only; unset counts default to 1
        if (oracle_antennas.m1->count() == 0) f.m1 = 1;
        if (oracle_antennas.n1->count() == 0) f.n1 = 1;
        if (oracle_antennas.m2->count() == 0) f.m2 = 1;
        if (oracle_antennas.n2->count() == 0) f.n2 = 1;
        if (f.m1 != 1 || f.n1 != 1 || f.m2 != 1 || f.n2 != 1) {
            err << "relaylab: oracle requires an all-scalar antenna configuration\n";
            return kExitUsage;
        }
    }

    ExperimentSpec& spec = cfg.spec;
    spec.antennas = {f.m1, f.n1, f.m2, f.n2};
    spec.power.p1 = db_to_power(f.p1_db);
    spec.power.p2 = db_to_power(f.p2_db);
    spec.topology = {f.dx, f.dy, f.eta};
    spec.trials = cfg.command == "single" ? 1 : f.trials;
    spec.seed = f.seed;
    spec.per_antenna = f.per_antenna;
    spec.tol_nats = f.tol;
    spec.schemes = f.schemes.empty() ? known_schemes() : f.schemes;

    try {
        if (cfg.command == "sweep") spec.dx_grid = parse_dx_grid(f.dx_grid);
        spec.validate();
        if (cfg.command != "sweep") spec.topology.validate();

        if (cfg.command == "single" || cfg.command == "cdf") {
            return run_rate_table(cfg, out, err);
        }
        if (cfg.command == "sweep") return run_sweep_command(cfg, out, err);
        return run_oracle_command(cfg, out, err);
    } catch (const std::invalid_argument& e) {
        err << "relaylab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const TopologyDegenerateError& e) {
        err << "relaylab: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace relaylab
