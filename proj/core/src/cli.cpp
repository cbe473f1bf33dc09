// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "irsnoma/experiments.hpp"

namespace irsnoma {

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> schemes;
    std::string axis;
    std::vector<double> values;
    int threads = 0;
    int levels = 8;
    int grid = 1000;
    bool verbose = false;
    bool quiet = false;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file_) throw ConfigError(path + ": cannot open output file");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

ExperimentSpec spec_from(const Options& o) {
    ExperimentSpec spec = o.config.empty() ? ExperimentSpec::defaults() : load_spec(o.config);
    if (!o.axis.empty()) spec.axis = parse_axis(o.axis);
    if (!o.values.empty()) spec.values = o.values;
    if (!o.schemes.empty()) {
        spec.schemes.clear();
        for (const auto& s : o.schemes) spec.schemes.push_back(parse_scheme(s));
    }
    spec.validate();
    return spec;
}

int cmd_solve(const Options& o) {
    const ExperimentSpec spec = spec_from(o);
    const SystemConfig cfg = spec.at(spec.values.front());
    const std::uint64_t seed = o.seed.value_or(spec.master_seed);
    const Realization r = make_realization(cfg, spec.channel, seed);
    DriverSettings ds;
    if (!o.quiet) ds.log = &std::cerr;
    Rng rng = randomization_stream(seed);
    const SolveReport rep = run(cfg, r.channel, r.theta0, rng, ds);
    Output out(o.out.value_or("-"));
    out.stream() << "seed:              " << seed << '\n';
    print_report(rep, cfg, out.stream());
    return rep.feasible() ? 0 : 2;
}

int cmd_sweep(const Options& o) {
    ExperimentSpec spec = spec_from(o);
    if (o.seed) spec.master_seed = *o.seed;
    SweepOptions so;
    so.threads = o.threads;
    if (!o.quiet) so.log = &std::cerr;
    if (o.verbose) so.driver.log = &std::cerr;
    const std::string path = o.out ? *o.out : (spec.output.empty() ? std::string("-") : spec.output);
    Output out(path);
    const SweepResult res = run_sweep(spec, so);
    write_csv(res, out.stream());
    if (!o.quiet && res.sdr_solves > 0)
        std::cerr << "irsnoma.sweep rank_one=" << res.rank_one_solves << "/" << res.sdr_solves << '\n';
    return res.all_infeasible() ? 2 : 0;
}

int cmd_baseline(const Options& o) {
    Options local = o;
    if (local.schemes.empty()) local.schemes = {"random_phase", "oma"};
    ExperimentSpec spec = spec_from(local);
    const SystemConfig cfg = spec.at(spec.values.front());
    const std::uint64_t seed = o.seed.value_or(spec.master_seed);
    const Realization r = make_realization(cfg, spec.channel, seed);
    Output out(o.out.value_or("-"));
    std::ostream& os = out.stream();
    os.precision(9);
    bool any = false;
    for (Scheme s : spec.schemes) {
        const Record rec = run_scheme(s, cfg, r);
        any = any || rec.feasible;
        os << to_string(s) << ": status=" << rec.status;
        if (rec.feasible)
            os << " ee=" << rec.ee << " bit/Hz/J sum_rate=" << rec.sum_rate << " bit/s/Hz power=" << rec.power_w << " W";
        os << '\n';
    }
    return any ? 0 : 2;
}

int cmd_oracle(const Options& o) {
    const std::uint64_t seed = o.seed.value_or(0);
    SystemConfig cfg;
    Realization r;
    if (o.config.empty()) {
        ReferenceInstance ri = reference_instance(seed);
        cfg = ri.cfg;
        r = ri.realization;
    } else {
        const ExperimentSpec spec = spec_from(o);
        cfg = spec.at(spec.values.front());
        if (cfg.num_antennas != 1 || cfg.num_elements > 3)
            throw ConfigError(o.config + ": the oracle needs num_antennas = 1 and num_elements <= 3");
        r = make_realization(cfg, spec.channel, seed);
    }
    if (o.levels < 1 || o.levels > 8) throw ConfigError("--levels must lie in [1, 8]");
    if (o.grid < 1) throw ConfigError("--grid must be >= 1");
    const double oracle = brute_force_oracle(cfg, r.channel, o.levels, o.grid);
    Rng rng = randomization_stream(seed);
    const SolveReport rep = run(cfg, r.channel, r.theta0, rng);
    Output out(o.out.value_or("-"));
    std::ostream& os = out.stream();
    os.precision(9);
    os << "seed: " << seed << '\n';
    os << "oracle ee: " << oracle << " bit/Hz/J (" << o.levels << " phase levels, power grid " << o.grid << ")\n";
    os << "proposed ee: " << (rep.feasible() ? rep.final.ee : 0.0) << " bit/Hz/J (" << to_string(rep.status) << ")\n";
    if (rep.feasible() && oracle > 0.0) os << "ratio: " << rep.final.ee / oracle << '\n';
    return oracle == -std::numeric_limits<double>::infinity() ? 2 : 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Energy-efficient beamforming and reflection design for IRS-aided two-user NOMA"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON experiment file");
        sub->add_option("--seed", o.seed, "Realization seed (master seed for sweep)");
        sub->add_option("--out", o.out, "Output path, '-' for standard output");
        sub->add_option("--scheme", o.schemes, "Schemes: proposed, random_phase, oma")->delimiter(',');
        sub->add_option("--axis", o.axis, "Sweep axis: N, M, p_c_dbm, p_max_dbm");
        sub->add_option("--values", o.values, "Axis values, comma separated")->delimiter(',');
        sub->add_flag("--quiet", o.quiet, "No log lines on standard error");
    };
    CLI::App* solve = app.add_subcommand("solve", "Run the alternating optimization on one realization");
    common(solve);
    CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
    common(sweep);
    sweep->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    sweep->add_flag("--verbose", o.verbose, "Per-iteration driver log lines");
    CLI::App* baseline = app.add_subcommand("baseline", "Run the comparison schemes on one realization");
    common(baseline);
    CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive single-antenna oracle against the proposed run");
    common(oracle);
    oracle->add_option("--levels", o.levels, "Phase levels per element");
    oracle->add_option("--grid", o.grid, "Power grid resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        if (*solve) return cmd_solve(o);
        if (*sweep) return cmd_sweep(o);
        if (*baseline) return cmd_baseline(o);
        if (*oracle) return cmd_oracle(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace irsnoma
