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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "helpers.hpp"
#include "irsnoma/experiments.hpp"

using namespace irsnoma;

namespace {

namespace fs = std::filesystem;

std::string config_path(const std::string& name) { return std::string(IRSNOMA_SOURCE_DIR) + "/configs/" + name; }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "irsnoma_unit_experiments";
    fs::create_directories(d);
    return d;
}

std::string csv_of(const SweepResult& r) {
    std::ostringstream os;
    write_csv(r, os);
    return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

ExperimentSpec small_spec() {
    ExperimentSpec s = ExperimentSpec::defaults();
    s.system.num_elements = 8;
    s.values = {8.0};
    s.num_seeds = 2;
    return s;
}

SweepOptions one_thread() {
    SweepOptions o;
    o.threads = 1;
    return o;
}

int call(std::vector<std::string> args) {
    args.insert(args.begin(), "irsnoma");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("shipped configs load") {
    const ExperimentSpec f2 = load_spec(config_path("fig2.json"));
    CHECK(f2.axis == SweepAxis::N);
    CHECK(f2.values == std::vector<double>{10, 20, 30, 40, 50});
    CHECK(f2.system.num_antennas == 4);
    CHECK(f2.system.p_max == doctest::Approx(0.01));
    CHECK(f2.system.circuit_power() == doctest::Approx(0.01));
    CHECK(f2.system.noise_power == doctest::Approx(1e-11));
    CHECK(f2.system.sinr_min[1] == doctest::Approx(10.0));
    CHECK(f2.num_seeds == 100);
    CHECK(f2.schemes.size() == 3);
    const ExperimentSpec f3 = load_spec(config_path("fig3.json"));
    CHECK(f3.axis == SweepAxis::p_c_dbm);
    CHECK(f3.system.num_antennas == 20);
    CHECK(f3.at(15.0).circuit_power() == doctest::Approx(dbm_to_watts(15.0)));
    CHECK(f2.at(30.0).num_elements == 30);
}

TEST_CASE("config errors carry the line of the offending key") {
    const std::string text = "{\n  \"system\": {\n    \"num_antennas\": 4,\n    \"bogus\": 1\n  }\n}\n";
    try {
        parse_spec(text, "t.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("t.json:4:", 0) == 0);
    }
    const std::string typed = "{\n  \"num_seeds\": \"many\"\n}\n";
    try {
        parse_spec(typed, "u.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("u.json:2:", 0) == 0);
    }
    const std::string broken = "{\n  \"axis\": \"N\",\n  \"values\": [1, 2,\n}\n";
    try {
        parse_spec(broken, "v.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("v.json:4:", 0) == 0);
    }
    CHECK_THROWS_AS(parse_spec("{\"axis\": \"K\"}"), ConfigError);
    CHECK_THROWS_AS(parse_spec("{\"values\": [3, 2]}"), ConfigError);
    CHECK_THROWS_AS(parse_spec("{\"axis\": \"N\", \"values\": [2.5]}"), ConfigError);
    CHECK_THROWS_AS(parse_spec("{\"schemes\": [\"proposed\", \"proposed\"]}"), ConfigError);
    CHECK_THROWS_AS(parse_spec("{\"system\": {\"amp_efficiency\": 2}}"), ConfigError);
    CHECK_THROWS_AS(load_spec("/nonexistent/file.json"), ConfigError);
    CHECK_NOTHROW(parse_spec("{\"axis\": \"p_c_dbm\", \"values\": [0, 5]}"));
}

TEST_CASE("realizations depend on the seed alone") {
    const ExperimentSpec s = ExperimentSpec::defaults();
    const Realization a = make_realization(s.system, s.channel, 3), b = make_realization(s.system, s.channel, 3);
    CHECK(a.channel.G == b.channel.G);
    CHECK(a.theta0.v() == b.theta0.v());
    const Realization c = make_realization(s.system, s.channel, 4);
    CHECK(a.channel.G != c.channel.G);
    CHECK(randomization_stream(3).key() != baseline_stream(3).key());
}

TEST_CASE("reference instance family") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ReferenceInstance r = reference_instance(seed);
        CHECK(r.cfg.num_antennas == 1);
        CHECK(r.cfg.num_elements == 2);
        const double g1 = effective_channel(r.realization.channel, r.realization.theta0, 0).squaredNorm();
        const double g2 = effective_channel(r.realization.channel, r.realization.theta0, 1).squaredNorm();
        CHECK(g1 == doctest::Approx(1.0));
        CHECK(g2 == doctest::Approx(0.5));
    }
}

TEST_CASE("one value and one seed give one row per scheme plus aggregates") {
    ExperimentSpec s = small_spec();
    s.num_seeds = 1;
    const SweepResult r = run_sweep(s, one_thread());
    CHECK(r.records.size() == s.schemes.size());
    CHECK(r.aggregates.size() == s.schemes.size());
    const std::string csv = csv_of(r);
    const auto lines = split(csv, '\n');
    CHECK(lines.front() == kCsvHeader);
    CHECK(lines.size() == 1 + 2 * s.schemes.size() + 1);
    CHECK(lines.back().empty());
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) CHECK(split(lines[i], ',').size() == 12);
}

TEST_CASE("sweeps are byte-identical across runs and thread counts") {
    const ExperimentSpec s = small_spec();
    const std::string a = csv_of(run_sweep(s, one_thread()));
    const std::string b = csv_of(run_sweep(s, one_thread()));
    SweepOptions two;
    two.threads = 2;
    const std::string c = csv_of(run_sweep(s, two));
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("aggregates equal recomputation from raw rows") {
    ExperimentSpec s = small_spec();
    s.values = {6.0, 8.0};
    const SweepResult r = run_sweep(s, one_thread());
    for (const Aggregate& g : r.aggregates) {
        double ee = 0.0, rate = 0.0, power = 0.0, outer = 0.0, frac = 0.0;
        int n = 0, total = 0, with_frac = 0;
        for (const Record& rec : r.records) {
            if (rec.N != g.N || rec.scheme != g.scheme) continue;
            ++total;
            if (!rec.feasible) continue;
            ++n;
            ee += rec.ee;
            rate += rec.sum_rate;
            power += rec.power_w;
            outer += rec.outer_iters.value_or(0);
            if (rec.rank_one_frac) {
                frac += *rec.rank_one_frac;
                ++with_frac;
            }
        }
        CHECK(g.total == total);
        REQUIRE(g.count == n);
        REQUIRE(n > 0);
        CHECK(std::abs(g.ee - ee / n) <= 1e-12 * std::abs(g.ee));
        CHECK(std::abs(g.sum_rate - rate / n) <= 1e-12 * std::abs(g.sum_rate));
        CHECK(std::abs(g.power_w - power / n) <= 1e-12 * std::abs(g.power_w));
        CHECK(std::abs(g.outer_iters - outer / n) <= 1e-12 * (1.0 + g.outer_iters));
        if (with_frac > 0) {
            REQUIRE(g.rank_one_frac.has_value());
            CHECK(std::abs(*g.rank_one_frac - frac / with_frac) <= 1e-12);
        }
    }
    const auto lines = split(csv_of(r), '\n');
    std::map<std::string, std::vector<double>> ee_by_cell;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f[0] == "mean") {
            const auto& v = ee_by_cell[f[2] + f[5]];
            double m = 0.0;
            for (double x : v) m += x;
            CHECK(std::stod(f[6]) == doctest::Approx(m / v.size()).epsilon(1e-8));
            CHECK(f[11].rfind("aggregate:", 0) == 0);
        } else if (!f[6].empty()) {
            ee_by_cell[f[2] + f[5]].push_back(std::stod(f[6]));
        }
    }
}

TEST_CASE("infeasible records leave numeric fields empty") {
    ExperimentSpec s = small_spec();
    s.num_seeds = 1;
    s.system.sinr_min = {db_to_linear(60.0), db_to_linear(60.0)};
    const SweepResult r = run_sweep(s, one_thread());
    CHECK(r.all_infeasible());
    const auto lines = split(csv_of(r), '\n');
    const auto f = split(lines[1], ',');
    CHECK(f[6].empty());
    CHECK(f[7].empty());
    CHECK(f[8].empty());
    CHECK_FALSE(f[11].empty());
}

TEST_CASE("numeric fields carry nine significant digits") {
    ExperimentSpec s = small_spec();
    s.num_seeds = 1;
    s.schemes = {Scheme::random_phase};
    const SweepResult r = run_sweep(s, one_thread());
    REQUIRE(r.records.front().feasible);
    const auto f = split(split(csv_of(r), '\n')[1], ',');
    std::ostringstream os;
    os.precision(9);
    os << r.records.front().ee;
    CHECK(f[6] == os.str());
    CHECK(f[5] == "random_phase");
}

TEST_CASE("mean energy efficiency falls with circuit power") {
    ExperimentSpec s = small_spec();
    s.axis = SweepAxis::p_c_dbm;
    s.values = {0.0, 10.0, 20.0};
    s.schemes = {Scheme::proposed, Scheme::random_phase};
    SweepOptions o = one_thread();
    const SweepResult r = run_sweep(s, o);
    for (Scheme sc : s.schemes) {
        std::vector<double> ee;
        for (const Aggregate& g : r.aggregates)
            if (g.scheme == sc) ee.push_back(g.ee);
        REQUIRE(ee.size() == 3);
        CHECK(ee[0] > ee[1]);
        CHECK(ee[1] > ee[2]);
    }
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch_dir();
    CHECK(call({"solve", "--config", config_path("fig2.json"), "--seed", "7", "--quiet", "--out",
                (dir / "solve.txt").string()}) == 0);
    const std::string report = read_file(dir / "solve.txt");
    CHECK(report.find("energy efficiency:") != std::string::npos);
    CHECK(call({"solve", "--config", (dir / "missing.json").string()}) == 1);
    CHECK(call({"solve", "--bogus-flag"}) == 1);
    CHECK(call({"--help"}) == 0);
    CHECK(call({"baseline", "--scheme", "nonsense", "--quiet"}) == 1);

    {
        std::ofstream cfg(dir / "tiny.json");
        cfg << "{\n  \"system\": {\"num_elements\": 6},\n  \"axis\": \"N\",\n  \"values\": [6],\n"
               "  \"schemes\": [\"random_phase\"],\n  \"num_seeds\": 2\n}\n";
    }
    const std::string out1 = (dir / "a.csv").string(), out2 = (dir / "b.csv").string();
    CHECK(call({"sweep", "--config", (dir / "tiny.json").string(), "--threads", "1", "--quiet", "--out", out1}) == 0);
    CHECK(call({"sweep", "--config", (dir / "tiny.json").string(), "--threads", "1", "--quiet", "--out", out2}) == 0);
    CHECK(read_file(out1) == read_file(out2));
    CHECK(read_file(out1).rfind(kCsvHeader, 0) == 0);
    CHECK(call({"sweep", "--config", (dir / "tiny.json").string(), "--threads", "1", "--quiet", "--axis",
                "p_c_dbm", "--values", "0,10", "--out", out2}) == 0);
    CHECK(read_file(out2).find(",oma,") == std::string::npos);

    {
        std::ofstream cfg(dir / "hard.json");
        cfg << "{\n  \"system\": {\"num_elements\": 6, \"sinr_min_db\": 60},\n  \"values\": [6],\n"
               "  \"num_seeds\": 1\n}\n";
    }
    CHECK(call({"sweep", "--config", (dir / "hard.json").string(), "--threads", "1", "--quiet", "--out", out1}) == 2);
    CHECK(call({"solve", "--config", (dir / "hard.json").string(), "--quiet", "--out", out1}) == 2);
    CHECK(call({"oracle", "--seed", "1", "--grid", "100", "--quiet", "--out", out1}) == 0);
}

}
