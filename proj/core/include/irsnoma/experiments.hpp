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

#ifndef IRSNOMA_EXPERIMENTS_HPP
#define IRSNOMA_EXPERIMENTS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsnoma/baselines.hpp"
#include "irsnoma/channel.hpp"
#include "irsnoma/driver.hpp"
#include "irsnoma/model.hpp"

/// Monte Carlo sweeps over one system parameter, CSV output, and the
/// command-line front end.
namespace irsnoma {

enum class SweepAxis { N, M, p_c_dbm, p_max_dbm };

std::string to_string(SweepAxis a);
/// Throws ConfigError on an unknown name.
SweepAxis parse_axis(const std::string& name);

struct ExperimentSpec {
    SystemConfig system;
    ChannelConfig channel;
    SweepAxis axis = SweepAxis::N;
    std::vector<double> values;
    std::vector<Scheme> schemes{Scheme::proposed, Scheme::random_phase, Scheme::oma};
    int num_seeds = 100;
    std::uint64_t master_seed = 0;
    std::string output;  // empty or "-" for standard output

    /// Simulation defaults with 0 dB reference path loss, N axis at the default N.
    static ExperimentSpec defaults();
    /// Throws ConfigError.
    void validate() const;
    /// System config with the axis set to `value`.
    SystemConfig at(double value) const;
};

/// Parses a JSON document. Errors are ConfigError with a "<source>:<line>:" prefix.
ExperimentSpec parse_spec(const std::string& text, const std::string& source = "<config>");
ExperimentSpec load_spec(const std::string& path);

/// Inputs of realization `seed`: channel and every random stream are keyed on the seed alone.
struct Realization {
    std::uint64_t seed = 0;
    ChannelSet channel;
    PhaseState theta0;
};

Realization make_realization(const SystemConfig& cfg, const ChannelConfig& ccfg, std::uint64_t seed);
Rng randomization_stream(std::uint64_t seed);
Rng baseline_stream(std::uint64_t seed);

/// Single-antenna, two-element instance family for oracle comparisons:
/// h_2,r = sqrt(0.5) h_1,r, scaled so |h_1|^2 = 1 under theta0, with
/// sigma^2 = 0.1, 0 dB targets, P_max = 1 W, eta = 1, P_c = 0.1 W.
struct ReferenceInstance {
    SystemConfig cfg;
    Realization realization;
};

ReferenceInstance reference_instance(std::uint64_t seed);

struct Record {
    std::uint64_t seed = 0;
    int M = 0;
    int N = 0;
    double p_max_dbm = 0.0;
    double p_c_dbm = 0.0;
    Scheme scheme = Scheme::proposed;
    bool feasible = false;
    double ee = 0.0;
    double sum_rate = 0.0;
    double power_w = 0.0;
    std::optional<int> outer_iters;
    std::optional<double> rank_one_frac;
    std::string status;
};

/// Mean over the feasible records of one (axis value, scheme) cell.
struct Aggregate {
    double axis_value = 0.0;
    int M = 0;
    int N = 0;
    double p_max_dbm = 0.0;
    double p_c_dbm = 0.0;
    Scheme scheme = Scheme::proposed;
    int count = 0;
    int total = 0;
    double ee = 0.0;
    double sum_rate = 0.0;
    double power_w = 0.0;
    double outer_iters = 0.0;
    std::optional<double> rank_one_frac;  // pooled over the cell's phase solves
};

struct SweepResult {
    std::vector<Record> records;  // by axis value, seed, scheme
    std::vector<Aggregate> aggregates;  // by axis value, scheme
    int sdr_solves = 0;
    int rank_one_solves = 0;

    bool all_infeasible() const;
};

struct SweepOptions {
    int threads = 0;  // 0: hardware concurrency
    DriverSettings driver;
    OmaSettings oma;
    std::ostream* log = nullptr;
};

/// One record per (axis value, seed, scheme); failures become status rows.
SweepResult run_sweep(const ExperimentSpec& spec, const SweepOptions& options = {});

/// Record for one scheme on one realization.
Record run_scheme(Scheme scheme, const SystemConfig& cfg, const Realization& r, const SweepOptions& options = {},
                  SolveReport* report = nullptr);

inline constexpr const char* kCsvHeader =
    "seed,M,N,p_max_dbm,p_c_dbm,scheme,ee,sum_rate,power_w,outer_iters,rank_one_frac,status";

/// Header, records, then aggregates (seed field "mean"); 9 significant digits.
void write_csv(const SweepResult& result, std::ostream& os);

/// Human-readable run report.
void print_report(const SolveReport& report, const SystemConfig& cfg, std::ostream& os);

/// Command-line entry: solve, sweep, baseline, oracle. Returns 0 on success,
/// 1 on a configuration error, 2 when every realization is infeasible.
int cli_main(int argc, const char* const* argv);

}  // namespace irsnoma

#endif  // IRSNOMA_EXPERIMENTS_HPP
