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

#include "irsnoma/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace irsnoma {

using nlohmann::json;

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::N: return "N";
        case SweepAxis::M: return "M";
        case SweepAxis::p_c_dbm: return "p_c_dbm";
        case SweepAxis::p_max_dbm: return "p_max_dbm";
    }
    return "unknown";
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "N") return SweepAxis::N;
    if (name == "M") return SweepAxis::M;
    if (name == "p_c_dbm") return SweepAxis::p_c_dbm;
    if (name == "p_max_dbm") return SweepAxis::p_max_dbm;
    throw ConfigError("unknown axis '" + name + "' (expected N, M, p_c_dbm or p_max_dbm)");
}

ExperimentSpec ExperimentSpec::defaults() {
    ExperimentSpec s;
    s.system = SystemConfig::simulation_defaults();
    s.channel.pl_ref_db = 0.0;
    s.values = {static_cast<double>(s.system.num_elements)};
    return s;
}

void ExperimentSpec::validate() const {
    if (values.empty()) throw ConfigError("values must not be empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v)) throw ConfigError("values must be finite");
        if ((axis == SweepAxis::N || axis == SweepAxis::M) && (!(v >= 1.0) || v != std::floor(v)))
            throw ConfigError("values on axis " + to_string(axis) + " must be positive integers");
        if (i > 0 && !(v > values[i - 1])) throw ConfigError("values must be strictly increasing");
    }
    if (schemes.empty()) throw ConfigError("schemes must not be empty");
    if (std::set<Scheme>(schemes.begin(), schemes.end()).size() != schemes.size())
        throw ConfigError("schemes must not repeat");
    if (num_seeds < 1) throw ConfigError("num_seeds must be >= 1");
    channel.validate();
    for (double v : values) at(v).validate();
}

SystemConfig ExperimentSpec::at(double value) const {
    SystemConfig c = system;
    switch (axis) {
        case SweepAxis::N: c.num_elements = static_cast<int>(value); break;
        case SweepAxis::M: c.num_antennas = static_cast<int>(value); break;
        case SweepAxis::p_c_dbm: c.p_circuit_override = dbm_to_watts(value); break;
        case SweepAxis::p_max_dbm: c.p_max = dbm_to_watts(value); break;
    }
    return c;
}

// --- JSON ingestion ---------------------------------------------------------

namespace {

class SpecReader {
public:
    SpecReader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(source_ + ":" + std::to_string(line_of(key)) + ": " + msg);
    }

    int line_at(std::size_t byte) const {
        byte = std::min(byte, text_.size());
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    }

    int line_of(const std::string& key) const {
        if (key.empty()) return 1;
        const std::string leaf = key.substr(key.rfind('.') + 1);
        const std::string quoted = "\"" + leaf + "\"";
        std::size_t pos = 0;
        while ((pos = text_.find(quoted, pos)) != std::string::npos) {
            std::size_t q = pos + quoted.size();
            while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
            if (q < text_.size() && text_[q] == ':') return line_at(pos);
            pos = q;
        }
        return 1;
    }

    void only(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(path, (path.empty() ? std::string("document") : path) + " must be an object");
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (const char* allowed : keys) known = known || k == allowed;
            if (!known) fail(join(path, k), "unknown key '" + join(path, k) + "'");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    double number(const json& obj, const std::string& path, const char* key, double fallback) const {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number()) fail(join(path, key), join(path, key) + " must be a number");
        return v.get<double>();
    }

    std::optional<double> maybe_number(const json& obj, const std::string& path, const char* key) const {
        if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
        return number(obj, path, key, 0.0);
    }

    int integer(const json& obj, const std::string& path, const char* key, int fallback) const {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(join(path, key), join(path, key) + " must be an integer");
        return v.get<int>();
    }

    std::string string(const json& obj, const std::string& path, const char* key, const std::string& fallback) const {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (!v.is_string()) fail(join(path, key), join(path, key) + " must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& obj, const std::string& path, const char* key) const {
        const json& v = obj.at(key);
        if (!v.is_array()) fail(join(path, key), join(path, key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(join(path, key), join(path, key) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::array<double, 2> pair(const json& obj, const std::string& path, const char* key,
                               std::array<double, 2> fallback) const {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        if (v.is_number()) return {v.get<double>(), v.get<double>()};
        const auto xs = numbers(obj, path, key);
        if (xs.size() != 2) fail(join(path, key), join(path, key) + " must be a number or a pair of numbers");
        return {xs[0], xs[1]};
    }

    template <class F>
    void guarded(const std::string& key, F&& f) const {
        try {
            f();
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.rfind(source_ + ":", 0) == 0) throw;
            fail(key, msg);
        }
    }

private:
    const std::string& text_;
    std::string source_;
};

}  // namespace

ExperimentSpec parse_spec(const std::string& text, const std::string& source) {
    SpecReader rd(text, source);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(rd.line_at(e.byte > 0 ? e.byte - 1 : 0)) +
                          ": malformed JSON: " + e.what());
    }
    rd.only(doc, "", {"system", "channel", "axis", "values", "schemes", "num_seeds", "master_seed", "output"});

    ExperimentSpec spec = ExperimentSpec::defaults();
    if (doc.contains("system")) {
        const json& s = doc.at("system");
        const std::string p = "system";
        rd.only(s, p,
                {"num_antennas", "num_elements", "amp_efficiency", "p_max_dbm", "p_dynamic_dbm", "p_static_dbm",
                 "p_circuit_dbm", "noise_power_dbm", "sinr_min_db", "sca_tol", "outer_tol", "max_inner_iters",
                 "max_outer_iters", "ordering_norm"});
        SystemConfig& c = spec.system;
        c.num_antennas = rd.integer(s, p, "num_antennas", c.num_antennas);
        c.num_elements = rd.integer(s, p, "num_elements", c.num_elements);
        c.amp_efficiency = rd.number(s, p, "amp_efficiency", c.amp_efficiency);
        c.p_max = dbm_to_watts(rd.number(s, p, "p_max_dbm", watts_to_dbm(c.p_max)));
        if (auto d = rd.maybe_number(s, p, "p_dynamic_dbm")) c.p_dynamic = dbm_to_watts(*d);
        if (auto d = rd.maybe_number(s, p, "p_static_dbm")) c.p_static = dbm_to_watts(*d);
        if (auto d = rd.maybe_number(s, p, "p_circuit_dbm")) c.p_circuit_override = dbm_to_watts(*d);
        c.noise_power = dbm_to_watts(rd.number(s, p, "noise_power_dbm", watts_to_dbm(c.noise_power)));
        const auto g = rd.pair(s, p, "sinr_min_db", {linear_to_db(c.sinr_min[0]), linear_to_db(c.sinr_min[1])});
        c.sinr_min = {db_to_linear(g[0]), db_to_linear(g[1])};
        c.sca_tol = rd.number(s, p, "sca_tol", c.sca_tol);
        c.outer_tol = rd.number(s, p, "outer_tol", c.outer_tol);
        c.max_inner_iters = rd.integer(s, p, "max_inner_iters", c.max_inner_iters);
        c.max_outer_iters = rd.integer(s, p, "max_outer_iters", c.max_outer_iters);
        const std::string norm = rd.string(s, p, "ordering_norm", "euclidean");
        if (norm == "euclidean") c.ordering_norm = OrderingNorm::euclidean;
        else if (norm == "sum_abs") c.ordering_norm = OrderingNorm::sum_abs;
        else rd.fail("system.ordering_norm", "system.ordering_norm must be 'euclidean' or 'sum_abs'");
        rd.guarded("system", [&] { c.validate(); });
        if (!doc.contains("values")) spec.values = {static_cast<double>(c.num_elements)};
    }
    if (doc.contains("channel")) {
        const json& s = doc.at("channel");
        const std::string p = "channel";
        rd.only(s, p, {"d_bi", "d_iu", "alpha_bi", "alpha_iu", "rician_k", "pl_ref_db"});
        ChannelConfig& c = spec.channel;
        c.d_bi = rd.number(s, p, "d_bi", c.d_bi);
        c.d_iu = rd.pair(s, p, "d_iu", c.d_iu);
        c.alpha_bi = rd.number(s, p, "alpha_bi", c.alpha_bi);
        c.alpha_iu = rd.number(s, p, "alpha_iu", c.alpha_iu);
        c.rician_k = rd.number(s, p, "rician_k", c.rician_k);
        c.pl_ref_db = rd.number(s, p, "pl_ref_db", c.pl_ref_db);
        rd.guarded("channel", [&] {
            try {
                c.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        });
    }
    rd.guarded("axis", [&] { spec.axis = parse_axis(rd.string(doc, "", "axis", to_string(spec.axis))); });
    if (doc.contains("values")) spec.values = rd.numbers(doc, "", "values");
    if (doc.contains("schemes")) {
        const json& v = doc.at("schemes");
        if (!v.is_array()) rd.fail("schemes", "schemes must be an array of strings");
        spec.schemes.clear();
        for (const auto& e : v) {
            if (!e.is_string()) rd.fail("schemes", "schemes must be an array of strings");
            rd.guarded("schemes", [&] { spec.schemes.push_back(parse_scheme(e.get<std::string>())); });
        }
    }
    spec.num_seeds = rd.integer(doc, "", "num_seeds", spec.num_seeds);
    if (doc.contains("master_seed")) {
        const json& v = doc.at("master_seed");
        if (!v.is_number_unsigned()) rd.fail("master_seed", "master_seed must be a nonnegative integer");
        spec.master_seed = v.get<std::uint64_t>();
    }
    spec.output = rd.string(doc, "", "output", spec.output);
    rd.guarded("values", [&] { spec.validate(); });
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), path);
}

// --- realizations -----------------------------------------------------------

Realization make_realization(const SystemConfig& cfg, const ChannelConfig& ccfg, std::uint64_t seed) {
    Realization r;
    r.seed = seed;
    r.channel = realize(cfg, ccfg, Rng::stream(seed, 0, 0));
    Rng theta = Rng::stream(seed, 0, stream_tag::theta0);
    r.theta0 = default_theta0(cfg.num_elements, theta);
    return r;
}

Rng randomization_stream(std::uint64_t seed) { return Rng::stream(seed, 0, stream_tag::randomization); }
Rng baseline_stream(std::uint64_t seed) { return Rng::stream(seed, 0, stream_tag::baseline); }

ReferenceInstance reference_instance(std::uint64_t seed) {
    ReferenceInstance ri;
    SystemConfig& c = ri.cfg;
    c.num_antennas = 1;
    c.num_elements = 2;
    c.noise_power = 0.1;
    c.sinr_min = {1.0, 1.0};
    c.p_max = 1.0;
    c.amp_efficiency = 1.0;
    c.p_dynamic = 0.0;
    c.p_static = 0.1;

    Realization& r = ri.realization;
    r.seed = seed;
    Rng g = Rng::stream(seed, 0, stream_tag::bs_irs);
    Rng h = Rng::stream(seed, 0, stream_tag::irs_user0);
    ChannelSet& ch = r.channel;
    ch.G = CMatrix(2, 1);
    ch.h_r[0] = CVector(2);
    for (int i = 0; i < 2; ++i) {
        ch.G(i, 0) = g.complex_normal();
        ch.h_r[0][i] = h.complex_normal();
    }
    ch.h_r[1] = ch.h_r[0];
    Rng theta = Rng::stream(seed, 0, stream_tag::theta0);
    r.theta0 = default_theta0(2, theta);
    const double g1 = effective_channel(ch, r.theta0, 0).squaredNorm();
    ch.h_r[0] /= std::sqrt(g1);
    ch.h_r[1] = std::sqrt(0.5) * ch.h_r[0];
    return ri;
}

// --- sweep ------------------------------------------------------------------

Record run_scheme(Scheme scheme, const SystemConfig& cfg, const Realization& r, const SweepOptions& options,
                  SolveReport* report) {
    Record rec;
    rec.seed = r.seed;
    rec.M = cfg.num_antennas;
    rec.N = cfg.num_elements;
    rec.p_max_dbm = watts_to_dbm(cfg.p_max);
    rec.p_c_dbm = watts_to_dbm(cfg.circuit_power());
    rec.scheme = scheme;
    try {
        switch (scheme) {
            case Scheme::proposed: {
                Rng rng = randomization_stream(r.seed);
                SolveReport rep = run(cfg, r.channel, r.theta0, rng, options.driver);
                rec.status = to_string(rep.status);
                rec.feasible = rep.feasible();
                if (rec.feasible) {
                    rec.ee = rep.final.ee;
                    rec.sum_rate = rep.final.rates.sum();
                    rec.power_w = rep.final.power;
                    rec.outer_iters = rep.outer_iters();
                    if (rep.sdr_solves > 0) rec.rank_one_frac = rep.rank_one_fraction();
                }
                if (report) *report = std::move(rep);
                break;
            }
            case Scheme::random_phase: {
                const BaselineResult b = random_phase_noma(cfg, r.channel, r.theta0, options.driver.sca);
                rec.feasible = b.feasible;
                rec.status = b.feasible ? "feasible" : "init_infeasible";
                if (b.feasible) {
                    rec.ee = b.ee;
                    rec.sum_rate = b.rates.sum();
                    rec.power_w = b.power;
                }
                break;
            }
            case Scheme::oma: {
                Rng rng = baseline_stream(r.seed);
                const BaselineResult b = oma_tdma(cfg, r.channel, rng, options.oma);
                rec.feasible = b.feasible;
                rec.status = b.feasible ? "feasible" : "infeasible";
                if (b.feasible) {
                    rec.ee = b.ee;
                    rec.sum_rate = b.rates.sum();
                    rec.power_w = b.power;
                }
                break;
            }
        }
    } catch (const std::exception&) {
        rec.feasible = false;
        rec.status = "error";
    }
    return rec;
}

bool SweepResult::all_infeasible() const {
    return std::none_of(records.begin(), records.end(), [](const Record& r) { return r.feasible; });
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(9) << v;
    return os.str();
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec, const SweepOptions& options) {
    spec.validate();
    const int nv = static_cast<int>(spec.values.size());
    const int ns = spec.num_seeds;
    const int nsch = static_cast<int>(spec.schemes.size());
    const int cells = nv * ns;

    struct CellOut {
        std::vector<Record> records;
        int sdr = 0, rank_one = 0;
    };
    std::vector<CellOut> out(static_cast<std::size_t>(cells));
    std::mutex log_mutex;
    std::atomic<int> next{0};

    auto work = [&] {
        for (int cell = next++; cell < cells; cell = next++) {
            const int vi = cell / ns;
            const int si = cell % ns;
            const SystemConfig cfg = spec.at(spec.values[vi]);
            const std::uint64_t seed = spec.master_seed + static_cast<std::uint64_t>(si);
            std::ostringstream buf;
            SweepOptions local = options;
            if (options.log && options.driver.log) local.driver.log = &buf;
            CellOut& co = out[static_cast<std::size_t>(cell)];
            const Realization r = make_realization(cfg, spec.channel, seed);
            for (Scheme s : spec.schemes) {
                SolveReport rep;
                Record rec = run_scheme(s, cfg, r, local, s == Scheme::proposed ? &rep : nullptr);
                if (s == Scheme::proposed) {
                    co.sdr += rep.sdr_solves;
                    co.rank_one += rep.rank_one_solves;
                }
                if (options.log)
                    buf << "irsnoma.sweep " << to_string(spec.axis) << "=" << fmt(spec.values[vi]) << " seed=" << seed
                        << " scheme=" << to_string(s) << " status=" << rec.status
                        << " ee=" << (rec.feasible ? fmt(rec.ee) : std::string("nan")) << '\n';
                co.records.push_back(std::move(rec));
            }
            if (options.log) {
                std::lock_guard<std::mutex> lock(log_mutex);
                *options.log << buf.str() << std::flush;
            }
        }
    };

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, std::max(1, cells));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    SweepResult res;
    for (const CellOut& co : out) {
        res.records.insert(res.records.end(), co.records.begin(), co.records.end());
        res.sdr_solves += co.sdr;
        res.rank_one_solves += co.rank_one;
    }
    for (int vi = 0; vi < nv; ++vi) {
        const SystemConfig cfg = spec.at(spec.values[vi]);
        for (int k = 0; k < nsch; ++k) {
            Aggregate a;
            a.axis_value = spec.values[vi];
            a.M = cfg.num_antennas;
            a.N = cfg.num_elements;
            a.p_max_dbm = watts_to_dbm(cfg.p_max);
            a.p_c_dbm = watts_to_dbm(cfg.circuit_power());
            a.scheme = spec.schemes[k];
            int with_iters = 0, with_rank = 0;
            double iters = 0.0, rank = 0.0;
            for (int si = 0; si < ns; ++si) {
                const Record& r = res.records[static_cast<std::size_t>((vi * ns + si) * nsch + k)];
                ++a.total;
                if (!r.feasible) continue;
                ++a.count;
                a.ee += r.ee;
                a.sum_rate += r.sum_rate;
                a.power_w += r.power_w;
                if (r.outer_iters) {
                    iters += *r.outer_iters;
                    ++with_iters;
                }
                if (r.rank_one_frac) {
                    rank += *r.rank_one_frac;
                    ++with_rank;
                }
            }
            if (a.count > 0) {
                a.ee /= a.count;
                a.sum_rate /= a.count;
                a.power_w /= a.count;
            }
            if (with_iters > 0) a.outer_iters = iters / with_iters;
            if (with_rank > 0) a.rank_one_frac = rank / with_rank;
            res.aggregates.push_back(a);
        }
    }
    return res;
}

void write_csv(const SweepResult& result, std::ostream& os) {
    os << kCsvHeader << '\n';
    for (const Record& r : result.records) {
        os << r.seed << ',' << r.M << ',' << r.N << ',' << fmt(r.p_max_dbm) << ',' << fmt(r.p_c_dbm) << ','
           << to_string(r.scheme) << ',';
        if (r.feasible) os << fmt(r.ee) << ',' << fmt(r.sum_rate) << ',' << fmt(r.power_w);
        else os << ",,";
        os << ',';
        if (r.outer_iters) os << *r.outer_iters;
        os << ',';
        if (r.rank_one_frac) os << fmt(*r.rank_one_frac);
        os << ',' << r.status << '\n';
    }
    for (const Aggregate& a : result.aggregates) {
        os << "mean," << a.M << ',' << a.N << ',' << fmt(a.p_max_dbm) << ',' << fmt(a.p_c_dbm) << ','
           << to_string(a.scheme) << ',';
        if (a.count > 0) os << fmt(a.ee) << ',' << fmt(a.sum_rate) << ',' << fmt(a.power_w) << ',' << fmt(a.outer_iters);
        else os << ",,,";
        os << ',';
        if (a.rank_one_frac) os << fmt(*a.rank_one_frac);
        os << ",aggregate:" << a.count << '/' << a.total << '\n';
    }
}

void print_report(const SolveReport& report, const SystemConfig& cfg, std::ostream& os) {
    const auto old = os.precision(9);
    os << "status:            " << to_string(report.status) << '\n';
    if (!report.message.empty()) os << "message:           " << report.message << '\n';
    os << "decoding order:    strong user " << report.order[0] << ", weak user " << report.order[1] << '\n';
    os << "outer iterations:  " << report.outer_iters() << '\n';
    os << "ee trajectory:    ";
    for (double e : report.ee_trajectory) os << ' ' << e;
    os << '\n';
    os << "inner iterations: ";
    for (int i : report.inner_iters) os << ' ' << i;
    os << '\n';
    os << "phase solves:      " << report.sdr_solves << " (" << report.rank_one_solves << " rank-one)\n";
    os << "guard rejections:  " << report.guard_rejections << '\n';
    os << "order premise:     " << report.order_premise_violations << " violations\n";
    if (report.feasible()) {
        const Evaluation& f = report.final;
        os << "energy efficiency: " << f.ee << " bit/Hz/J\n";
        os << "rates:             R1 = " << f.rates.r1 << ", R2 = " << f.rates.r2 << " bit/s/Hz\n";
        os << "transmit power:    " << f.power << " W (budget " << cfg.p_max << " W)\n";
        os << "theta (rad):      ";
        const RVector th = report.phase.angles();
        for (Eigen::Index i = 0; i < th.size(); ++i) os << ' ' << th[i];
        os << '\n';
    }
    os << "time:              " << report.timings.total << " s (sca " << report.timings.sca << " s, sdr "
       << report.timings.sdr << " s)\n";
    os.precision(old);
}

}  // namespace irsnoma
