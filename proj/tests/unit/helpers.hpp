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

#ifndef IRSNOMA_TESTS_HELPERS_HPP
#define IRSNOMA_TESTS_HELPERS_HPP

#include <cstdint>
#include <numbers>
#include <vector>

#include "irsnoma/experiments.hpp"
#include "oracles.hpp"

namespace testing {

inline oracle::cvec to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }
inline oracle::cvec to_std(const Eigen::RowVectorXcd& v) { return {v.data(), v.data() + v.size()}; }

inline std::vector<oracle::cvec> rows_of(const irsnoma::CMatrix& g) {
    std::vector<oracle::cvec> out(static_cast<std::size_t>(g.rows()));
    for (Eigen::Index n = 0; n < g.rows(); ++n) out[n] = to_std(irsnoma::CVector(g.row(n).transpose()));
    return out;
}

inline irsnoma::CVector random_cvector(int n, irsnoma::Rng& rng) {
    irsnoma::CVector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.complex_normal();
    return v;
}

/// Simulation-default instance in decoding order under its initial phases.
struct SimInstance {
    irsnoma::SystemConfig cfg;
    irsnoma::Realization r;
    irsnoma::ChannelSet ordered;
    irsnoma::CRowVector h1, h2;
};

inline SimInstance sim_instance(std::uint64_t seed, int m = 4, int n = 20) {
    const irsnoma::ExperimentSpec spec = irsnoma::ExperimentSpec::defaults();
    SimInstance s;
    s.cfg = spec.system;
    s.cfg.num_antennas = m;
    s.cfg.num_elements = n;
    s.r = irsnoma::make_realization(s.cfg, spec.channel, seed);
    s.ordered = s.r.channel.reordered(irsnoma::order_users(s.r.channel, s.r.theta0));
    s.h1 = irsnoma::effective_channel(s.ordered, s.r.theta0, 0);
    s.h2 = irsnoma::effective_channel(s.ordered, s.r.theta0, 1);
    return s;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing

#endif  // IRSNOMA_TESTS_HELPERS_HPP
