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

#ifndef IRSNOMA_CHANNEL_HPP
#define IRSNOMA_CHANNEL_HPP

#include <cstdint>

#include "irsnoma/model.hpp"
#include "irsnoma/rng.hpp"

/// Rician small-scale fading composed with log-distance path loss.
namespace irsnoma {

struct ChannelConfig {
    double d_bi = 40.0;
    std::array<double, 2> d_iu{10.0, 20.0};
    double alpha_bi = 2.2;
    double alpha_iu = 2.5;
    double rician_k = 2.0;     // linear, shared by all links
    double pl_ref_db = -30.0;  // path loss at 1 m
    std::uint64_t seed = 0;

    void validate() const;
};

/// 10^((pl_ref_db - 10 alpha log10 d) / 10). Throws std::domain_error for d < 1.
double pathloss_linear(double d, double alpha, double pl_ref_db);

/// sqrt(K/(K+1)) H_los + sqrt(1/(K+1)) H_nlos with E|H_ij|^2 = 1.
///
/// H_los = a(phi_r) a(phi_t)^H with a_n(phi) = exp(j pi n sin phi) and both
/// angles uniform on [0, 2 pi). The two angles are drawn first, then the
/// NLoS entries in row-major order. K = +inf gives the LoS-only matrix.
CMatrix sample_rician(int rows, int cols, double k_factor, Rng& rng);

/// Each link draws from its own child stream of `rng` (tags in stream_tag),
/// so h_r does not depend on M and every link's entries are prefix-stable in N.
ChannelSet realize(const SystemConfig& cfg, const ChannelConfig& ccfg, const Rng& rng);

/// Realization `index` of the master seed ccfg.seed.
ChannelSet realize(const SystemConfig& cfg, const ChannelConfig& ccfg, std::uint64_t index);

}  // namespace irsnoma

#endif  // IRSNOMA_CHANNEL_HPP
