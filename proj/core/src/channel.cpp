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

#include "irsnoma/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace irsnoma {

void ChannelConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid channel config: " + what); };
    if (!(d_bi > 0.0) || !(d_iu[0] > 0.0) || !(d_iu[1] > 0.0)) fail("distances must be > 0");
    if (!(alpha_bi > 0.0) || !(alpha_iu > 0.0)) fail("path loss exponents must be > 0");
    if (!(rician_k >= 0.0)) fail("rician_k must be >= 0");
    if (!std::isfinite(pl_ref_db)) fail("pl_ref_db must be finite");
}

double pathloss_linear(double d, double alpha, double pl_ref_db) {
    if (!(d >= 1.0)) throw std::domain_error("path loss model requires d >= 1 m");
    return std::pow(10.0, (pl_ref_db - 10.0 * alpha * std::log10(d)) / 10.0);
}

CMatrix sample_rician(int rows, int cols, double k_factor, Rng& rng) {
    if (!(k_factor >= 0.0)) throw std::invalid_argument("Rician K-factor must be >= 0");
    const double phi_r = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double phi_t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double los_w = 1.0;
    double nlos_w = 0.0;
    if (!std::isinf(k_factor)) {
        los_w = std::sqrt(k_factor / (k_factor + 1.0));
        nlos_w = std::sqrt(1.0 / (k_factor + 1.0));
    }
    const double sr = std::numbers::pi * std::sin(phi_r);
    const double st = std::numbers::pi * std::sin(phi_t);
    CMatrix h(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const cplx los = std::polar(1.0, sr * i - st * j);
            const cplx nlos = nlos_w > 0.0 ? rng.complex_normal() : cplx(0.0, 0.0);
            h(i, j) = los_w * los + nlos_w * nlos;
        }
    return h;
}

ChannelSet realize(const SystemConfig& cfg, const ChannelConfig& ccfg, const Rng& rng) {
    ccfg.validate();
    const int n = cfg.num_elements;
    const int m = cfg.num_antennas;
    ChannelSet ch;
    ch.geometry = Geometry{ccfg.d_bi, ccfg.d_iu, ccfg.alpha_bi, ccfg.alpha_iu};
    Rng g_rng = rng.derive(stream_tag::bs_irs);
    ch.G = std::sqrt(pathloss_linear(ccfg.d_bi, ccfg.alpha_bi, ccfg.pl_ref_db)) *
           sample_rician(n, m, ccfg.rician_k, g_rng);
    const std::array<std::uint64_t, 2> tags{stream_tag::irs_user0, stream_tag::irs_user1};
    for (int k = 0; k < 2; ++k) {
        Rng h_rng = rng.derive(tags[k]);
        ch.h_r[k] = std::sqrt(pathloss_linear(ccfg.d_iu[k], ccfg.alpha_iu, ccfg.pl_ref_db)) *
                    sample_rician(n, 1, ccfg.rician_k, h_rng).col(0);
    }
    return ch;
}

ChannelSet realize(const SystemConfig& cfg, const ChannelConfig& ccfg, std::uint64_t index) {
    return realize(cfg, ccfg, Rng::stream(ccfg.seed, index, 0));
}

}  // namespace irsnoma
