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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

cvec cascade(const cvec& h_r, const cvec& v, const std::vector<cvec>& G) {
    const std::size_t m = G.empty() ? 0 : G[0].size();
    cvec out(m, 0.0);
    for (std::size_t n = 0; n < h_r.size(); ++n)
        for (std::size_t j = 0; j < m; ++j) out[j] += std::conj(h_r[n]) * v[n] * G[n][j];
    return out;
}

cd dot(const cvec& a, const cvec& b) {
    cd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

cd row_times(const cvec& h, const cvec& w) {
    cd s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * w[i];
    return s;
}

double energy(const cvec& w) {
    double s = 0.0;
    for (const cd& x : w) s += std::norm(x);
    return s;
}

Sinr sinr(const cvec& h1, const cvec& h2, const cvec& w1, const cvec& w2, double sigma2) {
    const double p11 = std::norm(row_times(h1, w1));
    const double p12 = std::norm(row_times(h1, w2));
    const double p21 = std::norm(row_times(h2, w1));
    const double p22 = std::norm(row_times(h2, w2));
    return {p11 / sigma2, p12 / (p11 + sigma2), p22 / (p21 + sigma2)};
}

double sum_rate(const Sinr& s) { return std::log2(1.0 + s.g1) + std::log2(1.0 + std::min(s.g21, s.g22)); }

double ee(double sum_rate, double power, double eta, double p_c) { return sum_rate / (power / eta + p_c); }

namespace {

double p2_needed(double p1, double g1, double g2, double sigma2, double G2) {
    return std::max(G2 * (p1 * g1 + sigma2) / g1, G2 * (p1 * g2 + sigma2) / g2);
}

bool qos(double p1, double p2, double g1, double g2, double sigma2, double G1, double G2, double slack) {
    if (p1 * g1 / sigma2 < G1 * (1.0 - slack)) return false;
    const double r2 = std::min(p2 * g1 / (p1 * g1 + sigma2), p2 * g2 / (p1 * g2 + sigma2));
    return r2 >= G2 * (1.0 - slack);
}

}  // namespace

Power2 min_power_bisection(double g1, double g2, double sigma2, double G1, double G2, double p_max) {
    Power2 out;
    double lo = 0.0, hi = p_max;
    if (G1 * sigma2 / g1 > p_max) return out;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid * g1 / sigma2 >= G1) hi = mid;
        else lo = mid;
    }
    out.p1 = hi;
    out.p2 = p2_needed(out.p1, g1, g2, sigma2, G2);
    out.feasible = out.p1 + out.p2 <= p_max * (1.0 + 1e-12);
    return out;
}

Power2 min_power_grid(double g1, double g2, double sigma2, double G1, double G2, double p_max, int n) {
    Power2 best;
    double total = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double p1 = p_max * i / n;
        if (p1 * g1 / sigma2 < G1) continue;
        const double p2 = p2_needed(p1, g1, g2, sigma2, G2);
        if (p1 + p2 > p_max || p1 + p2 >= total) continue;
        total = p1 + p2;
        best = {true, p1, p2};
    }
    return best;
}

double ee_power_grid(double g1, double g2, double sigma2, double G1, double G2, double p_max, double eta,
                     double p_c, double step) {
    const int n = static_cast<int>(std::floor(p_max / step + 1e-9));
    double best = -1.0;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            const double p1 = i * step, p2 = j * step;
            if (!qos(p1, p2, g1, g2, sigma2, G1, G2, 1e-12)) continue;
            const double r = std::log2(1.0 + p1 * g1 / sigma2) +
                             std::log2(1.0 + std::min(p2 * g1 / (p1 * g1 + sigma2), p2 * g2 / (p1 * g2 + sigma2)));
            best = std::max(best, ee(r, p1 + p2, eta, p_c));
        }
    return best;
}

double slot_power_grid(double gain, double lo, double hi, double sigma2, double eta, double p_c, int n) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = lo + (hi - lo) * i / (n - 1);
        best = std::max(best, std::log2(1.0 + p * gain / sigma2) / (p / eta + p_c));
    }
    return best;
}

double phase_grid(const std::array<std::array<cvec, 2>, 2>& a, double sigma2, double G1, double G2, int levels) {
    const std::size_t n = a[0][0].size();
    std::vector<int> idx(n, 0);
    double best = -1.0;
    const int total = static_cast<int>(std::pow(levels, static_cast<double>(n - 1)));
    for (int c = 0; c < total; ++c) {
        int r = c;
        cvec u(n, 1.0);
        for (std::size_t i = 1; i < n; ++i) {
            u[i] = std::polar(1.0, 2.0 * std::numbers::pi * (r % levels) / levels);
            r /= levels;
        }
        double e[2][2];
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) e[k][j] = std::norm(dot(u, a[k][j]));
        if (e[0][0] / sigma2 < G1 * (1.0 - 1e-9)) continue;
        if (e[0][1] < G2 * (e[0][0] + sigma2) * (1.0 - 1e-9)) continue;
        if (e[1][1] < G2 * (e[1][0] + sigma2) * (1.0 - 1e-9)) continue;
        best = std::max(best, std::min(e[0][0] + e[0][1], e[1][0] + e[1][1]) / sigma2);
    }
    return best;
}

double joint_grid(const std::vector<cvec>& G, const std::array<cvec, 2>& h_r, double sigma2, double G1, double G2,
                  double p_max, double eta, double p_c, int levels, int grid) {
    const std::size_t n = h_r[0].size();
    int total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= levels;
    double best = -1.0;
    for (int c = 0; c < total; ++c) {
        int r = c;
        cvec v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::polar(1.0, 2.0 * std::numbers::pi * (r % levels) / levels);
            r /= levels;
        }
        double g[2];
        for (int k = 0; k < 2; ++k) g[k] = std::norm(cascade(h_r[k], v, G)[0]);
        const double gs = std::max(g[0], g[1]), gw = g[1] > g[0] ? g[0] : g[1];
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; i + j <= grid; ++j) {
                const double p1 = p_max * i / grid, p2 = p_max * j / grid;
                const double s1 = p1 * gs / sigma2;
                const double s2 = std::min(p2 * gs / (p1 * gs + sigma2), p2 * gw / (p1 * gw + sigma2));
                const double r1 = std::log2(1.0 + s1), r2 = std::log2(1.0 + s2);
                if (r1 < std::log2(1.0 + G1) - 1e-6 || r2 < std::log2(1.0 + G2) - 1e-6) continue;
                best = std::max(best, ee(r1 + r2, p1 + p2, eta, p_c));
            }
    }
    return best;
}

}  // namespace oracle
