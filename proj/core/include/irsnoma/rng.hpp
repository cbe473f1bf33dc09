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

#ifndef IRSNOMA_RNG_HPP
#define IRSNOMA_RNG_HPP

#include <complex>
#include <cstdint>

namespace irsnoma {

/// Counter-based SplitMix64 generator.
///
/// Output i of a stream with key k is splitmix64(k + (i + 1) * 0x9E3779B97F4A7C15),
/// where splitmix64 is the finalizer of Steele, Lea and Flood (2014). Uniforms
/// use the top 53 bits; normals use the Box-Muller transform, consuming two
/// uniforms and returning both outputs in order.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed)) {}

    /// Independent stream for (seed, realization, tag).
    static Rng stream(std::uint64_t seed, std::uint64_t realization, std::uint64_t tag);
    /// Child stream keyed on this stream's key and `tag`; does not advance this stream.
    Rng derive(std::uint64_t tag) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Circularly-symmetric complex Gaussian with unit variance.
    std::complex<double> complex_normal();

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Object tags for per-object sub-streams.
namespace stream_tag {
inline constexpr std::uint64_t bs_irs = 1;
inline constexpr std::uint64_t irs_user0 = 2;
inline constexpr std::uint64_t irs_user1 = 3;
inline constexpr std::uint64_t theta0 = 4;
inline constexpr std::uint64_t randomization = 5;
inline constexpr std::uint64_t baseline = 6;
}  // namespace stream_tag

}  // namespace irsnoma

#endif  // IRSNOMA_RNG_HPP
