// SPDX-License-Identifier: Apache-2.0
//
// rstc - rate-split transform coding library for CSI feedback simulation
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

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace rstc {

/// SplitMix64 finalizer. Also used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive the seed of an independent stream from a master seed and up to
/// three indices (trial, mode, block, ...). All randomness in the library
/// flows through this, so runs are reproducible under any evaluation order.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ULL);
    s = mix64(s ^ (a + 0x9e3779b97f4a7c15ULL));
    s = mix64(s ^ (b + 0x632be59bd9b4e019ULL));
    s = mix64(s ^ (c + 0xd1342543de82ef95ULL));
    return s;
}

/// SplitMix64 generator (Steele, Lea, Flood). Chosen over std::mt19937_64
/// because the output sequence, including the Gaussian transform below, is
/// pinned by this header and therefore bit-reproducible across toolchains.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        return mix64(z);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]. Safe as a log() argument.
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal pair via Box-Muller.
    void next_gaussian_pair(double &g0, double &g1) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double u = next_double_open();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        g0 = r * std::cos(two_pi * v);
        g1 = r * std::sin(two_pi * v);
    }

    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double a, b;
        next_gaussian_pair(a, b);
        cached_ = b;
        have_cached_ = true;
        return a;
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = 1, i.e. real and
    /// imaginary parts are independent N(0, 1/2).
    std::complex<double> next_cn() {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        double a, b;
        next_gaussian_pair(a, b);
        return {a * inv_sqrt2, b * inv_sqrt2};
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace rstc
