// chartpilot - channel-charting pilot assignment simulator for multi-sector massive MIMO
// Copyright (C) 2026 chartpilot contributors
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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <random>
#include <vector>

namespace chartpilot {

/// splitmix64 avalanche step, used to derive independent seed streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Fold a list of words into one stream seed. Used everywhere a sub-stream
/// is derived from (seed, method, axis value, trial, ...) so that parallel
/// trials never share generator state.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x8C9B1F0D6A3E5B47ULL;
    for (std::uint64_t w : words) h = splitmix64(h ^ splitmix64(w));
    return h;
}

inline std::uint64_t double_bits(double v) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    std::memcpy(&u, &v, sizeof(u));
    return u;
}

/// Deterministic random source. The engine is std::mt19937_64 but all
/// variate transforms are explicit (53-bit uniforms, Box-Muller gaussians,
/// rejection-sampled integers) so that a given seed produces the same
/// sequence on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do { r = engine_(); } while (r >= limit);
        return static_cast<std::size_t>(r % n);
    }

    /// Standard normal via Box-Muller; the paired variate is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(kTwoPi_ * u2);
        have_spare_ = true;
        return mag * std::cos(kTwoPi_ * u2);
    }

    /// Circularly symmetric complex gaussian with E[|x|^2] = variance.
    std::complex<double> cgaussian(double variance = 1.0) {
        const double s = std::sqrt(variance * 0.5);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

    /// Choose k distinct indices out of n, ascending order.
    std::vector<int> sample_without_replacement(int n, int k) {
        std::vector<int> pool(n);
        for (int i = 0; i < n; ++i) pool[i] = i;
        for (int i = 0; i < k; ++i) {
            const std::size_t j = i + uniform_index(static_cast<std::size_t>(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> out(pool.begin(), pool.begin() + k);
        std::sort(out.begin(), out.end());
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[uniform_index(i)]);
    }

private:
    static constexpr double kTwoPi_ = 6.283185307179586476925286766559;
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace chartpilot
