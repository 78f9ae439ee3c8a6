/*
 * Copyright 2026 fbschur developers
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FBSCHUR_RNG_HPP
#define FBSCHUR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace fbschur {

/// splitmix64 step, used to derive independent stream seeds from (seed, index)
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// deterministic per-stream generator: stream index folded into the seed
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// uniform in (0,1), never returning 0
inline double uniform01(std::mt19937_64& rng) {
    double u = double((rng() >> 11) + 1) * 0x1.0p-53;
    return u;
}

/// geometric with P(k) = q^k (1-q), k >= 0, by inverse CDF on a 64-bit draw
inline long geometric_q(double q, std::mt19937_64& rng) {
    if (q <= 0.0) return 0;
    double u = uniform01(rng);
    return long(std::floor(std::log(u) / std::log(q)));
}

} // namespace fbschur

#endif
