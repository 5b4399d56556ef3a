#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lutamm {

/// Dimension / shape violations (caller bugs, rejected up front).
class dim_error : public std::invalid_argument {
public:
    explicit dim_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed input data (files, streams).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invariant breach inside a simulation run; halts the run.
class sim_fault : public std::logic_error {
public:
    explicit sim_fault(const std::string& msg) : std::logic_error(msg) {}
};

/// Round half away from zero. All fixed-point conversions in this library
/// use this rule so results are bit-reproducible across implementations.
inline double round_haz(double x) { return std::round(x); }

inline int64_t round_haz_i64(double x) { return static_cast<int64_t>(std::round(x)); }

inline int8_t clamp_i8(int64_t v) {
    if (v < -128) return -128;
    if (v > 127) return 127;
    return static_cast<int8_t>(v);
}

inline uint8_t clamp_u8(int64_t v) {
    if (v < 0) return 0;
    if (v > 255) return 255;
    return static_cast<uint8_t>(v);
}

/// Stable fan-out of one global seed into per-component sub-seeds.
/// FNV-1a over the component name, mixed with the seed; no cross-component
/// coupling, reproducible across platforms.
inline uint64_t sub_seed(uint64_t seed, const std::string& component) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : component) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

} // namespace lutamm
