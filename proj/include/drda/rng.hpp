#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Dense>

namespace drda::rng {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// A block is a pure function of (counter, key): no hidden state, so disjoint
// streams are carved out by fixing counter words instead of jumping ahead.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Generator identifier recorded in output metadata.
inline const char* generator_name() { return "philox4x32-10"; }

// One i.i.d. stream addressed by (seed, trial, stream id).
// Counter layout per block: (block_lo, block_hi, trial, stream); key = seed.
// Each block yields two uniforms in [0,1) or two Box-Muller normals.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint32_t trial, std::uint32_t stream_id)
        : key_{static_cast<std::uint32_t>(seed & 0xffffffffu),
               static_cast<std::uint32_t>(seed >> 32)},
          trial_(trial), stream_(stream_id) {}

    // Uniform on [0,1), 53-bit resolution.
    double next_uniform();

    // Standard normal via Box-Muller on consecutive uniforms.
    double next_normal();

    Eigen::VectorXd normals(Eigen::Index n, double mean = 0.0, double stddev = 1.0);

private:
    std::array<std::uint32_t, 4> next_block();

    std::array<std::uint32_t, 2> key_;
    std::uint32_t trial_;
    std::uint32_t stream_;
    std::uint64_t block_index_ = 0;
    double pending_uniform_ = 0.0;
    double pending_normal_ = 0.0;
    bool has_pending_uniform_ = false;
    bool has_pending_normal_ = false;
};

} // namespace drda::rng
