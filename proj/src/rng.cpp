#include "drda/rng.hpp"

#include <cmath>

namespace drda::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::array<std::uint32_t, 4> Stream::next_block() {
    const std::array<std::uint32_t, 4> counter{
        static_cast<std::uint32_t>(block_index_ & 0xffffffffu),
        static_cast<std::uint32_t>(block_index_ >> 32),
        trial_, stream_};
    ++block_index_;
    return philox4x32(counter, key_);
}

double Stream::next_uniform() {
    if (has_pending_uniform_) {
        has_pending_uniform_ = false;
        return pending_uniform_;
    }
    const auto w = next_block();
    const std::uint64_t a = (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(w[2]) << 32) | w[3];
    pending_uniform_ = static_cast<double>(b >> 11) * 0x1.0p-53;
    has_pending_uniform_ = true;
    return static_cast<double>(a >> 11) * 0x1.0p-53;
}

double Stream::next_normal() {
    if (has_pending_normal_) {
        has_pending_normal_ = false;
        return pending_normal_;
    }
    // 1-u1 lies in (0,1], keeping the log finite.
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * M_PI * u2;
    pending_normal_ = r * std::sin(theta);
    has_pending_normal_ = true;
    return r * std::cos(theta);
}

Eigen::VectorXd Stream::normals(Eigen::Index n, double mean, double stddev) {
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = mean + stddev * next_normal();
    return out;
}

} // namespace drda::rng
