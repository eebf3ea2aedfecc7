#include "vfsk/rng.hpp"

#include <cmath>
#include <numbers>

namespace vfsk {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

Philox4x32::Counter block(StreamKey key, DrawTag tag, std::uint64_t block_index) noexcept {
    // Counter words: block index (64 bit), stream low word, stream high word
    // mixed with the tag. The key carries the seed.
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(block_index),
        static_cast<std::uint32_t>(block_index >> 32),
        static_cast<std::uint32_t>(key.stream),
        static_cast<std::uint32_t>(key.stream >> 32) ^ (static_cast<std::uint32_t>(tag) << 24),
    };
    const Philox4x32::Key k{static_cast<std::uint32_t>(key.seed),
                            static_cast<std::uint32_t>(key.seed >> 32)};
    return Philox4x32::bijection(ctr, k);
}

inline double to_unit53(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    // (bits + 0.5) / 2^53 lies strictly inside (0, 1).
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

inline double to_unit32(std::uint32_t x) noexcept {
    return (static_cast<double>(x) + 0.5) * 0x1.0p-32;
}

inline void box_muller(double u1, double u2, double& z0, double& z1) noexcept {
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

}  // namespace

Philox4x32::Counter Philox4x32::bijection(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double normal_at(StreamKey key, DrawTag tag, std::uint64_t index) noexcept {
    const auto b = block(key, tag, index >> 1);
    double z0, z1;
    box_muller(to_unit53(b[0], b[1]), to_unit53(b[2], b[3]), z0, z1);
    return (index & 1u) ? z1 : z0;
}

double uniform_at(StreamKey key, DrawTag tag, std::uint64_t index) noexcept {
    const auto b = block(key, tag, index >> 1);
    return (index & 1u) ? to_unit53(b[2], b[3]) : to_unit53(b[0], b[1]);
}

void CounterRng::refill() noexcept {
    buf_ = block(key_, tag_, block_++);
    used_ = 0;
}

double CounterRng::uniform32() noexcept {
    if (used_ >= 4) refill();
    return to_unit32(buf_[used_++]);
}

double CounterRng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    if (used_ >= 4) refill();
    if (used_ > 0) refill();
    double z0;
    box_muller(to_unit53(buf_[0], buf_[1]), to_unit53(buf_[2], buf_[3]), z0, spare_normal_);
    used_ = 4;
    has_spare_ = true;
    return z0;
}

}  // namespace vfsk
