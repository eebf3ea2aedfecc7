#pragma once

#include <array>
#include <cstdint>

namespace vfsk {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A draw is a pure function of (key, counter), so every random number in a
/// simulation can be addressed directly by (seed, stream, purpose, index).
/// Nothing depends on the order in which workers consume numbers.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter bijection(Counter ctr, Key key) noexcept;
};

/// Purpose tags keep independent families of draws apart within one stream.
enum class DrawTag : std::uint32_t {
    WienerIncrement = 1,
    LangevinAux = 2,
    ChainUniform = 3,
    Generic = 4,
};

/// Addresses one independent stream of draws.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// Standard normal number `index` of the (key, tag) family.
double normal_at(StreamKey key, DrawTag tag, std::uint64_t index) noexcept;

/// Uniform on (0, 1) with 53 random bits, number `index` of the family.
double uniform_at(StreamKey key, DrawTag tag, std::uint64_t index) noexcept;

/// Sequential reader over one (key, tag) family. Cheap to copy.
class CounterRng {
public:
    CounterRng(StreamKey key, DrawTag tag) noexcept : key_(key), tag_(tag) {}

    /// Uniform on (0, 1) with 32 random bits; four per Philox block.
    double uniform32() noexcept;
    /// Standard normal via Box-Muller; two per Philox block.
    double normal() noexcept;

private:
    void refill() noexcept;

    StreamKey key_;
    DrawTag tag_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buf_{};
    int used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace vfsk
