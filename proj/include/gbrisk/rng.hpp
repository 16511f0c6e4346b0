#pragma once

#include <cstdint>

namespace gbrisk {

// xoshiro256++ (Blackman & Vigna, public domain reference implementation),
// seeded through splitmix64. One stream is owned by one caller at a time;
// parallel work derives independent substreams by index so results do not
// depend on scheduling.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) { reseed(seed); }

    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        reseed(seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1)));
    }

    static RngStream substream(std::uint64_t seed, std::uint64_t index) {
        return RngStream(seed, index);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1); never returns an endpoint.
    double next_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    void reseed(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : s_) {
            // splitmix64
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            s = z ^ (z >> 31);
        }
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace gbrisk
