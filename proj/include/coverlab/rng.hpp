#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace coverlab {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

/// Sequential normal/uniform draws from the Philox stream keyed by
/// base_seed; the stream id occupies the upper half of the counter, so
/// streams never overlap and any stream can be produced independently.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t base_seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32)},
          stream_(stream) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        if (pos_ >= 4) refill();
        std::uint32_t a = buf_[pos_++];
        if (pos_ >= 4) refill();
        std::uint32_t b = buf_[pos_++];
        return ((a >> 5) * 67108864.0 + (b >> 6)) * (1.0 / 9007199254740992.0);
    }

    /// Two independent standard normals (Box-Muller, one Philox block).
    void normal_pair(double& z0, double& z1) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * M_PI * u2;
        z0 = r * std::cos(th);
        z1 = r * std::sin(th);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z0, z1;
        normal_pair(z0, z1);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

    std::uint64_t blocks_used() const { return block_; }

private:
    void refill() {
        buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                          key_);
        ++block_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace coverlab
