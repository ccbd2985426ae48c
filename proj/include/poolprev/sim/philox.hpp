#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace poolprev {

/// Philox4x64 with 10 rounds, following the reference constants; output is
/// bit-compatible with other implementations of the same generator. Being
/// counter-based, any (counter, key) block can be generated independently,
/// which is what makes per-trial streams order-independent.
struct Philox4x64 {
    using Counter = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static Counter block(Counter x, Key k) {
        for (int round = 0; round < 10; ++round) {
            const auto p0 = static_cast<unsigned __int128>(kMul0) * x[0];
            const auto p1 = static_cast<unsigned __int128>(kMul1) * x[2];
            const auto lo0 = static_cast<std::uint64_t>(p0);
            const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const auto lo1 = static_cast<std::uint64_t>(p1);
            const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
            x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return x;
    }
};

/// FNV-1a 64-bit hash; used to derive the per-condition key word from the
/// condition id string.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Random stream for one simulated trial. The key is
/// (master seed, condition hash) and the counter starts at
/// (trial index, 0, 0, 0) with the second word counting blocks, so streams
/// for different trials or conditions never overlap and may be generated in
/// any order or in parallel.
class TrialStream {
public:
    TrialStream(std::uint64_t master_seed, std::uint64_t condition_hash, std::uint64_t trial_index)
        : key_{master_seed, condition_hash}, counter_{trial_index, 0, 0, 0} {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buffer_ = Philox4x64::block(counter_, key_);
            ++counter_[1];
            pos_ = 0;
        }
        return buffer_[pos_++];
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_uniform() < p; }

private:
    Philox4x64::Key key_;
    Philox4x64::Counter counter_;
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
};

} // namespace poolprev
