#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gibbslab {

// Philox4x32-10 counter-based generator. Output depends only on (key, counter),
// so any coordinate of any replica's stream can be regenerated independently of
// evaluation order. That is what makes results identical across worker counts.
struct Philox4x32 {
    static constexpr std::uint32_t M0 = 0xD2511F53u;
    static constexpr std::uint32_t M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u;
    static constexpr std::uint32_t W1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// Stream purposes keep draws for different uses out of each other's counter space.
namespace rng_purpose {
inline constexpr std::uint32_t environment = 1;
inline constexpr std::uint32_t perturbation = 2;
inline constexpr std::uint32_t ou_noise = 3;
inline constexpr std::uint32_t sampler = 4;
inline constexpr std::uint32_t experiment = 5;
}  // namespace rng_purpose

inline double u64_to_unit_open(std::uint64_t x) {
    // (0,1]: never 0, so log() below is safe
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

inline double u64_to_unit_halfopen(std::uint64_t x) {
    // [0,1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// One block per counter value; each block carries two 64-bit words, enough for
// one Box-Muller pair or two uniforms.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint32_t replica_id, std::uint32_t purpose)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          replica_id_(replica_id),
          purpose_(purpose) {}

    std::array<std::uint64_t, 2> words_at(std::uint64_t index) const {
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             replica_id_, purpose_},
            key_);
        return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
                (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
    }

    // standard normal addressed by counter index
    double normal_at(std::uint64_t index) const {
        const auto w = words_at(index);
        const double u1 = u64_to_unit_open(w[0]);
        const double u2 = u64_to_unit_halfopen(w[1]);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double uniform_at(std::uint64_t index) const { return u64_to_unit_halfopen(words_at(index)[0]); }

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t replica_id_;
    std::uint32_t purpose_;
};

// Sequential facade over CounterRng for samplers and MCMC chains.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint32_t replica_id, std::uint32_t purpose)
        : rng_(seed, replica_id, purpose) {}

    double uniform() { return u64_to_unit_halfopen(next_word()); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = u64_to_unit_open(next_word());
        const double u2 = u64_to_unit_halfopen(next_word());
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // unbiased integer in [0, bound) by rejection on the top of the range
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        for (;;) {
            const std::uint64_t w = next_word();
            if (w < limit) return w % bound;
        }
    }

  private:
    std::uint64_t next_word() {
        if (word_pos_ == 0) {
            buffer_ = rng_.words_at(counter_++);
            word_pos_ = 1;
            return buffer_[0];
        }
        word_pos_ = 0;
        return buffer_[1];
    }

    CounterRng rng_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int word_pos_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gibbslab
