#pragma once

#include <cmath>
#include <cstdint>

namespace msgl {

/// Counter-based deterministic RNG (splitmix64 core).
///
/// Streams are derived from (seed, stream, counter) tuples, so any point in a
/// run's random sequence can be reconstructed from integers alone. That is
/// what makes checkpoint-resume bit-exact: no generator state needs to be
/// serialized, only the step index.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    /// Derive an independent stream, e.g. stream(seed, kLatent, step).
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t counter = 0) {
        std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ull);
        s = mix(s ^ mix(stream_id + 0xbf58476d1ce4e5b9ull));
        s = mix(s ^ mix(counter + 0x94d049bb133111ebull));
        return Rng(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Guard the log argument; uniform() can return exactly 0.
        double r = std::sqrt(-2.0 * std::log(u1 > 0.0 ? u1 : 0x1.0p-53));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        // 128-bit multiply trick; bias is unmeasurable at the scales used here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Stream ids used by the trainer; fixed so resumed runs replay identically.
namespace rng_stream {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kData = 2;
inline constexpr std::uint64_t kLatent = 3;
inline constexpr std::uint64_t kAugment = 4;
inline constexpr std::uint64_t kEval = 5;
}  // namespace rng_stream

}  // namespace msgl
