#pragma once

#include <cmath>
#include <cstdint>

namespace volr {

namespace detail {

// SplitMix64 finalizer. Bijective on 64-bit words, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Counter-based random stream: output i is a pure function of
/// (seed, stream_id, i), so parallel consumers get reproducible,
/// scheduling-independent draws as long as each stream has one owner.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : key_(derive_key(seed, stream_id)), seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent child stream; deterministic in (this stream, id).
    RngStream substream(std::uint64_t id) const {
        RngStream s(0, 0);
        s.key_ = detail::mix64(key_ ^ detail::mix64(id * detail::kGamma + 0x6a09e667f3bcc909ULL));
        s.seed_ = seed_;
        s.stream_id_ = id;
        return s;
    }

    std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGamma); }

    /// Uniform in [0,1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; second value cached.
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - next_double();  // (0,1]
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
        return detail::mix64(detail::mix64(seed + detail::kGamma) ^
                             detail::mix64(stream_id * 0xd1342543de82ef95ULL + 1));
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace volr
