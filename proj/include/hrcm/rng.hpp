#ifndef HRCM_RNG_HPP
#define HRCM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hrcm {

/** Counter-based splittable random stream.
 *
 * A stream is a 64-bit key plus a call counter; every output is a stateless
 * mix of (key, counter), so substreams derived from the same key coordinates
 * always produce the same values regardless of how many other streams were
 * consumed in between.  Parallel replicas each derive their own stream from
 * (seed, replica_id) and pair-level Bernoulli draws use (replica, i, j), so
 * adding points or reordering work never perturbs earlier randomness. */
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t key) : key_(key), ctr_(0) {}

    /** Derives a stream from a master seed. */
    static RandomStream from_seed(std::uint64_t seed) {
        return RandomStream(mix(seed ^ 0x5851f42d4c957f2dULL));
    }

    /** Derives an independent substream keyed by up to two coordinates.
     * Deterministic in (parent key, a, b) only; does not consume state. */
    RandomStream split(std::uint64_t a, std::uint64_t b = 0) const {
        std::uint64_t h = key_;
        h = mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
        h = mix(h ^ (b + 0xbf58476d1ce4e5b9ULL));
        return RandomStream(h);
    }

    std::uint64_t next_u64() {
        return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL);
    }

    /** Uniform double in [0,1) with 53 random bits. */
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /** Standard normal via Box-Muller (pairs generated, one cached). */
    double next_normal() {
        if (have_cache_) { have_cache_ = false; return cache_; }
        double u1, u2;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        cache_ = rad * std::sin(ang);
        have_cache_ = true;
        return rad * std::cos(ang);
    }

    /** Poisson draw by inversion; large means are split into chunks of mean
     * <= 256 so exp(-mean) never underflows. */
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean < 0");
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 256.0 ? 256.0 : mean;
            mean -= chunk;
            const double l = std::exp(-chunk);
            double p = 1.0;
            std::uint64_t k = 0;
            do { ++k; p *= next_double(); } while (p > l);
            total += k - 1;
        }
        return total;
    }

    std::uint64_t key() const { return key_; }

  private:
    /** SplitMix64 finalizer: bijective 64-bit avalanche mix. */
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

} // namespace hrcm

#endif
