#pragma once
/**
 * @file
 * @brief Seeded random source with platform-independent draws.
 *
 * std::uniform_*_distribution output is implementation defined, so draws are
 * derived directly from the 64-bit engine output.
 */

#include <cstdint>
#include <random>

namespace mrmp
{
    class Rng
    {
      public:
        explicit Rng (std::uint64_t seed = 0) : engine_ (seed) {}

        std::uint64_t bits () { return engine_ (); }

        /// Uniform in [0, 1).
        double uniform () { return static_cast<double> (engine_ () >> 11) * 0x1.0p-53; }

        double uniform (double lo, double hi) { return lo + (hi - lo) * uniform (); }

        /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
        std::uint64_t below (std::uint64_t n)
        {
            std::uint64_t x = engine_ ();
            __uint128_t m = static_cast<__uint128_t> (x) * n;
            auto low = static_cast<std::uint64_t> (m);
            if (low < n)
            {
                const std::uint64_t threshold = (0 - n) % n;
                while (low < threshold)
                {
                    x = engine_ ();
                    m = static_cast<__uint128_t> (x) * n;
                    low = static_cast<std::uint64_t> (m);
                }
            }
            return static_cast<std::uint64_t> (m >> 64);
        }

        bool bernoulli (double p) { return uniform () < p; }

        /// Derives an independent stream; used for per-robot and per-repetition seeds.
        static std::uint64_t mix (std::uint64_t seed, std::uint64_t salt)
        {
            std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

      private:
        std::mt19937_64 engine_;
    };

} // namespace mrmp
