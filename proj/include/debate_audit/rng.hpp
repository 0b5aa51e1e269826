#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace debate_audit::rng {

/// Identity string recorded in run metadata so samples can be replicated
/// by any implementation of the same procedure, in any language.
inline constexpr std::string_view kGeneratorId = "mt19937_64+rejection+fisher_yates/v1";

/// Seeded generator with fully specified draw procedures. std::mt19937_64
/// output is pinned by the standard; the bounded draw and shuffle below are
/// spelled out here because the std distributions are not portable.
class Engine {
public:
    explicit Engine(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Unbiased draw in [0, bound) by rejection (arc4random_uniform scheme):
    /// reject the low 2^64 mod bound values, then reduce.
    std::uint64_t below(std::uint64_t bound) {
        if (bound < 2) return 0;
        const std::uint64_t min = (0 - bound) % bound;
        std::uint64_t r = next();
        while (r < min) r = next();
        return r % bound;
    }

    /// Uniform in [0,1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

/// In-place Fisher-Yates: for i = n-1 .. 1, swap v[i] with v[below(i+1)].
template <typename T>
void fisher_yates(std::vector<T>& v, Engine& engine) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(engine.below(i));
        using std::swap;
        swap(v[i - 1], v[j]);
    }
}

/// splitmix64 finalizer, used when deriving child seeds from a name.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for a named stream: splitmix64(seed ^ fnv1a64(stream)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

}  // namespace debate_audit::rng
