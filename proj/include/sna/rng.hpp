#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sna {

// xoshiro256++: cheap to construct per work item, solid statistical
// quality for Monte-Carlo use.
class Xoshiro256 {
public:
    using result_type = uint64_t;
    explicit Xoshiro256(uint64_t seed = 0) {
        uint64_t x = seed + 0x9e3779b97f4a7c15ULL;
        for (uint64_t& word : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~uint64_t{0}; }
    result_type operator()() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    uint64_t s_[4];
};

using Rng = Xoshiro256;

// splitmix64 finalizer; good enough to decorrelate derived seeds
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_name(std::string_view name) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All randomness in the toolkit flows from one root seed through named
// substreams, so re-running a single component reproduces its stream.
struct SeedStream {
    uint64_t state;

    explicit SeedStream(uint64_t root) : state(mix64(root)) {}
    SeedStream(uint64_t root, std::string_view name)
        : state(mix64(mix64(root) ^ hash_name(name))) {}

    SeedStream sub(std::string_view name) const {
        SeedStream s(0);
        s.state = mix64(state ^ hash_name(name));
        return s;
    }
    SeedStream sub(uint64_t index) const {
        SeedStream s(0);
        s.state = mix64(state ^ mix64(index + 1));
        return s;
    }
    uint64_t seed() const { return state; }
    Rng rng() const { return Rng(state); }
    // Independent generator for work item i; parallel loops seed each
    // iteration by index so results do not depend on thread count.
    Rng rng_at(uint64_t i) const { return Rng(mix64(state ^ mix64(i + 0x51ed2701ULL))); }
};

inline double uniform01(Rng& r) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(r);
}

inline int uniform_int(Rng& r, int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(r);
}

}  // namespace sna
