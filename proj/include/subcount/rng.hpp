#pragma once

#include <cstdint>
#include <vector>

namespace subcount {

// splitmix64: the mixing function used everywhere a seed is derived from
// another seed.  Chosen because it is a published, fixed bit mix, so derived
// seed streams are reproducible across platforms and releases.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent child seed from (base, stream, index).  `stream`
// separates uses (graph structure vs node indices vs shuffling) so that the
// same job index never reuses a stream.
inline uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index) {
    return splitmix64(base ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + index));
}

// Deterministic RNG.  xoshiro-free on purpose: a splitmix64 sequence is
// enough for graph generation and weight init, and the bounded-draw and
// shuffle logic is written out by hand because std::uniform_int_distribution
// and std::shuffle are implementation-defined (outputs differ between
// standard libraries, which would break byte-identical reruns).
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x853c49e6748fea9bULL)) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound).  Rejection sampling kills modulo bias.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) return 0;
        uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool next_bool(double p) { return next_double() < p; }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    uint64_t state_;
};

}  // namespace subcount
