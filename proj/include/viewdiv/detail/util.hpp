#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace viewdiv::detail {

// 64-bit FNV-1a; used for corpus hashes and for deriving per-article seeds.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64 finalizer; decorrelates seeds that differ in few bits.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    return mix64(seed ^ fnv1a(tag));
}

// xoshiro-free, allocation-free RNG with a fixed cross-platform stream.
// std::shuffle / std::uniform_*_distribution are implementation-defined,
// so every draw this library makes goes through this struct instead.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed == 0 ? 0x4d595df4d0f33173ull : seed) {}

    std::uint64_t next_u64() {
        state = mix64(state);
        return state;
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n); n > 0. Modulo bias is irrelevant at the sizes
    // used here and keeps the stream portable.
    std::size_t next_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }
};

// Fisher-Yates with the portable Rng above.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = rng.next_index(i);
        std::swap(v[i - 1], v[j]);
    }
}

// %.12g, the format every CSV in this project uses.
inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Runs fn(i) for i in [0, n). Work items may run on any thread but each
// index is executed exactly once; callers write results into slot i so
// the outcome is independent of scheduling. threads <= 1 runs inline.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace viewdiv::detail
