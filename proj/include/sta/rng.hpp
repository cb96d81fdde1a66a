#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace sta {

// Counter-based pseudorandom stream: output n is a stateless mix of
// (key, n), so independent per-person streams can be derived from a
// global seed without coordination and runs parallelize reproducibly.
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    static uint64_t mix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static uint64_t hash_str(const std::string& s) {
        uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    // Derive an independent stream, e.g. per person or per replicate.
    CounterRng fork(uint64_t salt) const { return CounterRng(mix(key_ ^ mix(salt))); }
    CounterRng fork(const std::string& name) const { return fork(hash_str(name)); }

    uint64_t next_u64() { return mix(key_ ^ counter_++); }

    // Uniform in [0, n) without modulo bias (n > 0).
    uint64_t next_below(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    double next_double() {  // [0,1)
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double next_normal() {
        double u1, u2;
        do { u1 = next_double(); } while (u1 <= 0.0);
        u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // k distinct indices from [0, n), partial Fisher-Yates, sorted output order
    // is the draw order.
    std::vector<uint32_t> sample_without_replacement(uint32_t n, uint32_t k) {
        std::vector<uint32_t> idx(n);
        for (uint32_t i = 0; i < n; ++i) idx[i] = i;
        std::vector<uint32_t> out;
        out.reserve(k);
        for (uint32_t i = 0; i < k && i < n; ++i) {
            uint32_t j = i + uint32_t(next_below(n - i));
            std::swap(idx[i], idx[j]);
            out.push_back(idx[i]);
        }
        return out;
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace sta
