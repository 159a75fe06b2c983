#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmex/arith.hpp"

namespace carmex {

/// Odd-only bit-packed sieve of Eratosthenes up to a fixed limit.
class PrimeSieve {
public:
    explicit PrimeSieve(natural limit) : limit_(limit < 2 ? 2 : limit) {
        const natural slots = limit_ / 2 + 1;  // slot i <-> 2i+1
        composite_.assign((slots + 63) / 64, 0);
        mark(0);  // 1
        for (natural i = 1; (2 * i + 1) * (2 * i + 1) <= limit_; ++i) {
            if (test(i)) continue;
            const natural p = 2 * i + 1;
            for (natural j = p * p / 2; j < slots; j += p) mark(j);
        }
        primes_.push_back(2);
        for (natural i = 1; 2 * i + 1 <= limit_; ++i)
            if (!test(i)) primes_.push_back(2 * i + 1);
    }

    natural limit() const noexcept { return limit_; }
    const std::vector<natural>& primes() const noexcept { return primes_; }

    bool contains_prime(natural n) const {
        if (n > limit_) throw std::out_of_range("PrimeSieve: query above sieve limit");
        if (n < 2) return false;
        if (n % 2 == 0) return n == 2;
        return !test(n / 2);
    }

private:
    void mark(natural i) noexcept { composite_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(natural i) const noexcept { return (composite_[i / 64] >> (i % 64)) & 1; }

    natural limit_;
    std::vector<std::uint64_t> composite_;
    std::vector<natural> primes_;
};

inline constexpr natural kDefaultSieveLimit = 1'000'000;

/// Sieve bound, overridable through CARMEX_SIEVE_LIMIT.
inline natural sieve_limit_from_env() {
    if (const char* env = std::getenv("CARMEX_SIEVE_LIMIT")) {
        try {
            const unsigned long long v = std::stoull(env);
            if (v >= 1000) return v;
        } catch (const std::exception&) {
        }
        throw std::invalid_argument(std::string("CARMEX_SIEVE_LIMIT: bad value '") + env + "'");
    }
    return kDefaultSieveLimit;
}

/// Built once on first use, then read-only.
inline const PrimeSieve& shared_sieve() {
    static const PrimeSieve sieve(sieve_limit_from_env());
    return sieve;
}

/// Primes in (lo, hi], produced segment by segment.
template <typename Visit>
void for_each_prime_in(natural lo, natural hi, Visit&& visit) {
    if (hi <= lo) return;
    const natural root = isqrt(hi);
    const PrimeSieve base_local(root < 1000 ? 1000 : root);
    const auto& base = base_local.primes();
    constexpr natural kSegment = natural{1} << 18;
    std::vector<bool> composite;
    for (natural seg_lo = lo + 1; seg_lo <= hi;) {
        const natural seg_hi = std::min(hi, seg_lo + kSegment - 1);
        composite.assign(seg_hi - seg_lo + 1, false);
        for (natural p : base) {
            if (p * p > seg_hi) break;
            natural start = std::max(p * p, (seg_lo + p - 1) / p * p);
            for (natural m = start; m <= seg_hi; m += p) composite[m - seg_lo] = true;
        }
        for (natural n = seg_lo; n <= seg_hi; ++n)
            if (n >= 2 && !composite[n - seg_lo]) visit(n);
        if (seg_hi == hi) break;
        seg_lo = seg_hi + 1;
    }
}

inline std::vector<natural> primes_in(natural lo, natural hi) {
    std::vector<natural> out;
    for_each_prime_in(lo, hi, [&](natural p) { out.push_back(p); });
    return out;
}

}  // namespace carmex
