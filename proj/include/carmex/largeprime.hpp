#pragma once

// Large-prime variation: fix the largest prime p and walk the cofactors
// m = 1 + k (p - 1). Since p - 1 | m - 1, p - 1 | N - 1 holds for N = m p
// automatically; only the primes of m need checking.

#include <stdexcept>
#include <string>
#include <vector>

#include "carmex/arith.hpp"
#include "carmex/carmichael.hpp"
#include "carmex/search.hpp"
#include "carmex/sieve.hpp"

namespace carmex {

/// Largest primes p with p_lo < p <= p_hi, numbers up to limit.
struct ScanRange {
    natural p_lo = 0;
    natural p_hi = 0;
    natural limit = 0;

    void validate() const {
        if (p_lo >= p_hi) throw std::invalid_argument("scan: need p_lo < p_hi");
        if (p_hi > isqrt(limit)) throw std::invalid_argument("scan: p_hi exceeds floor(sqrt(limit))");
    }

    std::string id() const { return "lp:" + std::to_string(p_lo) + "-" + std::to_string(p_hi); }
};

/// Tests every cofactor of one prime p.
inline void scan_prime(natural p, natural limit, std::vector<CarmichaelRecord>& out,
                       unsigned d_min = 3, unsigned d_max = kUnboundedFactors) {
    const natural mmax = limit / p;
    // m = p fails (q < p is required), so the walk starts at m = 2p - 1.
    for (natural m = 2 * p - 1; m <= mmax; m += p - 1) {
        const natural n = m * p;
        if (!fermat_base2(n)) continue;
        const Factorization f = factorize(m);
        const unsigned d = static_cast<unsigned>(f.size() + 1);
        if (d < d_min || d > d_max || !f.squarefree()) continue;
        if (f.factors().back().prime >= p) continue;
        bool ok = true;
        for (const auto& pp : f)
            if ((n - 1) % (pp.prime - 1) != 0) { ok = false; break; }
        if (!ok) continue;
        auto primes = f.primes();
        primes.push_back(p);
        search_detail::emit_checked(out, n, std::move(primes));
    }
}

/// Every Carmichael N <= limit whose largest prime lies in (p_lo, p_hi].
inline std::vector<CarmichaelRecord> scan(const ScanRange& range, unsigned d_min = 3,
                                          unsigned d_max = kUnboundedFactors) {
    range.validate();
    std::vector<CarmichaelRecord> out;
    for_each_prime_in(range.p_lo, range.p_hi, [&](natural p) {
        if (p >= 3) scan_prime(p, range.limit, out, d_min, d_max);
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Splits (p_lo, p_hi] into roughly equal-work subranges. The work for a
/// prime p is about limit / p^2, so boundaries are spaced evenly in 1 / p.
inline std::vector<ScanRange> split_scan_range(const ScanRange& range, std::size_t pieces) {
    range.validate();
    std::vector<ScanRange> out;
    if (pieces <= 1) {
        out.push_back(range);
        return out;
    }
    const double inv_lo = 1.0 / static_cast<double>(std::max<natural>(range.p_lo, 1));
    const double inv_hi = 1.0 / static_cast<double>(range.p_hi);
    natural lo = range.p_lo;
    for (std::size_t i = 1; i <= pieces && lo < range.p_hi; ++i) {
        natural hi = range.p_hi;
        if (i < pieces) {
            const double inv = inv_lo + (inv_hi - inv_lo) * static_cast<double>(i) / static_cast<double>(pieces);
            hi = std::clamp<natural>(static_cast<natural>(1.0 / inv), lo + 1, range.p_hi);
        }
        out.push_back({lo, hi, range.limit});
        lo = hi;
    }
    return out;
}

}  // namespace carmex
