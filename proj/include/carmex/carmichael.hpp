#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "carmex/arith.hpp"

namespace carmex {

/// A verified Carmichael number with its ascending prime factors.
struct CarmichaelRecord {
    natural n = 0;
    std::vector<natural> primes;

    std::size_t factor_count() const noexcept { return primes.size(); }
    natural largest_prime() const noexcept { return primes.empty() ? 0 : primes.back(); }
    natural smallest_prime() const noexcept { return primes.empty() ? 0 : primes.front(); }

    friend bool operator==(const CarmichaelRecord&, const CarmichaelRecord&) = default;
    friend bool operator<(const CarmichaelRecord& a, const CarmichaelRecord& b) noexcept {
        return a.n < b.n;
    }
};

/// (n - 1) / phi(n), kept as an exact fraction.
struct LehmerRatio {
    natural num = 0;
    natural den = 1;

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    /// num/den >= a/b, compared by cross-multiplication.
    bool at_least(natural a, natural b) const noexcept {
        return static_cast<u128>(num) * b >= static_cast<u128>(a) * den;
    }
    friend bool operator<(const LehmerRatio& x, const LehmerRatio& y) noexcept {
        return static_cast<u128>(x.num) * y.den < static_cast<u128>(y.num) * x.den;
    }
};

/// Korselt's criterion on a supplied factorization of n.
inline bool korselt(natural n, const Factorization& f) {
    if (n < 3 || f.size() < 3 || !f.squarefree()) return false;
    for (const auto& pp : f)
        if ((n - 1) % (pp.prime - 1) != 0) return false;
    return true;
}

inline bool korselt(natural n, const std::vector<natural>& primes) {
    std::vector<PrimePower> pp;
    pp.reserve(primes.size());
    for (natural p : primes) pp.push_back({p, 1});
    return korselt(n, Factorization(std::move(pp)));
}

inline bool is_carmichael(natural n) {
    if (n < 3 || n % 2 == 0) return false;
    return korselt(n, factorize(n));
}

/// Exponent of the multiplicative group modulo the factored integer.
inline natural carmichael_lambda(const Factorization& f) {
    natural result = 1;
    for (const auto& pp : f) {
        natural local;
        if (pp.prime == 2) {
            local = pp.exponent <= 2 ? natural{1} << (pp.exponent - 1) : natural{1} << (pp.exponent - 2);
        } else {
            local = pp.prime - 1;
            for (unsigned e = 1; e < pp.exponent; ++e) local *= pp.prime;
        }
        const auto l = lcm(result, local, ~natural{0});
        if (!l) throw std::overflow_error("carmichael_lambda: exceeds 64 bits");
        result = *l;
    }
    return result;
}

inline natural euler_phi(const Factorization& f) {
    natural result = 1;
    for (const auto& pp : f) {
        result *= pp.prime - 1;
        for (unsigned e = 1; e < pp.exponent; ++e) result *= pp.prime;
    }
    return result;
}

/// (n - 1) / lambda(n) for a Carmichael n.
inline natural index_of(natural n, const Factorization& f) {
    if (!korselt(n, f)) throw std::domain_error("index_of: not a Carmichael number");
    return (n - 1) / carmichael_lambda(f);
}

inline LehmerRatio lehmer_index(natural n, const Factorization& f) {
    if (n < 4 || f.empty() || (f.size() == 1 && f[0].exponent == 1))
        throw std::domain_error("lehmer_index: n must be composite");
    return {n - 1, euler_phi(f)};
}

inline Factorization squarefree_factorization(const std::vector<natural>& primes) {
    std::vector<PrimePower> pp;
    pp.reserve(primes.size());
    for (natural p : primes) pp.push_back({p, 1});
    return Factorization(std::move(pp));
}

inline natural index_of(const CarmichaelRecord& r) {
    return index_of(r.n, squarefree_factorization(r.primes));
}
inline LehmerRatio lehmer_index(const CarmichaelRecord& r) {
    return lehmer_index(r.n, squarefree_factorization(r.primes));
}

/// Builds a record from n, or throws if n is not a Carmichael number.
inline CarmichaelRecord make_record(natural n) {
    const Factorization f = factorize(n);
    if (!korselt(n, f)) throw std::domain_error("make_record: not a Carmichael number");
    return {n, f.primes()};
}

inline constexpr natural kOracleCap = 1'000'000;

// The Fermat-definition oracle below deliberately avoids factorize, is_prime
// and korselt so it stays independent of every search path.
namespace oracle_detail {

inline bool composite_by_trial(natural n) {
    for (natural d = 2; d * d <= n; ++d)
        if (n % d == 0) return true;
    return false;
}

inline std::vector<natural> trial_primes(natural n) {
    std::vector<natural> out;
    for (natural d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

}  // namespace oracle_detail

/// b^(n-1) == 1 (mod n) for every base 1 < b < n coprime to n, with n
/// composite. Base n - 1 is included, which rules out even n.
inline bool fermat_oracle(natural n, natural cap = kOracleCap) {
    if (n > cap) throw std::out_of_range("fermat_oracle: n above oracle cap");
    if (n < 3 || !oracle_detail::composite_by_trial(n)) return false;
    for (natural b = 2; b <= n - 1; ++b) {
        if (gcd(b, n) != 1) continue;
        if (pow_mod(b, n - 1, n) != 1) return false;
    }
    return true;
}

/// Every n <= limit satisfying the Fermat oracle, ascending.
inline std::vector<CarmichaelRecord> brute_scan(natural limit, natural cap = kOracleCap) {
    if (limit > cap) throw std::out_of_range("brute_scan: limit above oracle cap");
    std::vector<CarmichaelRecord> out;
    for (natural n = 3; n <= limit; ++n)
        if (fermat_oracle(n, cap)) out.push_back({n, oracle_detail::trial_primes(n)});
    return out;
}

}  // namespace carmex
