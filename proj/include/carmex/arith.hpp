#pragma once

// Exact 64-bit integer arithmetic: modular products through 128-bit
// intermediates, deterministic primality, complete factorization and
// divisor enumeration.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace carmex {

using natural = std::uint64_t;
using u128 = unsigned __int128;

/// Upper end of the working range.
inline constexpr natural kWorkingLimit = 1'000'000'000'000'000'000ULL;

class TooManyDivisors : public std::runtime_error {
public:
    TooManyDivisors() : std::runtime_error("divisor count exceeds 2^24") {}
};

struct PrimePower {
    natural prime = 0;
    unsigned exponent = 0;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization, ascending by prime.
class Factorization {
public:
    Factorization() = default;
    explicit Factorization(std::vector<PrimePower> factors) : factors_(std::move(factors)) {}

    const std::vector<PrimePower>& factors() const noexcept { return factors_; }
    std::size_t size() const noexcept { return factors_.size(); }
    bool empty() const noexcept { return factors_.empty(); }
    auto begin() const noexcept { return factors_.begin(); }
    auto end() const noexcept { return factors_.end(); }
    const PrimePower& operator[](std::size_t i) const { return factors_[i]; }

    bool squarefree() const noexcept {
        return std::all_of(factors_.begin(), factors_.end(),
                           [](const PrimePower& f) { return f.exponent == 1; });
    }

    /// Product of prime^exponent. Wraps past 2^64; callers keep inputs in range.
    natural value() const noexcept {
        natural v = 1;
        for (const auto& f : factors_)
            for (unsigned e = 0; e < f.exponent; ++e) v *= f.prime;
        return v;
    }

    std::vector<natural> primes() const {
        std::vector<natural> out;
        out.reserve(factors_.size());
        for (const auto& f : factors_) out.push_back(f.prime);
        return out;
    }

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    std::vector<PrimePower> factors_;
};

inline natural mul_mod(natural a, natural b, natural m) {
    if (m == 0) throw std::domain_error("mul_mod: zero modulus");
    return static_cast<natural>(static_cast<u128>(a) * b % m);
}

inline natural pow_mod(natural b, natural e, natural m) {
    if (m == 0) throw std::domain_error("pow_mod: zero modulus");
    natural result = 1 % m;
    b %= m;
    while (e != 0) {
        if (e & 1) result = mul_mod(result, b, m);
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    return result;
}

inline natural gcd(natural a, natural b) noexcept { return std::gcd(a, b); }

/// lcm(a, b), or nullopt when it exceeds `cap`.
inline std::optional<natural> lcm(natural a, natural b, natural cap = kWorkingLimit) noexcept {
    if (a == 0 || b == 0) return natural{0};
    const natural q = a / gcd(a, b);
    const u128 r = static_cast<u128>(q) * b;
    if (r > cap) return std::nullopt;
    return static_cast<natural>(r);
}

/// Inverse of a modulo m, or nullopt when gcd(a, m) != 1.
inline std::optional<natural> inv_mod(natural a, natural m) {
    if (m < 2) throw std::domain_error("inv_mod: modulus must be at least 2");
    // Extended Euclid on signed 128-bit to keep the Bezout coefficients exact.
    __int128 old_r = a % m, r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) return std::nullopt;
    __int128 x = old_s % static_cast<__int128>(m);
    if (x < 0) x += m;
    return static_cast<natural>(x);
}

/// Montgomery arithmetic for a fixed odd modulus below 2^64.
class Montgomery {
public:
    explicit Montgomery(natural n) : n_(n) {
        natural inv = n;  // correct to 3 bits for odd n
        for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
        neg_inv_ = 0 - inv;
        r2_ = static_cast<natural>((u128(1) << 64) % n);
        r2_ = static_cast<natural>(static_cast<u128>(r2_) * r2_ % n);
        one_ = to(1);
    }

    natural modulus() const noexcept { return n_; }
    natural one() const noexcept { return one_; }

    natural reduce(u128 t) const noexcept {
        const natural m = static_cast<natural>(t) * neg_inv_;
        const u128 s = t + static_cast<u128>(m) * n_;
        // t + m*n may carry out of 128 bits when n > 2^63.
        const bool carry = s < t;
        natural r = static_cast<natural>(s >> 64);
        if (carry || r >= n_) r -= n_;
        return r;
    }
    natural to(natural a) const noexcept { return reduce(static_cast<u128>(a % n_) * r2_); }
    natural from(natural a) const noexcept { return reduce(a); }
    natural mul(natural a, natural b) const noexcept { return reduce(static_cast<u128>(a) * b); }
    natural add(natural a, natural b) const noexcept {
        const natural s = a + b;
        return (s < a || s >= n_) ? s - n_ : s;
    }
    natural sub(natural a, natural b) const noexcept { return a >= b ? a - b : a + (n_ - b); }

    natural pow(natural base_m, natural e) const noexcept {
        natural r = one_;
        while (e != 0) {
            if (e & 1) r = mul(r, base_m);
            base_m = mul(base_m, base_m);
            e >>= 1;
        }
        return r;
    }

private:
    natural n_;
    natural neg_inv_ = 0;
    natural r2_ = 0;
    natural one_ = 0;
};

namespace detail {

inline constexpr natural kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

inline bool strong_probable_prime(const Montgomery& mont, natural base, natural d, int s) {
    const natural n = mont.modulus();
    base %= n;
    if (base == 0) return true;
    const natural minus_one = mont.sub(0, mont.one());
    natural x = mont.pow(mont.to(base), d);
    if (x == mont.one() || x == minus_one) return true;
    for (int i = 1; i < s; ++i) {
        x = mont.mul(x, x);
        if (x == minus_one) return true;
    }
    return false;
}

// Prefix of the first-twelve-primes base set that suffices below each bound.
inline int witness_count(natural n) noexcept {
    if (n < 2'047ULL) return 1;
    if (n < 1'373'653ULL) return 2;
    if (n < 25'326'001ULL) return 3;
    if (n < 3'215'031'751ULL) return 4;
    if (n < 2'152'302'898'747ULL) return 5;
    if (n < 3'474'749'660'383ULL) return 6;
    if (n < 341'550'071'728'321ULL) return 7;
    if (n < 3'825'123'056'546'413'051ULL) return 9;
    return 12;
}

}  // namespace detail

/// Deterministic for every 64-bit n.
inline bool is_prime(natural n) {
    if (n < 2) return false;
    for (natural p : detail::kSmallPrimes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 41 * 41) return true;
    natural d = n - 1;
    const int s = std::countr_zero(d);
    d >>= s;
    const Montgomery mont(n);
    const int k = detail::witness_count(n);
    for (int i = 0; i < k; ++i)
        if (!detail::strong_probable_prime(mont, detail::kSmallPrimes[i], d, s)) return false;
    return true;
}

/// 2^(n-1) == 1 (mod n) for odd n >= 3. Necessary for every Carmichael n.
inline bool fermat_base2(natural n) {
    const Montgomery mont(n);
    return mont.pow(mont.to(2), n - 1) == mont.one();
}

inline natural isqrt(natural n) noexcept {
    natural r = static_cast<natural>(__builtin_sqrtl(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline natural icbrt(natural n) noexcept {
    natural r = static_cast<natural>(__builtin_cbrtl(static_cast<long double>(n)));
    auto cube = [](natural x) { return static_cast<u128>(x) * x * x; };
    while (r > 0 && cube(r) > n) --r;
    while (cube(r + 1) <= n) ++r;
    return r;
}

namespace detail {

// Brent's cycle-finding variant with batched gcds. Parameters follow the
// deterministic sequence c = 1, 2, 3, ...; returns a nontrivial factor of
// the odd composite n.
inline natural rho_split(natural n) {
    const Montgomery mont(n);
    for (natural c = 1;; ++c) {
        const natural cm = mont.to(c);
        auto f = [&](natural x) { return mont.add(mont.mul(x, x), cm); };
        natural y = mont.to(2), x = y, ys = y, q = mont.one();
        natural g = 1;
        constexpr natural kBatch = 128;
        for (natural r = 1; g == 1; r <<= 1) {
            x = y;
            for (natural i = 0; i < r; ++i) y = f(y);
            for (natural k = 0; k < r && g == 1; k += kBatch) {
                ys = y;
                const natural lim = std::min(kBatch, r - k);
                for (natural i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mont.mul(q, x > y ? x - y : y - x);
                }
                g = gcd(q, n);
            }
        }
        if (g == n) {
            // Batch overshot; step singly from the saved point.
            do {
                ys = f(ys);
                g = gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_into(natural n, std::vector<natural>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const natural r = isqrt(n);
    if (r * r == n) {
        factor_into(r, out);
        factor_into(r, out);
        return;
    }
    const natural g = rho_split(n);
    factor_into(g, out);
    factor_into(n / g, out);
}

}  // namespace detail

/// Trial division by primes below this bound precedes the rho stage.
inline constexpr natural kTrialDivisionBound = 1024;

inline Factorization factorize(natural n) {
    if (n == 0) throw std::domain_error("factorize: zero has no factorization");
    std::vector<PrimePower> out;
    auto take = [&](natural p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.push_back({p, e});
    };
    take(2);
    for (natural p = 3; p < kTrialDivisionBound && p * p <= n; p += 2) take(p);
    if (n > 1) {
        std::vector<natural> big;
        if (n < kTrialDivisionBound * kTrialDivisionBound)
            big.push_back(n);
        else
            detail::factor_into(n, big);
        std::sort(big.begin(), big.end());
        for (std::size_t i = 0; i < big.size();) {
            std::size_t j = i;
            while (j < big.size() && big[j] == big[i]) ++j;
            out.push_back({big[i], static_cast<unsigned>(j - i)});
            i = j;
        }
    }
    return Factorization(std::move(out));
}

inline constexpr std::size_t kMaxDivisors = std::size_t{1} << 24;

/// All divisors, ascending.
inline std::vector<natural> divisors(const Factorization& f) {
    std::size_t count = 1;
    for (const auto& pp : f) {
        count *= pp.exponent + 1;
        if (count > kMaxDivisors) throw TooManyDivisors();
    }
    std::vector<natural> out{1};
    out.reserve(count);
    for (const auto& pp : f) {
        const std::size_t base = out.size();
        natural mult = 1;
        for (unsigned e = 0; e < pp.exponent; ++e) {
            mult *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * mult);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace carmex
