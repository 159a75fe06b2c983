#pragma once

// Arbitrary-precision path, used only to verify known values beyond the
// 64-bit working range.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carmex/arith.hpp"
#include "carmex/sieve.hpp"

namespace carmex {

using BigNatural = boost::multiprecision::cpp_int;

struct BigPrimePower {
    BigNatural prime;
    unsigned exponent = 0;
};

namespace big_detail {

inline BigNatural mod(const BigNatural& a, const BigNatural& n) {
    BigNatural r = a % n;
    if (r < 0) r += n;
    return r;
}

inline BigNatural pow_mod(BigNatural b, BigNatural e, const BigNatural& m) {
    return boost::multiprecision::powm(b, e, m);
}

inline bool strong_probable_prime(const BigNatural& n, const BigNatural& base) {
    BigNatural d = n - 1;
    unsigned s = 0;
    while (!boost::multiprecision::bit_test(d, 0)) {
        d >>= 1;
        ++s;
    }
    BigNatural x = pow_mod(base % n, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

inline int jacobi(BigNatural a, BigNatural n) {
    a = mod(a, n);
    int t = 1;
    while (a != 0) {
        while (!boost::multiprecision::bit_test(a, 0)) {
            a >>= 1;
            const unsigned r = static_cast<unsigned>(n % 8);
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        a %= n;
    }
    return n == 1 ? t : 0;
}

inline BigNatural half_mod(BigNatural x, const BigNatural& n) {
    if (boost::multiprecision::bit_test(x, 0)) x += n;
    return x >> 1;
}

// Strong Lucas probable-prime test, Selfridge parameter choice (P = 1).
inline bool strong_lucas_probable_prime(const BigNatural& n) {
    BigNatural root = boost::multiprecision::sqrt(n);
    if (root * root == n) return false;
    long d_param = 5;
    for (;;) {
        const int j = jacobi(BigNatural(d_param), n);
        if (j == -1) break;
        if (j == 0 && mod(BigNatural(d_param), n) != 0) return false;
        d_param = d_param > 0 ? -(d_param + 2) : -(d_param - 2);
    }
    const BigNatural D = mod(BigNatural(d_param), n);
    const BigNatural Q = mod(BigNatural((1 - d_param) / 4), n);

    BigNatural d = n + 1;
    unsigned s = 0;
    while (!boost::multiprecision::bit_test(d, 0)) {
        d >>= 1;
        ++s;
    }
    BigNatural u = 1, v = 1, qk = Q;
    const unsigned bits = boost::multiprecision::msb(d);
    for (int i = static_cast<int>(bits) - 1; i >= 0; --i) {
        u = u * v % n;
        v = mod(v * v - 2 * qk, n);
        qk = qk * qk % n;
        if (boost::multiprecision::bit_test(d, static_cast<unsigned>(i))) {
            const BigNatural nu = half_mod(u + v, n);
            const BigNatural nv = half_mod(D * u + v, n);
            u = nu % n;
            v = nv % n;
            qk = qk * Q % n;
        }
    }
    if (u == 0 || v == 0) return true;
    for (unsigned r = 1; r < s; ++r) {
        v = mod(v * v - 2 * qk, n);
        if (v == 0) return true;
        qk = qk * qk % n;
    }
    return false;
}

}  // namespace big_detail

/// Deterministic below 3.3e24 (twelve prime bases); above that, a strong
/// base-2 test combined with a strong Lucas test.
inline bool is_prime_big(const BigNatural& n) {
    if (n < 2) return false;
    if (n <= std::numeric_limits<natural>::max()) return is_prime(static_cast<natural>(n));
    for (natural p : detail::kSmallPrimes)
        if (n % p == 0) return false;
    static const BigNatural kDeterministicBound("3317044064679887385961981");
    if (n < kDeterministicBound) {
        for (natural p : detail::kSmallPrimes)
            if (!big_detail::strong_probable_prime(n, BigNatural(p))) return false;
        return true;
    }
    return big_detail::strong_probable_prime(n, BigNatural(2)) &&
           big_detail::strong_lucas_probable_prime(n);
}

namespace big_detail {

// Pollard rho with Floyd cycle detection and batched gcds; nullopt once the
// step budget is spent.
inline std::optional<BigNatural> rho_split(const BigNatural& n, std::uint64_t& budget) {
    for (unsigned c = 1; budget > 0; ++c) {
        BigNatural x = 2, y = 2, q = 1, g = 1;
        while (g == 1 && budget > 0) {
            for (int i = 0; i < 64 && budget > 0; ++i, --budget) {
                x = (x * x + c) % n;
                y = (y * y + c) % n;
                y = (y * y + c) % n;
                q = q * (x > y ? BigNatural(x - y) : BigNatural(y - x)) % n;
            }
            g = boost::multiprecision::gcd(q, n);
        }
        if (g != 1 && g != n) return g;
    }
    return std::nullopt;
}

inline BigNatural integer_root(const BigNatural& n, unsigned k) {
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
    BigNatural x = BigNatural(1) << ((bits + k - 1) / k);
    for (;;) {
        const BigNatural y = ((k - 1) * x + n / boost::multiprecision::pow(x, k - 1)) / k;
        if (y >= x) return x;
        x = y;
    }
}

/// Smallest r with r^k == n for some k >= 2, together with that k.
inline std::optional<std::pair<BigNatural, unsigned>> perfect_power(const BigNatural& n) {
    if (n < 4) return std::nullopt;
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
    for (unsigned k = bits; k >= 2; --k) {
        const BigNatural r = integer_root(n, k);
        if (r > 1 && boost::multiprecision::pow(r, k) == n) return std::pair{r, k};
    }
    return std::nullopt;
}

inline bool factor_into(const BigNatural& n, std::vector<BigNatural>& out, std::uint64_t& budget) {
    if (n == 1) return true;
    if (is_prime_big(n)) {
        out.push_back(n);
        return true;
    }
    if (const auto pw = perfect_power(n)) {
        std::vector<BigNatural> root;
        if (!factor_into(pw->first, root, budget)) return false;
        for (unsigned i = 0; i < pw->second; ++i) out.insert(out.end(), root.begin(), root.end());
        return true;
    }
    const auto g = rho_split(n, budget);
    if (!g) return false;
    return factor_into(*g, out, budget) && factor_into(n / *g, out, budget);
}

}  // namespace big_detail

/// Complete factorization, or nullopt if the rho stage exhausts `budget`
/// iterations. Trial division covers every prime of the shared sieve.
inline std::optional<std::vector<BigPrimePower>> factorize_big(BigNatural n,
                                                              std::uint64_t budget = 50'000'000) {
    if (n < 1) throw std::domain_error("factorize_big: n must be positive");
    std::vector<BigPrimePower> out;
    for (natural p : shared_sieve().primes()) {
        if (BigNatural(p) * p > n) break;
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({BigNatural(p), e});
    }
    if (n > 1) {
        std::vector<BigNatural> rest;
        if (!big_detail::factor_into(n, rest, budget)) return std::nullopt;
        std::sort(rest.begin(), rest.end());
        for (std::size_t i = 0; i < rest.size();) {
            std::size_t j = i;
            while (j < rest.size() && rest[j] == rest[i]) ++j;
            out.push_back({rest[i], static_cast<unsigned>(j - i)});
            i = j;
        }
    }
    return out;
}

/// Natural logarithm of an arbitrary-precision value (double precision).
inline double log_big(const BigNatural& n) {
    const std::string digits = n.str();
    constexpr std::size_t kLead = 17;
    if (digits.size() <= kLead) return std::log(std::stod(digits));
    const double lead = std::stod(digits.substr(0, kLead));
    return std::log(lead) + static_cast<double>(digits.size() - kLead) * std::log(10.0);
}

}  // namespace carmex
