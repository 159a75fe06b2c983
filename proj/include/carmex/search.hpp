#pragma once

// Depth-first enumeration of Carmichael numbers over ascending prime
// sequences p_1 < ... < p_r. A node carries the prefix product P and
// L = lcm(p_i - 1); every completion N = P * Q must satisfy
// Q == P^-1 (mod L). A node is closed in one of three ways:
//  - early termination: the progression of admissible Q up to X / P has at
//    most T terms, so each term is tested and factored directly;
//  - last-prime completion: p - 1 divides P - 1, so p ranges over the
//    divisors of P - 1 (one more factor);
//  - pair completion: the two remaining factors are determined by a bounded
//    search over two integer multipliers (exactly two more factors).
// Otherwise the node branches on the next prime.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmex/arith.hpp"
#include "carmex/carmichael.hpp"
#include "carmex/sieve.hpp"

namespace carmex {

inline constexpr unsigned kUnboundedFactors = 64;

/// Restricts a run to a subset of work units.
class UnitSelector {
public:
    /// Accepts "K/N" (every N-th unit starting at index K) or a comma list of
    /// leading-prime ranges such as "3-97,101".
    static UnitSelector parse(const std::string& spec) {
        UnitSelector sel;
        sel.spec_ = spec;
        if (const auto slash = spec.find('/'); slash != std::string::npos) {
            sel.modular_ = true;
            sel.slice_ = parse_number(spec.substr(0, slash));
            sel.slices_ = parse_number(spec.substr(slash + 1));
            if (sel.slices_ == 0 || sel.slice_ >= sel.slices_)
                throw std::invalid_argument("unit selector: bad slice '" + spec + "'");
            return sel;
        }
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto dash = item.find('-');
            natural lo = 0, hi = 0;
            if (dash == std::string::npos) {
                lo = hi = parse_number(item);
            } else {
                lo = parse_number(item.substr(0, dash));
                hi = parse_number(item.substr(dash + 1));
            }
            if (hi < lo) throw std::invalid_argument("unit selector: empty range '" + item + "'");
            sel.ranges_.push_back({lo, hi});
        }
        if (sel.ranges_.empty()) throw std::invalid_argument("unit selector: empty spec");
        return sel;
    }

    bool selects(std::size_t unit_index, natural leading_prime) const noexcept {
        if (modular_) return unit_index % slices_ == slice_;
        return std::any_of(ranges_.begin(), ranges_.end(), [&](const auto& r) {
            return leading_prime >= r.first && leading_prime <= r.second;
        });
    }

    const std::string& spec() const noexcept { return spec_; }

private:
    static natural parse_number(const std::string& s) {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("unit selector: bad number '" + s + "'");
        return v;
    }

    std::string spec_;
    bool modular_ = false;
    natural slice_ = 0, slices_ = 1;
    std::vector<std::pair<natural, natural>> ranges_;
};

struct SearchConfig {
    natural limit = 1'000'000'000;            // X
    unsigned d_min = 3;
    unsigned d_max = kUnboundedFactors;
    natural early_term_threshold = 64;        // T
    natural split = 0;                        // B; 0 means min(10^4, floor(sqrt X))
    double pair_budget = 2e6;                 // max estimated pair-search steps per node
    std::optional<UnitSelector> partition;

    natural effective_split() const noexcept {
        return split != 0 ? split : std::min<natural>(10'000, isqrt(limit));
    }

    void validate() const {
        if (limit < 561) throw std::invalid_argument("search: limit must be at least 561");
        if (limit > kWorkingLimit) throw std::invalid_argument("search: limit exceeds 10^18");
        if (early_term_threshold < 1) throw std::invalid_argument("search: threshold must be >= 1");
        if (d_min < 3 || d_max < d_min) throw std::invalid_argument("search: bad factor-count range");
        if (effective_split() > isqrt(limit))
            throw std::invalid_argument("search: split exceeds floor(sqrt(limit))");
        if (effective_split() < 3) throw std::invalid_argument("search: split must be at least 3");
    }

    /// Canonical text of every field that affects output.
    std::string canonical() const {
        std::ostringstream os;
        os << "limit=" << limit << ";d_min=" << d_min << ";d_max=" << d_max
           << ";split=" << effective_split()
           << ";units=" << (partition ? partition->spec() : std::string("all"));
        return os.str();
    }
};

/// Ascending prime prefix with cached product and lcm of p - 1.
struct PrefixState {
    std::vector<natural> primes;
    natural product = 1;  // P
    natural lambda = 1;   // L

    std::size_t size() const noexcept { return primes.size(); }
    natural last() const noexcept { return primes.empty() ? 2 : primes.back(); }
};

namespace search_detail {

inline bool emit_checked(std::vector<CarmichaelRecord>& out, natural n, std::vector<natural> primes) {
    if (!korselt(n, primes))
        throw std::logic_error("search emitted a non-Carmichael number: " + std::to_string(n));
    out.push_back({n, std::move(primes)});
    return true;
}

/// Smallest Q > after with Q == residue (mod modulus), as a 128-bit value.
inline u128 first_in_class(natural after, natural residue, natural modulus) {
    const natural base = after - after % modulus + residue;
    return base > after ? u128(base) : u128(base) + modulus;
}

}  // namespace search_detail

/// Appends p to s; rejects the branch when the gcd condition fails, the lcm
/// passes the limit, or no admissible completion fits below the limit.
inline std::optional<PrefixState> extend(const PrefixState& s, natural p, const SearchConfig& cfg) {
    if (p <= s.last() || p < 3) throw std::invalid_argument("extend: primes must ascend from 3");
    const natural X = cfg.limit;
    if (static_cast<u128>(s.product) * p > X) return std::nullopt;
    PrefixState t = s;
    t.primes.push_back(p);
    t.product = s.product * p;
    const auto l = lcm(s.lambda, p - 1, X - 1);
    if (!l) return std::nullopt;
    t.lambda = *l;
    if (gcd(t.product, t.lambda) != 1) return std::nullopt;

    const auto r = t.size();
    const unsigned need = cfg.d_min > r + 1 ? static_cast<unsigned>(cfg.d_min - r) : 1u;
    // Product of the next `k` primes above p, saturating past X.
    auto next_primes_product = [&](unsigned k) {
        u128 prod = t.product;
        natural q = p;
        for (unsigned i = 0; i < k && prod <= X; ++i) {
            do ++q; while (!is_prime(q));
            prod *= q;
        }
        return prod;
    };
    if (need >= 2) {
        if (next_primes_product(need) > X) return std::nullopt;
        return t;
    }
    if (next_primes_product(2) <= X) return t;
    // Only a single further prime can fit: it must satisfy q - 1 | P - 1.
    if (next_primes_product(1) > X) return std::nullopt;
    const natural residue = *inv_mod(t.product % t.lambda, t.lambda);
    for (natural e : divisors(factorize(t.product - 1))) {
        const natural q = e + 1;
        if (q <= p) continue;
        if (static_cast<u128>(t.product) * q > X) break;
        if (q % t.lambda == residue % t.lambda && is_prime(q)) return t;
    }
    return std::nullopt;
}

/// One-prime completions of a prefix with at least two primes.
inline std::vector<CarmichaelRecord> complete_last_prime(const PrefixState& s, natural limit,
                                                         natural max_prime = ~natural{0}) {
    if (s.size() < 2) throw std::invalid_argument("complete_last_prime: prefix needs two primes");
    if (gcd(s.product, s.lambda) != 1) throw std::invalid_argument("complete_last_prime: gcd(P, L) != 1");
    std::vector<CarmichaelRecord> out;
    const natural P = s.product, L = s.lambda;
    const natural residue = *inv_mod(P % L, L);
    const natural hi = std::min(max_prime, limit / P);
    for (natural e : divisors(factorize(P - 1))) {
        const natural p = e + 1;
        if (p <= s.last()) continue;
        if (p > hi) break;
        if (p % L != residue || !is_prime(p)) continue;
        auto primes = s.primes;
        primes.push_back(p);
        search_detail::emit_checked(out, P * p, std::move(primes));
    }
    return out;
}

/// Statistics of one pair-completion call, for bound assertions.
struct PairLoopStats {
    natural outer_iterations = 0;
    natural inner_iterations = 0;
};

/// Every N = P * q * r <= limit with primes last < q < r, via the multipliers
/// A = (P r - 1) / (q - 1) and B = (P q - 1) / (r - 1). For fixed B the
/// implied q = (P (B - 1) + B (A - 1)) / (A B - P^2) decreases with A, so
/// q > last bounds A from above and N <= limit bounds it from below.
inline std::vector<CarmichaelRecord> complete_pair(const PrefixState& s, natural limit,
                                                   natural max_prime = ~natural{0},
                                                   PairLoopStats* stats = nullptr) {
    if (s.size() < 1) throw std::invalid_argument("complete_pair: prefix must be nonempty");
    if (gcd(s.product, s.lambda) != 1) throw std::invalid_argument("complete_pair: gcd(P, L) != 1");
    std::vector<CarmichaelRecord> out;
    const natural P = s.product, L = s.lambda;
    const natural last = s.last();
    const u128 P2 = static_cast<u128>(P) * P;
    const u128 qmin = last + 1;  // q > last
    for (natural B = 1; B < P; ++B) {
        // q <= qmax from N >= P^2 q^2 / B.
        const long double qmax_f = std::sqrt(static_cast<long double>(limit) * B) / P;
        if (qmax_f < static_cast<long double>(qmin)) continue;
        const u128 qmax = static_cast<u128>(qmax_f) + 1;
        if (stats) ++stats->outer_iterations;
        // q(A) >= qmin  <=>  A <= (P (B - 1) - B + qmin P^2) / (B (qmin - 1))
        const u128 a_max = (static_cast<u128>(P) * (B - 1) - B + qmin * P2) / (static_cast<u128>(B) * (qmin - 1));
        // q(A) <= qmax  <=>  A >= (P (B - 1) - B + qmax P^2) / (B (qmax - 1))
        const u128 lo_num = static_cast<u128>(P) * (B - 1) - B + qmax * P2;
        const u128 lo_den = static_cast<u128>(B) * (qmax - 1);
        u128 a_lo = (lo_num + lo_den - 1) / lo_den;
        a_lo = std::max(a_lo, P2 / B + 1);  // A B > P^2
        for (u128 A = a_lo; A <= a_max; ++A) {
            if (stats) ++stats->inner_iterations;
            const u128 den = A * B - P2;
            const u128 num = static_cast<u128>(P) * (B - 1) + B * (A - 1);
            if (num % den != 0) continue;
            const u128 q = num / den;
            if (q <= last) continue;
            const u128 pq1 = static_cast<u128>(P) * q - 1;
            if (pq1 % B != 0) continue;
            const u128 r = pq1 / B + 1;
            if (r <= q || r > max_prime) continue;
            const u128 n = static_cast<u128>(P) * q * r;
            if (n > limit) continue;
            if ((n - 1) % L != 0) continue;
            if (!is_prime(static_cast<natural>(q)) || !is_prime(static_cast<natural>(r))) continue;
            auto primes = s.primes;
            primes.push_back(static_cast<natural>(q));
            primes.push_back(static_cast<natural>(r));
            search_detail::emit_checked(out, static_cast<natural>(n), std::move(primes));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of Q == P^-1 (mod L) with last < Q <= limit / P.
inline natural progression_size(const PrefixState& s, natural limit) {
    const natural qmax = limit / s.product;
    if (qmax <= s.last()) return 0;
    const natural residue = *inv_mod(s.product % s.lambda, s.lambda);
    const u128 first = search_detail::first_in_class(s.last(), residue, s.lambda);
    if (first > qmax) return 0;
    return static_cast<natural>((qmax - first) / s.lambda) + 1;
}

/// Tests every cofactor Q in the progression directly.
inline std::vector<CarmichaelRecord> early_terminate(const PrefixState& s, natural limit,
                                                     unsigned d_min = 3,
                                                     unsigned d_max = kUnboundedFactors,
                                                     natural max_prime = ~natural{0}) {
    if (s.size() < 1) throw std::invalid_argument("early_terminate: prefix must be nonempty");
    std::vector<CarmichaelRecord> out;
    const natural P = s.product, L = s.lambda;
    const natural qmax = limit / P;
    if (qmax <= s.last()) return out;
    const natural residue = *inv_mod(P % L, L);
    const u128 first = search_detail::first_in_class(s.last(), residue, L);
    for (u128 q128 = first; q128 <= qmax; q128 += L) {
        const natural Q = static_cast<natural>(q128);
        const natural n = P * Q;
        if (!fermat_base2(n)) continue;
        const Factorization f = factorize(Q);
        const unsigned d = static_cast<unsigned>(s.size() + f.size());
        if (d < d_min || d > d_max || !f.squarefree()) continue;
        if (f[0].prime <= s.last() || f.factors().back().prime > max_prime) continue;
        bool ok = true;
        for (const auto& pp : f)
            if ((n - 1) % (pp.prime - 1) != 0) { ok = false; break; }
        if (!ok) continue;
        auto primes = s.primes;
        for (const auto& pp : f) primes.push_back(pp.prime);
        search_detail::emit_checked(out, n, std::move(primes));
    }
    return out;
}

/// A disjoint slice of the search tree keyed by its leading primes.
struct WorkUnit {
    std::vector<natural> prefix;  // one or two primes

    std::string id() const {
        std::string s;
        for (natural p : prefix) {
            if (!s.empty()) s += '.';
            s += std::to_string(p);
        }
        return s;
    }
};

/// The tree walk restricted to primes <= the split bound.
class Searcher {
public:
    explicit Searcher(SearchConfig cfg) : cfg_(std::move(cfg)) {
        cfg_.validate();
        split_ = cfg_.effective_split();
        primes_ = primes_in(2, split_);
    }

    const SearchConfig& config() const noexcept { return cfg_; }
    natural split() const noexcept { return split_; }

    /// Leading-prime units, ascending; a unit is (p1) when the node of p1 is
    /// closed without branching, otherwise (p1, p2) for each admissible p2.
    std::vector<WorkUnit> plan_units() const {
        std::vector<WorkUnit> units;
        for (std::size_t i = first_index_above(2); i < primes_.size(); ++i) {
            const natural p1 = primes_[i];
            if (!child_fits(PrefixState{}, i)) break;
            const auto s = root_child(p1);
            if (closes_without_branching(s)) {
                units.push_back({{p1}});
                continue;
            }
            for (std::size_t j = i + 1; j < primes_.size(); ++j) {
                if (!child_fits(s, j)) break;
                if (auto t = extend_fast(s, primes_[j])) units.push_back({{p1, primes_[j]}});
            }
        }
        return units;
    }

    std::vector<CarmichaelRecord> run_unit(const WorkUnit& unit) const {
        std::vector<CarmichaelRecord> out;
        PrefixState s = root_child(unit.prefix.at(0));
        if (unit.prefix.size() == 2) {
            auto t = extend_fast(s, unit.prefix[1]);
            if (!t) return out;
            s = std::move(*t);
        }
        visit(s, out);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Runs every selected unit sequentially.
    std::vector<CarmichaelRecord> run_all() const {
        std::vector<CarmichaelRecord> out;
        const auto units = plan_units();
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (cfg_.partition && !cfg_.partition->selects(i, units[i].prefix[0])) continue;
            auto part = run_unit(units[i]);
            out.insert(out.end(), part.begin(), part.end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void visit(const PrefixState& s, std::vector<CarmichaelRecord>& out) const {
        const std::size_t r = s.size();
        if (progression_size(s, cfg_.limit) <= cfg_.early_term_threshold) {
            auto part = early_terminate(s, cfg_.limit, cfg_.d_min, cfg_.d_max, split_);
            out.insert(out.end(), part.begin(), part.end());
            return;
        }
        if (r >= 2 && r + 1 >= cfg_.d_min && r + 1 <= cfg_.d_max) {
            auto part = complete_last_prime(s, cfg_.limit, split_);
            out.insert(out.end(), part.begin(), part.end());
        }
        if (r + 2 > cfg_.d_max) return;
        if (use_pair(s)) {
            auto part = complete_pair(s, cfg_.limit, split_);
            out.insert(out.end(), part.begin(), part.end());
            return;
        }
        for (std::size_t j = first_index_above(s.last()); j < primes_.size(); ++j) {
            if (!child_fits(s, j)) break;
            if (auto t = extend_fast(s, primes_[j])) visit(*t, out);
        }
    }

    bool use_pair(const PrefixState& s) const {
        if (cfg_.d_max != s.size() + 2) return false;
        const double P = static_cast<double>(s.product);
        const double steps = P * P * std::log(P + 1) / static_cast<double>(s.last());
        return steps <= cfg_.pair_budget;
    }

private:
    PrefixState root_child(natural p1) const {
        return PrefixState{{p1}, p1, p1 - 1};
    }

    bool closes_without_branching(const PrefixState& s) const {
        return progression_size(s, cfg_.limit) <= cfg_.early_term_threshold || s.size() + 2 > cfg_.d_max ||
               use_pair(s);
    }

    std::size_t first_index_above(natural p) const {
        return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), p) - primes_.begin());
    }

    // A child at primes_[j] still leaves room for the completions it owns:
    // at least max(d_min - r - 1, 1) further primes, all <= split.
    bool child_fits(const PrefixState& s, std::size_t j) const {
        const std::size_t r = s.size() + 1;
        const std::size_t need = cfg_.d_min > r + 1 ? cfg_.d_min - r : 1;
        if (j + need >= primes_.size()) return false;
        u128 prod = static_cast<u128>(s.product) * primes_[j];
        for (std::size_t k = 1; k <= need && prod <= cfg_.limit; ++k) prod *= primes_[j + k];
        return prod <= cfg_.limit;
    }

    std::optional<PrefixState> extend_fast(const PrefixState& s, natural p) const {
        const natural P = s.product * p;
        if (s.lambda % p == 0 || gcd(s.product, p - 1) != 1) return std::nullopt;
        const auto l = lcm(s.lambda, p - 1, cfg_.limit - 1);
        if (!l) return std::nullopt;
        PrefixState t;
        t.primes = s.primes;
        t.primes.push_back(p);
        t.product = P;
        t.lambda = *l;
        return t;
    }

    SearchConfig cfg_;
    natural split_ = 0;
    std::vector<natural> primes_;
};

/// Every Carmichael N <= X whose prime factors are all <= the split bound.
inline std::vector<CarmichaelRecord> enumerate_all(const SearchConfig& cfg) {
    return Searcher(cfg).run_all();
}

/// Complete list of three-factor Carmichael numbers up to the limit.
inline std::vector<CarmichaelRecord> enumerate_d3(natural limit) {
    std::vector<CarmichaelRecord> out;
    const natural top = icbrt(limit);
    for (natural p1 : primes_in(2, top)) {
        if (p1 < 3) continue;
        PrefixState s{{p1}, p1, p1 - 1};
        auto part = complete_pair(s, limit);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Smallest Carmichael number with exactly d prime factors, searched under
/// doubling bounds up to cap.
inline std::optional<natural> smallest_with_d(unsigned d, natural cap) {
    if (d < 3) throw std::invalid_argument("smallest_with_d: d must be at least 3");
    natural bound = 561;
    for (;;) {
        const natural x = std::min(bound, cap);
        if (x >= 561) {
            SearchConfig cfg;
            cfg.limit = x;
            cfg.d_min = cfg.d_max = d;
            cfg.split = isqrt(x);
            const auto found = enumerate_all(cfg);
            if (!found.empty()) return found.front().n;
        }
        if (x == cap) return std::nullopt;
        bound = bound > cap / 2 ? cap : bound * 2;
    }
}

}  // namespace carmex
