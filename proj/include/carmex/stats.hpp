#pragma once

// Statistics over a complete, sorted list of Carmichael numbers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carmex/arith.hpp"
#include "carmex/bignum.hpp"
#include "carmex/carmichael.hpp"

namespace carmex {

class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decimal rendering at a fixed number of places; exact binary ties round
/// to even.
inline std::string format_fixed(double value, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, value);
    return buf;
}

inline natural pow10(int n) {
    natural v = 1;
    for (int i = 0; i < n; ++i) v *= 10;
    return v;
}

/// Exponents n >= 3 with 10^n <= limit.
inline std::vector<int> decades_up_to(natural limit) {
    std::vector<int> out;
    for (int n = 3; n <= 18 && pow10(n) <= limit; ++n) out.push_back(n);
    return out;
}

inline void require_sorted(const std::vector<CarmichaelRecord>& records) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].n <= records[i - 1].n)
            throw IntegrityError("records not sorted and deduplicated at N = " + std::to_string(records[i].n));
}

struct CountTables {
    std::map<int, natural> counts;                          // n -> C(10^n)
    std::map<int, std::map<unsigned, natural>> counts_by_d;  // n -> d -> C(d, 10^n)
};

inline CountTables count_tables(const std::vector<CarmichaelRecord>& records, natural limit) {
    require_sorted(records);
    CountTables t;
    for (int n : decades_up_to(limit)) {
        const natural x = pow10(n);
        auto& by_d = t.counts_by_d[n];
        natural c = 0;
        for (const auto& r : records) {
            if (r.n > x) break;
            ++c;
            ++by_d[static_cast<unsigned>(r.factor_count())];
        }
        t.counts[n] = c;
    }
    return t;
}

/// Count at an arbitrary bound (records sorted).
inline natural count_up_to(const std::vector<CarmichaelRecord>& records, natural x) {
    return static_cast<natural>(std::upper_bound(records.begin(), records.end(), x,
                                                 [](natural v, const CarmichaelRecord& r) { return v < r.n; }) -
                                records.begin());
}

/// k with C = X exp(-k ln X lnlnln X / lnln X), natural logarithms.
inline double k_of(long double x, natural c) {
    if (x < 16) throw std::domain_error("k_of: X must be at least 16");
    if (c < 1) throw std::domain_error("k_of: count must be positive");
    const long double lx = std::log(x), llx = std::log(lx), lllx = std::log(llx);
    return static_cast<double>((lx - std::log(static_cast<long double>(c))) * llx / (lx * lllx));
}

/// Inverse of k_of: the count implied by k at X.
inline double count_from_k(long double x, double k) {
    const long double lx = std::log(x), llx = std::log(lx), lllx = std::log(llx);
    return static_cast<double>(x * std::exp(-k * lx * lllx / llx));
}

inline double swift_ratio(natural c_n, natural c_prev) {
    if (c_prev == 0) throw std::domain_error("swift_ratio: zero denominator");
    return static_cast<double>(c_n) / static_cast<double>(c_prev);
}

/// ln C / ln X.
inline double exponent_of(long double x, natural c) {
    if (x <= 1) throw std::domain_error("exponent_of: X must exceed 1");
    if (c < 1) throw std::domain_error("exponent_of: count must be positive");
    return static_cast<double>(std::log(static_cast<long double>(c)) / std::log(x));
}

inline const std::vector<natural>& default_moduli() {
    static const std::vector<natural> m{5, 7, 11, 12};
    return m;
}

/// Tabulation bounds for the residue and prime-divisor tables.
inline std::vector<natural> divisor_table_points(natural limit) {
    std::vector<natural> pts;
    for (int n : decades_up_to(limit)) pts.push_back(pow10(n));
    constexpr natural kPsw = 25'000'000'000ULL;
    if (kPsw <= limit) pts.push_back(kPsw);
    std::sort(pts.begin(), pts.end());
    return pts;
}

/// modulus -> bound -> per-class counts.
using ResidueTables = std::map<natural, std::map<natural, std::vector<natural>>>;

inline ResidueTables residue_table(const std::vector<CarmichaelRecord>& records,
                                   const std::vector<natural>& moduli, const std::vector<natural>& points) {
    require_sorted(records);
    ResidueTables out;
    for (natural m : moduli) {
        if (m < 2) throw std::domain_error("residue_table: modulus must be at least 2");
        for (natural x : points) {
            std::vector<natural> classes(m, 0);
            for (const auto& r : records) {
                if (r.n > x) break;
                ++classes[r.n % m];
            }
            out[m][x] = std::move(classes);
        }
    }
    return out;
}

inline std::vector<natural> odd_primes_up_to(natural limit) {
    std::vector<natural> out;
    for (natural p = 3; p <= limit; p += 2)
        if (is_prime(p)) out.push_back(p);
    return out;
}

/// prime -> bound -> count.
using PrimeTable = std::map<natural, std::map<natural, natural>>;

struct PrimeTables {
    PrimeTable dividing;  // p | N
    PrimeTable least;     // p is the least prime of N
};

inline PrimeTables prime_tables(const std::vector<CarmichaelRecord>& records, const std::vector<natural>& primes,
                                const std::vector<natural>& points) {
    require_sorted(records);
    PrimeTables t;
    for (natural p : primes) {
        for (natural x : points) {
            natural div = 0, least = 0;
            for (const auto& r : records) {
                if (r.n > x) break;
                if (r.n % p == 0) ++div;
                if (r.smallest_prime() == p) ++least;
            }
            t.dividing[p][x] = div;
            t.least[p][x] = least;
        }
    }
    return t;
}

struct IndexEntry {
    natural index = 0;
    CarmichaelRecord record;
};

/// Records with index below cap, sorted by index then N.
inline std::vector<IndexEntry> index_report(const std::vector<CarmichaelRecord>& records, natural cap = 100) {
    std::vector<IndexEntry> out;
    for (const auto& r : records) {
        const natural i = index_of(r);
        if (i < cap) out.push_back({i, r});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.index < b.index || (a.index == b.index && a.record.n < b.record.n);
    });
    return out;
}

struct LehmerEntry {
    LehmerRatio ratio;
    CarmichaelRecord record;
};

/// Records with (N - 1) / phi(N) >= num / den, ascending by ratio.
inline std::vector<LehmerEntry> lehmer_report(const std::vector<CarmichaelRecord>& records, natural num = 2,
                                              natural den = 1) {
    std::vector<LehmerEntry> out;
    for (const auto& r : records) {
        const LehmerRatio l = lehmer_index(r);
        if (l.at_least(num, den)) out.push_back({l, r});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.ratio < b.ratio || (!(b.ratio < a.ratio) && a.record.n < b.record.n);
    });
    return out;
}

/// ln S_d / (2 ln 2 (d - 1) ln(d - 1)).
inline double sd_ratio(unsigned d, const BigNatural& s_d) {
    if (d <= 2) throw std::domain_error("sd_ratio: d must be at least 3");
    const double dm1 = static_cast<double>(d - 1);
    return log_big(s_d) / (2.0 * std::log(2.0) * dm1 * std::log(dm1));
}

/// The published smallest Carmichael numbers with d = 3..35 prime factors.
inline const std::vector<std::pair<unsigned, BigNatural>>& known_smallest() {
    static const std::vector<std::pair<unsigned, BigNatural>> table = [] {
        const char* values[] = {
            "561",
            "41041",
            "825265",
            "321197185",
            "5394826801",
            "232250619601",
            "9746347772161",
            "1436697831295441",
            "60977817398996785",
            "7156857700403137441",
            "1791562810662585767521",
            "87674969936234821377601",
            "6553130926752006031481761",
            "1590231231043178376951698401",
            "35237869211718889547310642241",
            "32809426840359564991177172754241",
            "2810864562635368426005268142616001",
            "349407515342287435050603204719587201",
            "125861887849639969847638681038680787361",
            "12758106140074522771498516740500829830401",
            "2333379336546216408131111533710540349903201",
            "294571791067375389885907239089503408618560001",
            "130912961974316767723865201454187955056178415601",
            "13513093081489380840188651246675032067011140079201",
            "7482895937713262392883306949172917048928068129206401",
            "1320340354477450170682291329830138947225695029536281601",
            "379382381447399527322618466130154668512652910714224209601",
            "70416887142533176417390411931483993124120785701395296424001",
            "2884167509593581480205474627684686008624483147814647841436801",
            "4754868377601046732119933839981363081972014948522510826417784001",
            "1334733877147062382486934807105197899496002201113849920496510541601",
            "260849323075371835669784094383812120359260783810157225730623388382401",
            "112505380450296606970338459629988782604252033209350010888227147338120001",
        };
        std::vector<std::pair<unsigned, BigNatural>> t;
        unsigned d = 3;
        for (const char* v : values) t.emplace_back(d++, BigNatural(v));
        return t;
    }();
    return table;
}

enum class VerifyStatus { pass, fail, inconclusive };

inline const char* to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::pass: return "pass";
        case VerifyStatus::fail: return "fail";
        case VerifyStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SmallestVerdict {
    unsigned d = 0;
    BigNatural n;
    VerifyStatus status = VerifyStatus::fail;
    std::string detail;
    std::vector<BigNatural> primes;
};

/// Checks each entry has exactly d distinct prime factors and satisfies
/// Korselt. Minimality is not checked here.
inline std::vector<SmallestVerdict> verify_table3(const std::vector<std::pair<unsigned, BigNatural>>& entries,
                                                  std::uint64_t rho_budget = 50'000'000) {
    std::vector<SmallestVerdict> out;
    for (const auto& [d, n] : entries) {
        SmallestVerdict v{d, n, VerifyStatus::fail, {}, {}};
        const auto f = factorize_big(n, rho_budget);
        if (!f) {
            v.status = VerifyStatus::inconclusive;
            v.detail = "factorization budget exhausted";
        } else {
            bool squarefree = true, korselt_ok = true;
            for (const auto& pp : *f) {
                v.primes.push_back(pp.prime);
                if (pp.exponent != 1) squarefree = false;
                if ((n - 1) % (pp.prime - 1) != 0) korselt_ok = false;
            }
            if (f->size() != d)
                v.detail = "has " + std::to_string(f->size()) + " prime factors";
            else if (!squarefree)
                v.detail = "not squarefree";
            else if (!korselt_ok)
                v.detail = "Korselt criterion fails";
            else
                v.status = VerifyStatus::pass;
        }
        out.push_back(std::move(v));
    }
    return out;
}

struct SeriesPoint {
    int n = 0;
    double value = 0;
};

struct PlotSeries {
    std::vector<SeriesPoint> k;         // (n, k(10^n))
    std::vector<SeriesPoint> exponent;  // (n, ln C(10^n) / ln 10^n)
};

inline PlotSeries plot_series(const std::map<int, natural>& counts) {
    PlotSeries s;
    for (const auto& [n, c] : counts) {
        if (c == 0) continue;
        const long double x = std::pow(10.0L, n);
        s.k.push_back({n, k_of(x, c)});
        s.exponent.push_back({n, exponent_of(x, c)});
    }
    return s;
}

struct SmallestEntry {
    unsigned d = 0;
    natural n = 0;
    double ratio = 0;
};

struct StatsReport {
    natural limit = 0;
    std::map<int, natural> counts;
    std::map<int, std::map<unsigned, natural>> counts_by_d;
    std::vector<SeriesPoint> k_series;
    std::vector<SeriesPoint> swift_series;
    std::vector<SeriesPoint> exponent_series;
    std::vector<natural> table_points;
    ResidueTables residue_tables;
    PrimeTable prime_div_table;
    PrimeTable least_prime_table;
    std::vector<IndexEntry> index_entries;
    std::vector<LehmerEntry> lehmer_entries;
    std::vector<SmallestEntry> sd_table;  // smallest record per d within the limit
};

/// Every statistic for records complete up to `limit`.
inline StatsReport build_report(const std::vector<CarmichaelRecord>& all_records, natural limit,
                                natural index_cap = 100) {
    require_sorted(all_records);
    std::vector<CarmichaelRecord> records;
    for (const auto& r : all_records)
        if (r.n <= limit) records.push_back(r);

    StatsReport rep;
    rep.limit = limit;
    auto ct = count_tables(records, limit);
    rep.counts = std::move(ct.counts);
    rep.counts_by_d = std::move(ct.counts_by_d);
    const auto series = plot_series(rep.counts);
    rep.k_series = series.k;
    for (const auto& pt : series.exponent)
        if (pt.n >= 4) rep.exponent_series.push_back(pt);
    for (const auto& [n, c] : rep.counts) {
        auto prev = rep.counts.find(n - 1);
        if (prev != rep.counts.end() && prev->second > 0) rep.swift_series.push_back({n, swift_ratio(c, prev->second)});
    }
    rep.table_points = divisor_table_points(limit);
    rep.residue_tables = residue_table(records, default_moduli(), rep.table_points);
    auto pt = prime_tables(records, odd_primes_up_to(97), rep.table_points);
    rep.prime_div_table = std::move(pt.dividing);
    rep.least_prime_table = std::move(pt.least);
    rep.index_entries = index_report(records, index_cap);
    rep.lehmer_entries = lehmer_report(records, 2, 1);
    std::map<unsigned, natural> smallest;
    for (const auto& r : records) smallest.emplace(static_cast<unsigned>(r.factor_count()), r.n);
    for (const auto& [d, n] : smallest) rep.sd_table.push_back({d, n, sd_ratio(d, BigNatural(n))});
    return rep;
}

/// The cross-sum invariants every report must satisfy; returns the
/// violations found (empty when consistent).
inline std::vector<std::string> check_invariants(const StatsReport& rep) {
    std::vector<std::string> bad;
    for (const auto& [n, c] : rep.counts) {
        natural sum = 0;
        for (const auto& [d, k] : rep.counts_by_d.at(n)) sum += k;
        if (sum != c) bad.push_back("sum over d != C(10^" + std::to_string(n) + ")");
    }
    for (const auto& [m, by_x] : rep.residue_tables) {
        for (const auto& [x, classes] : by_x) {
            natural sum = 0;
            for (natural c : classes) sum += c;
            const std::string at = " at " + std::to_string(x);
            // Tabulation points at powers of ten coincide with rep.counts.
            for (const auto& [n, c] : rep.counts)
                if (pow10(n) == x && sum != c) bad.push_back("classes mod " + std::to_string(m) + " do not sum to C" + at);
            if (m == 5 && classes[0] != rep.prime_div_table.at(5).at(x)) bad.push_back("mod 5 class 0 != #(5 | N)" + at);
            if (m == 12) {
                if (classes[3] + classes[9] != rep.prime_div_table.at(3).at(x)) bad.push_back("mod 12 classes 3+9 != #(3 | N)" + at);
                for (natural c = 0; c < 12; c += 2)
                    if (classes[c] != 0) bad.push_back("even class mod 12 nonzero" + at);
            }
        }
    }
    for (const auto& [p, by_x] : rep.least_prime_table) {
        for (const auto& [x, least] : by_x) {
            const natural div = rep.prime_div_table.at(p).at(x);
            if (least > div) bad.push_back("least count exceeds divisor count for p = " + std::to_string(p));
            if (p == 3 && least != div) bad.push_back("p = 3 least count differs from divisor count");
        }
    }
    return bad;
}

}  // namespace carmex
