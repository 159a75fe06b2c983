#pragma once

// Text, JSON and plot-data rendering of a StatsReport.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "carmex/stats.hpp"

namespace carmex {

inline const std::vector<std::string>& table_names() {
    static const std::vector<std::string> names{"counts", "by-d",  "smallest",    "k",     "exponent", "residues",
                                                "primes", "least", "index",       "lehmer"};
    return names;
}

/// Accepts "all" or a comma list of table names or numbers 1..11.
inline std::set<std::string> parse_table_list(const std::string& list) {
    static const std::map<std::string, std::string> numbered{
        {"1", "counts"}, {"2", "by-d"},    {"3", "smallest"}, {"4", "smallest"}, {"5", "k"},      {"6", "exponent"},
        {"7", "residues"}, {"8", "primes"}, {"9", "least"},    {"10", "index"},   {"11", "lehmer"}};
    std::set<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "all") {
            out.insert(table_names().begin(), table_names().end());
        } else if (auto it = numbered.find(item); it != numbered.end()) {
            out.insert(it->second);
        } else if (std::find(table_names().begin(), table_names().end(), item) != table_names().end()) {
            out.insert(item);
        } else {
            throw std::invalid_argument("unknown table '" + item + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty table list");
    return out;
}

inline std::string join_primes(const std::vector<natural>& primes, const char* sep = " ") {
    std::string s;
    for (natural p : primes) {
        if (!s.empty()) s += sep;
        s += std::to_string(p);
    }
    return s;
}

inline void write_tsv(std::ostream& os, const StatsReport& rep, const std::set<std::string>& tables) {
    auto want = [&](const char* t) { return tables.count(t) != 0; };
    unsigned max_d = 3;
    for (const auto& [n, by_d] : rep.counts_by_d)
        for (const auto& [d, c] : by_d) max_d = std::max(max_d, d);

    if (want("counts")) {
        os << "# counts\nn\tC(10^n)\n";
        for (const auto& [n, c] : rep.counts) os << n << '\t' << c << '\n';
        os << '\n';
    }
    if (want("by-d")) {
        os << "# by-d\nn";
        for (unsigned d = 3; d <= max_d; ++d) os << '\t' << d;
        os << "\ttotal\n";
        for (const auto& [n, by_d] : rep.counts_by_d) {
            os << n;
            for (unsigned d = 3; d <= max_d; ++d) {
                auto it = by_d.find(d);
                os << '\t' << (it == by_d.end() ? 0 : it->second);
            }
            os << '\t' << rep.counts.at(n) << '\n';
        }
        os << '\n';
    }
    if (want("smallest")) {
        os << "# smallest\nd\tS_d\tratio\n";
        for (const auto& e : rep.sd_table) os << e.d << '\t' << e.n << '\t' << format_fixed(e.ratio, 9) << '\n';
        os << '\n';
    }
    if (want("k")) {
        os << "# k\nn\tk(10^n)\tC(10^n)/C(10^(n-1))\n";
        for (const auto& pt : rep.k_series) {
            os << pt.n << '\t' << format_fixed(pt.value, 5) << '\t';
            for (const auto& sw : rep.swift_series)
                if (sw.n == pt.n) os << format_fixed(sw.value, 3);
            os << '\n';
        }
        os << '\n';
    }
    if (want("exponent")) {
        os << "# exponent\nn\tlog C(10^n)/(n log 10)\n";
        for (const auto& pt : rep.exponent_series) os << pt.n << '\t' << format_fixed(pt.value, 5) << '\n';
        os << '\n';
    }
    if (want("residues")) {
        os << "# residues\nm\tc";
        for (natural x : rep.table_points) os << '\t' << x;
        os << '\n';
        for (const auto& [m, by_x] : rep.residue_tables) {
            for (natural c = 0; c < m; ++c) {
                os << m << '\t' << c;
                for (natural x : rep.table_points) os << '\t' << by_x.at(x)[c];
                os << '\n';
            }
        }
        os << '\n';
    }
    auto prime_table = [&](const char* name, const PrimeTable& t) {
        os << "# " << name << "\np";
        for (natural x : rep.table_points) os << '\t' << x;
        os << '\n';
        for (const auto& [p, by_x] : t) {
            os << p;
            for (natural x : rep.table_points) os << '\t' << by_x.at(x);
            os << '\n';
        }
        os << '\n';
    };
    if (want("primes")) prime_table("primes", rep.prime_div_table);
    if (want("least")) prime_table("least", rep.least_prime_table);
    if (want("index")) {
        os << "# index\ni\tN\tfactors\n";
        for (const auto& e : rep.index_entries)
            os << e.index << '\t' << e.record.n << '\t' << join_primes(e.record.primes) << '\n';
        os << '\n';
    }
    if (want("lehmer")) {
        os << "# lehmer\nl\tN\tfactors\n";
        for (const auto& e : rep.lehmer_entries)
            os << format_fixed(e.ratio.value(), 5) << '\t' << e.record.n << '\t' << join_primes(e.record.primes)
               << '\n';
        os << '\n';
    }
}

inline nlohmann::json to_json(const StatsReport& rep, const std::set<std::string>& tables) {
    using nlohmann::json;
    auto want = [&](const char* t) { return tables.count(t) != 0; };
    json out = json::array();
    auto table = [&](const char* name, json rows) {
        out.push_back({{"table", name}, {"limit", rep.limit}, {"rows", std::move(rows)}});
    };
    if (want("counts")) {
        json rows = json::array();
        for (const auto& [n, c] : rep.counts) rows.push_back({{"n", n}, {"count", c}});
        table("counts", rows);
    }
    if (want("by-d")) {
        json rows = json::array();
        for (const auto& [n, by_d] : rep.counts_by_d) {
            json per = json::object();
            for (const auto& [d, c] : by_d) per[std::to_string(d)] = c;
            rows.push_back({{"n", n}, {"by_d", per}, {"total", rep.counts.at(n)}});
        }
        table("by-d", rows);
    }
    if (want("smallest")) {
        json rows = json::array();
        for (const auto& e : rep.sd_table) rows.push_back({{"d", e.d}, {"n", e.n}, {"ratio", e.ratio}});
        table("smallest", rows);
    }
    if (want("k")) {
        json rows = json::array();
        for (const auto& pt : rep.k_series) {
            json row{{"n", pt.n}, {"k", pt.value}};
            for (const auto& sw : rep.swift_series)
                if (sw.n == pt.n) row["swift_ratio"] = sw.value;
            rows.push_back(row);
        }
        table("k", rows);
    }
    if (want("exponent")) {
        json rows = json::array();
        for (const auto& pt : rep.exponent_series) rows.push_back({{"n", pt.n}, {"exponent", pt.value}});
        table("exponent", rows);
    }
    if (want("residues")) {
        json rows = json::array();
        for (const auto& [m, by_x] : rep.residue_tables)
            for (const auto& [x, classes] : by_x) rows.push_back({{"modulus", m}, {"bound", x}, {"classes", classes}});
        table("residues", rows);
    }
    auto prime_rows = [&](const PrimeTable& t) {
        json rows = json::array();
        for (const auto& [p, by_x] : t)
            for (const auto& [x, c] : by_x) rows.push_back({{"p", p}, {"bound", x}, {"count", c}});
        return rows;
    };
    if (want("primes")) table("primes", prime_rows(rep.prime_div_table));
    if (want("least")) table("least", prime_rows(rep.least_prime_table));
    if (want("index")) {
        json rows = json::array();
        for (const auto& e : rep.index_entries)
            rows.push_back({{"index", e.index}, {"n", e.record.n}, {"factors", e.record.primes}});
        table("index", rows);
    }
    if (want("lehmer")) {
        json rows = json::array();
        for (const auto& e : rep.lehmer_entries)
            rows.push_back({{"numerator", e.ratio.num},
                            {"denominator", e.ratio.den},
                            {"value", e.ratio.value()},
                            {"n", e.record.n},
                            {"factors", e.record.primes}});
        table("lehmer", rows);
    }
    return out;
}

/// Writes k_series.tsv and exponent_series.tsv, two columns each.
inline void write_plot_files(const std::filesystem::path& dir, const StatsReport& rep) {
    std::filesystem::create_directories(dir);
    auto dump = [&](const char* name, const std::vector<SeriesPoint>& pts) {
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        for (const auto& pt : pts) os << pt.n << '\t' << format_fixed(pt.value, 5) << '\n';
    };
    dump("k_series.tsv", rep.k_series);
    dump("exponent_series.tsv", rep.exponent_series);
}

}  // namespace carmex
