#pragma once

// Line-oriented result files and checkpoints.
//
//   # carmichael-v1
//   # limit 100000
//   # strategy enumerate
//   # unit all
//   561 3 11 17
//
// Body lines are "N p_1 ... p_d", strictly ascending by N.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "carmex/arith.hpp"
#include "carmex/carmichael.hpp"

namespace carmex {

inline constexpr const char* kFormatVersion = "carmichael-v1";

class StoreError : public std::runtime_error {
public:
    StoreError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct ResultMeta {
    std::string format_version = kFormatVersion;
    natural limit = 0;
    std::string strategy = "enumerate";
    std::string unit = "all";
    friend bool operator==(const ResultMeta&, const ResultMeta&) = default;
};

struct ResultFile {
    ResultMeta meta;
    std::vector<CarmichaelRecord> records;
    friend bool operator==(const ResultFile&, const ResultFile&) = default;
};

inline std::string format_record(const CarmichaelRecord& r) {
    std::string s = std::to_string(r.n);
    for (natural p : r.primes) {
        s += ' ';
        s += std::to_string(p);
    }
    return s;
}

namespace store_detail {

inline natural parse_natural(const std::string& tok, std::size_t line) {
    if (tok.empty() || tok.size() > 20 ||
        !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw StoreError("malformed number '" + tok + "'", line);
    u128 v = 0;
    for (char c : tok) v = v * 10 + static_cast<unsigned>(c - '0');
    if (v > ~natural{0}) throw StoreError("number out of range '" + tok + "'", line);
    return static_cast<natural>(v);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace store_detail

/// Parses and checks one body line: ascending primes whose product is N,
/// and (unless `verify` is off) primality of each factor plus Korselt.
inline CarmichaelRecord parse_record(const std::string& text, std::size_t line, bool verify = true) {
    const auto toks = store_detail::split_ws(text);
    if (toks.size() < 2) throw StoreError("expected 'N p_1 ... p_d'", line);
    CarmichaelRecord r;
    r.n = store_detail::parse_natural(toks[0], line);
    u128 product = 1;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        const natural p = store_detail::parse_natural(toks[i], line);
        if (!r.primes.empty() && p <= r.primes.back()) {
            if (p == r.primes.back()) throw StoreError("repeated prime " + toks[i] + " (not squarefree)", line);
            throw StoreError("factors not ascending", line);
        }
        r.primes.push_back(p);
        product *= p;
        if (product > ~natural{0}) throw StoreError("factor product overflows", line);
    }
    if (product != r.n) throw StoreError("factors do not multiply to " + toks[0], line);
    if (verify) {
        for (natural p : r.primes)
            if (!is_prime(p)) throw StoreError("factor " + std::to_string(p) + " is not prime", line);
        if (!korselt(r.n, r.primes)) throw StoreError("Korselt criterion fails for " + toks[0], line);
    }
    return r;
}

inline void write(std::ostream& os, const ResultFile& file) {
    const auto& m = file.meta;
    os << "# " << m.format_version << '\n'
       << "# limit " << m.limit << '\n'
       << "# strategy " << m.strategy << '\n'
       << "# unit " << m.unit << '\n';
    natural prev = 0;
    for (const auto& r : file.records) {
        if (r.n <= prev) throw StoreError("records must be strictly ascending");
        prev = r.n;
        os << format_record(r) << '\n';
    }
}

inline ResultFile read(std::istream& is, bool verify = true) {
    ResultFile file;
    std::string text;
    std::size_t line = 0;
    int header_seen = 0;
    natural prev = 0;
    while (std::getline(is, text)) {
        ++line;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty()) continue;
        if (text[0] == '#') {
            if (!file.records.empty()) throw StoreError("header line after body", line);
            const auto toks = store_detail::split_ws(text.substr(1));
            if (header_seen == 0) {
                if (toks.size() != 1 || toks[0] != kFormatVersion)
                    throw StoreError("unsupported format (expected '# " + std::string(kFormatVersion) + "')", line);
                file.meta.format_version = toks[0];
            } else if (toks.size() == 2 && toks[0] == "limit") {
                file.meta.limit = store_detail::parse_natural(toks[1], line);
            } else if (toks.size() == 2 && toks[0] == "strategy") {
                file.meta.strategy = toks[1];
            } else if (toks.size() == 2 && toks[0] == "unit") {
                file.meta.unit = toks[1];
            } else {
                throw StoreError("unknown header line", line);
            }
            ++header_seen;
            continue;
        }
        if (header_seen == 0) throw StoreError("missing format header", line);
        auto r = parse_record(text, line, verify);
        if (r.n <= prev) throw StoreError("records not strictly ascending", line);
        if (file.meta.limit != 0 && r.n > file.meta.limit) throw StoreError("record exceeds file limit", line);
        prev = r.n;
        file.records.push_back(std::move(r));
    }
    if (header_seen == 0) throw StoreError("empty file");
    return file;
}

inline void write_file(const std::filesystem::path& path, const ResultFile& file) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw StoreError("cannot open " + tmp + " for writing");
        write(os, file);
        if (!os.flush()) throw StoreError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline ResultFile read_file(const std::filesystem::path& path, bool verify = true) {
    std::ifstream is(path);
    if (!is) throw StoreError("cannot open " + path.string());
    try {
        return read(is, verify);
    } catch (const StoreError& e) {
        throw StoreError(path.string() + ": " + e.what());
    }
}

/// Sorts and collapses duplicate records. Duplicates must agree on factors.
inline std::vector<CarmichaelRecord> merge_records(std::vector<CarmichaelRecord> records) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.n < b.n || (a.n == b.n && a.primes < b.primes);
    });
    std::vector<CarmichaelRecord> out;
    out.reserve(records.size());
    for (auto& r : records) {
        if (!out.empty() && out.back().n == r.n) {
            if (out.back().primes != r.primes)
                throw StoreError("conflicting factorizations for " + std::to_string(r.n));
            continue;
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline ResultFile merge(const std::vector<ResultFile>& files) {
    if (files.empty()) throw StoreError("merge: no input files");
    ResultFile out;
    out.meta.format_version = files.front().meta.format_version;
    out.meta.limit = files.front().meta.limit;
    std::vector<CarmichaelRecord> all;
    bool same_strategy = true, same_unit = true;
    for (const auto& f : files) {
        if (f.meta.format_version != out.meta.format_version) throw StoreError("merge: format versions differ");
        if (f.meta.limit != out.meta.limit) throw StoreError("merge: limits differ");
        same_strategy = same_strategy && f.meta.strategy == files.front().meta.strategy;
        same_unit = same_unit && f.meta.unit == files.front().meta.unit;
        all.insert(all.end(), f.records.begin(), f.records.end());
    }
    out.meta.strategy = same_strategy ? files.front().meta.strategy : "merge";
    out.meta.unit = same_unit ? files.front().meta.unit : "all";
    out.records = merge_records(std::move(all));
    return out;
}

/// 64-bit FNV-1a; stable across platforms, used for config fingerprints.
inline std::uint64_t fnv1a(const std::string& s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string fingerprint_hex(const std::string& canonical_config) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canonical_config);
    return os.str();
}

class FingerprintMismatch : public StoreError {
public:
    using StoreError::StoreError;
};

/// Append-only log of completed work units and their records.
///
///   # carmichael-v1 checkpoint
///   # fingerprint 0123456789abcdef
///   # config limit=...;...
///   unit 3.5 1
///   62745 3 5 47 89
///   end 3.5
///
/// A unit counts as complete only once its "end" line is present; torn
/// trailing blocks are dropped when the checkpoint is reopened.
class Checkpoint {
public:
    Checkpoint(std::filesystem::path path, const std::string& canonical_config)
        : path_(std::move(path)), canonical_(canonical_config), fingerprint_(fingerprint_hex(canonical_config)) {
        if (std::filesystem::exists(path_)) load();
        rewrite();
    }

    const std::string& fingerprint() const noexcept { return fingerprint_; }
    bool completed(const std::string& unit) const {
        std::lock_guard lock(mu_);
        return done_.count(unit) != 0;
    }
    std::size_t completed_count() const {
        std::lock_guard lock(mu_);
        return done_.size();
    }
    std::vector<CarmichaelRecord> records_of(const std::string& unit) const {
        std::lock_guard lock(mu_);
        auto it = done_.find(unit);
        return it == done_.end() ? std::vector<CarmichaelRecord>{} : it->second;
    }

    void commit(const std::string& unit, const std::vector<CarmichaelRecord>& records) {
        std::ostringstream block;
        block << "unit " << unit << ' ' << records.size() << '\n';
        for (const auto& r : records) block << format_record(r) << '\n';
        block << "end " << unit << '\n';
        std::lock_guard lock(mu_);
        out_ << block.str();
        out_.flush();
        if (!out_) throw StoreError("checkpoint write failed: " + path_.string());
        done_[unit] = records;
    }

private:
    void load() {
        std::ifstream is(path_);
        if (!is) throw StoreError("cannot open checkpoint " + path_.string());
        std::string text;
        std::size_t line = 0;
        std::string found_fp;
        std::string current;
        std::size_t expected = 0;
        bool in_block = false, torn = false;
        std::vector<CarmichaelRecord> pending;
        while (std::getline(is, text)) {
            ++line;
            if (text.rfind("# fingerprint ", 0) == 0) {
                found_fp = text.substr(14);
                continue;
            }
            if (text.empty() || text[0] == '#') continue;
            const auto toks = store_detail::split_ws(text);
            if (toks.size() == 3 && toks[0] == "unit") {
                in_block = true;
                torn = false;
                current = toks[1];
                pending.clear();
                try {
                    expected = store_detail::parse_natural(toks[2], line);
                } catch (const StoreError&) {
                    torn = true;
                }
            } else if (toks.size() == 2 && toks[0] == "end") {
                if (in_block && !torn && toks[1] == current && pending.size() == expected)
                    done_[current] = pending;
                in_block = false;
            } else if (in_block) {
                try {
                    pending.push_back(parse_record(text, line));
                } catch (const StoreError&) {
                    torn = true;
                }
            }
        }
        if (found_fp.empty()) throw StoreError("checkpoint " + path_.string() + " has no fingerprint");
        if (found_fp != fingerprint_)
            throw FingerprintMismatch("checkpoint " + path_.string() + " was written for a different configuration (" +
                                      found_fp + " != " + fingerprint_ + "); refusing to resume");
    }

    // Compacts the log to its complete blocks, then reopens it for appending.
    void rewrite() {
        const auto tmp = path_.string() + ".tmp";
        {
            std::ofstream os(tmp, std::ios::trunc);
            if (!os) throw StoreError("cannot write checkpoint " + tmp);
            os << "# " << kFormatVersion << " checkpoint\n"
               << "# fingerprint " << fingerprint_ << '\n'
               << "# config " << canonical_ << '\n';
            for (const auto& [unit, records] : done_) {
                os << "unit " << unit << ' ' << records.size() << '\n';
                for (const auto& r : records) os << format_record(r) << '\n';
                os << "end " << unit << '\n';
            }
        }
        std::filesystem::rename(tmp, path_);
        out_.open(path_, std::ios::app);
        if (!out_) throw StoreError("cannot append to checkpoint " + path_.string());
    }

    std::filesystem::path path_;
    std::string canonical_;
    std::string fingerprint_;
    mutable std::mutex mu_;
    std::map<std::string, std::vector<CarmichaelRecord>> done_;
    std::ofstream out_;
};

}  // namespace carmex
