// carmex: enumeration, verification and statistics for Carmichael numbers.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "carmex/carmichael.hpp"
#include "carmex/driver.hpp"
#include "carmex/largeprime.hpp"
#include "carmex/number_text.hpp"
#include "carmex/report.hpp"
#include "carmex/search.hpp"
#include "carmex/stats.hpp"
#include "carmex/store.hpp"

namespace {

using namespace carmex;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

natural parse_flag(const std::string& name, const std::string& text) {
    try {
        return parse_exact_natural(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError("--" + name + ": " + e.what());
    }
}

void emit(const ResultFile& file, const std::string& out) {
    if (out.empty() || out == "-") {
        write(std::cout, file);
    } else {
        write_file(out, file);
        std::cerr << file.records.size() << " records written to " << out << '\n';
    }
}

std::string describe_factors(const Factorization& f) {
    std::string s;
    for (const auto& pp : f) {
        if (!s.empty()) s += ' ';
        s += std::to_string(pp.prime);
        if (pp.exponent > 1) s += "^" + std::to_string(pp.exponent);
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact enumeration and statistics of Carmichael numbers"};
    app.require_subcommand(1);

    // enumerate
    auto* enumerate = app.add_subcommand("enumerate", "tree search plus large-prime scan up to a limit");
    std::string e_limit = "1e9", e_split, e_threshold = "64", e_units, e_out, e_checkpoint;
    unsigned e_dmin = 3, e_dmax = kUnboundedFactors, e_threads = default_thread_count();
    bool e_no_scan = false;
    enumerate->add_option("--limit", e_limit, "bound X (accepts 1e12, 10^12, 1_000)");
    enumerate->add_option("--split", e_split, "largest prime handled by the tree search (default min(1e4, sqrt X))");
    enumerate->add_option("--d-min", e_dmin, "minimum number of prime factors");
    enumerate->add_option("--d-max", e_dmax, "maximum number of prime factors");
    enumerate->add_option("--threshold", e_threshold, "early-termination progression size");
    enumerate->add_option("--units", e_units, "restrict to units: 'K/N' slice or leading-prime ranges '3-97,101'");
    enumerate->add_option("--threads", e_threads, "worker threads");
    enumerate->add_option("--out", e_out, "output file (default stdout)");
    enumerate->add_option("--checkpoint", e_checkpoint, "checkpoint file for resumable runs");
    enumerate->add_flag("--no-scan", e_no_scan, "skip the large-prime scan (tree-search results only)");

    auto* d3 = app.add_subcommand("enumerate-d3", "all three-factor Carmichael numbers via pair completion");
    std::string d3_limit, d3_out;
    d3->add_option("--limit", d3_limit)->required();
    d3->add_option("--out", d3_out);

    auto* scan_cmd = app.add_subcommand("scan", "large-prime scan over largest primes in (p-lo, p-hi]");
    std::string s_lo, s_hi, s_limit, s_out;
    unsigned s_threads = default_thread_count();
    scan_cmd->add_option("--p-lo", s_lo)->required();
    scan_cmd->add_option("--p-hi", s_hi)->required();
    scan_cmd->add_option("--limit", s_limit)->required();
    scan_cmd->add_option("--threads", s_threads);
    scan_cmd->add_option("--out", s_out);

    auto* verify_cmd = app.add_subcommand("verify", "re-check every record of a result file");
    std::string v_file;
    bool v_known = false;
    verify_cmd->add_option("file", v_file, "result file");
    verify_cmd->add_flag("--known-smallest", v_known, "verify the built-in smallest-with-d table (d = 3..35)");

    auto* check = app.add_subcommand("check", "factor n and report Korselt, index and Lehmer index");
    std::string c_n;
    check->add_option("n", c_n)->required();

    auto* stats_cmd = app.add_subcommand("stats", "statistics tables from a complete result file");
    std::string st_in, st_limit, st_tables = "all", st_plots, st_json, st_cap = "100";
    stats_cmd->add_option("--in", st_in)->required();
    stats_cmd->add_option("--limit", st_limit)->required();
    stats_cmd->add_option("--tables", st_tables, "comma list of names or numbers 1..11, or 'all'");
    stats_cmd->add_option("--plots", st_plots, "directory for plot-data files");
    stats_cmd->add_option("--json", st_json, "structured dump file");
    stats_cmd->add_option("--index-cap", st_cap, "index report bound");

    auto* smallest = app.add_subcommand("smallest", "smallest Carmichael number with d prime factors");
    unsigned sm_d = 3;
    std::string sm_cap = "1e12";
    smallest->add_option("--d", sm_d)->required();
    smallest->add_option("--cap", sm_cap);

    auto* oracle = app.add_subcommand("oracle", "brute-force Fermat-definition scan");
    std::string o_limit, o_out;
    oracle->add_option("--limit", o_limit)->required();
    oracle->add_option("--out", o_out);

    auto* merge_cmd = app.add_subcommand("merge", "sorted union of result files");
    std::vector<std::string> m_files;
    std::string m_out;
    merge_cmd->add_option("files", m_files)->required();
    merge_cmd->add_option("--out", m_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*enumerate) {
            EnumerationOptions opts;
            opts.search.limit = parse_flag("limit", e_limit);
            if (!e_split.empty()) opts.search.split = parse_flag("split", e_split);
            opts.search.d_min = e_dmin;
            opts.search.d_max = e_dmax;
            opts.search.early_term_threshold = parse_flag("threshold", e_threshold);
            if (!e_units.empty()) opts.search.partition = UnitSelector::parse(e_units);
            try {
                opts.search.validate();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            opts.with_scan = !e_no_scan;
            opts.threads = e_threads;
            if (!e_checkpoint.empty()) opts.checkpoint = e_checkpoint;
            ResultFile file;
            file.meta.limit = opts.search.limit;
            file.meta.strategy = e_no_scan ? "search" : "enumerate";
            file.meta.unit = opts.search.partition ? opts.search.partition->spec() : "all";
            file.records = run_enumeration(opts);
            emit(file, e_out);
            return kOk;
        }
        if (*d3) {
            const natural limit = parse_flag("limit", d3_limit);
            if (limit < 561) throw UsageError("--limit must be at least 561");
            emit(ResultFile{{kFormatVersion, limit, "pair-d3", "all"}, enumerate_d3(limit)}, d3_out);
            return kOk;
        }
        if (*scan_cmd) {
            ScanRange range{parse_flag("p-lo", s_lo), parse_flag("p-hi", s_hi), parse_flag("limit", s_limit)};
            try {
                range.validate();
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            std::vector<Job> jobs;
            for (const auto& piece : split_scan_range(range, kScanPieces))
                jobs.push_back({piece.id(), piece.p_hi, [piece] { return scan(piece); }});
            emit(ResultFile{{kFormatVersion, range.limit, "large-prime", range.id()}, run_jobs(jobs, s_threads)},
                 s_out);
            return kOk;
        }
        if (*verify_cmd) {
            if (v_known) {
                bool all_pass = true;
                for (const auto& v : verify_table3(known_smallest())) {
                    std::cout << v.d << '\t' << v.n << '\t' << to_string(v.status);
                    if (!v.detail.empty()) std::cout << '\t' << v.detail;
                    std::cout << '\n';
                    all_pass = all_pass && v.status == VerifyStatus::pass;
                }
                return all_pass ? kOk : kFailure;
            }
            if (v_file.empty()) throw UsageError("verify: a result file or --known-smallest is required");
            try {
                const auto file = read_file(v_file, true);
                std::cout << v_file << ": " << file.records.size() << " records verified\n";
                return kOk;
            } catch (const StoreError& e) {
                std::cerr << "verify failed: " << e.what() << '\n';
                return kFailure;
            }
        }
        if (*check) {
            const natural n = parse_flag("n", c_n);
            if (n < 2) throw UsageError("check: n must be at least 2");
            const Factorization f = factorize(n);
            const bool yes = korselt(n, f);
            std::cout << "Carmichael: " << (yes ? "yes" : "no") << "; factors " << describe_factors(f);
            if (yes) std::cout << "; index " << index_of(n, f);
            if (n >= 4 && !(f.size() == 1 && f[0].exponent == 1))
                std::cout << "; lehmer " << format_fixed(lehmer_index(n, f).value(), 5);
            std::cout << '\n';
            return kOk;
        }
        if (*stats_cmd) {
            const natural limit = parse_flag("limit", st_limit);
            const auto tables = parse_table_list(st_tables);
            const auto file = read_file(st_in, true);
            if (file.meta.limit < limit)
                throw UsageError("stats: file covers only N <= " + std::to_string(file.meta.limit));
            if (file.meta.unit != "all")
                throw UsageError("stats: file holds a partial run (unit " + file.meta.unit + ")");
            const auto rep = build_report(file.records, limit, parse_flag("index-cap", st_cap));
            write_tsv(std::cout, rep, tables);
            if (!st_json.empty()) {
                std::ofstream os(st_json);
                if (!os) throw StoreError("cannot write " + st_json);
                os << to_json(rep, tables).dump(2) << '\n';
            }
            if (!st_plots.empty()) write_plot_files(st_plots, rep);
            const auto bad = check_invariants(rep);
            for (const auto& b : bad) std::cerr << "invariant violated: " << b << '\n';
            return bad.empty() ? kOk : kFailure;
        }
        if (*smallest) {
            if (sm_d < 3) throw UsageError("smallest: d must be at least 3");
            const auto s = smallest_with_d(sm_d, parse_flag("cap", sm_cap));
            if (!s) {
                std::cout << "not found up to " << sm_cap << '\n';
                return kFailure;
            }
            std::cout << *s << '\n';
            return kOk;
        }
        if (*oracle) {
            const natural limit = parse_flag("limit", o_limit);
            if (limit > kOracleCap) throw UsageError("oracle: limit above " + std::to_string(kOracleCap));
            emit(ResultFile{{kFormatVersion, limit, "oracle", "all"}, brute_scan(limit)}, o_out);
            return kOk;
        }
        if (*merge_cmd) {
            std::vector<ResultFile> files;
            for (const auto& f : m_files) files.push_back(read_file(f, true));
            emit(merge(files), m_out);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const FingerprintMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const StoreError& e) {
        std::cerr << "integrity error: " << e.what() << '\n';
        return kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
