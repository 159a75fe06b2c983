#pragma once

// Runs search and large-prime work units on a pool of threads. Each unit
// writes to its own buffer; buffers are merged in one sequential pass, so
// the result does not depend on thread count or completion order.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "carmex/largeprime.hpp"
#include "carmex/search.hpp"
#include "carmex/store.hpp"

namespace carmex {

/// A named, independently executable piece of an enumeration.
struct Job {
    std::string id;
    natural key_prime = 0;  // matched by leading-prime unit selectors
    std::function<std::vector<CarmichaelRecord>()> run;
};

inline unsigned default_thread_count() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Executes every job, skipping those already in the checkpoint.
inline std::vector<CarmichaelRecord> run_jobs(const std::vector<Job>& jobs, unsigned threads,
                                              Checkpoint* checkpoint = nullptr) {
    std::vector<std::vector<CarmichaelRecord>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                if (checkpoint && checkpoint->completed(jobs[i].id)) {
                    results[i] = checkpoint->records_of(jobs[i].id);
                    continue;
                }
                results[i] = jobs[i].run();
                if (checkpoint) checkpoint->commit(jobs[i].id, results[i]);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(jobs.size());
                return;
            }
        }
    };

    threads = std::max(1u, threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<CarmichaelRecord> all;
    for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
    return merge_records(std::move(all));
}

inline constexpr std::size_t kScanPieces = 64;

/// The tree units for primes <= split, then the large-prime subranges up
/// to floor(sqrt(limit)), filtered by the configured partition.
inline std::vector<Job> plan_enumeration(const Searcher& searcher, bool with_scan) {
    const auto& cfg = searcher.config();
    std::vector<Job> jobs;
    for (const auto& unit : searcher.plan_units())
        jobs.push_back({unit.id(), unit.prefix[0], [&searcher, unit] { return searcher.run_unit(unit); }});
    const natural root = isqrt(cfg.limit);
    if (with_scan && searcher.split() < root) {
        for (const auto& range : split_scan_range({searcher.split(), root, cfg.limit}, kScanPieces)) {
            const unsigned d_min = cfg.d_min, d_max = cfg.d_max;
            jobs.push_back({range.id(), range.p_hi, [range, d_min, d_max] { return scan(range, d_min, d_max); }});
        }
    }
    if (cfg.partition) {
        std::vector<Job> selected;
        for (std::size_t i = 0; i < jobs.size(); ++i)
            if (cfg.partition->selects(i, jobs[i].key_prime)) selected.push_back(std::move(jobs[i]));
        jobs = std::move(selected);
    }
    return jobs;
}

struct EnumerationOptions {
    SearchConfig search;
    bool with_scan = true;
    unsigned threads = 1;
    std::optional<std::filesystem::path> checkpoint;
};

inline std::string enumeration_canonical(const EnumerationOptions& opts) {
    return opts.search.canonical() + ";threshold=" + std::to_string(opts.search.early_term_threshold) +
           ";scan=" + (opts.with_scan ? "1" : "0");
}

/// Complete list of Carmichael numbers up to the limit (restricted to the
/// selected units when a partition is set).
inline std::vector<CarmichaelRecord> run_enumeration(const EnumerationOptions& opts) {
    const Searcher searcher(opts.search);
    const auto jobs = plan_enumeration(searcher, opts.with_scan);
    std::optional<Checkpoint> checkpoint;
    if (opts.checkpoint) checkpoint.emplace(*opts.checkpoint, enumeration_canonical(opts));
    return run_jobs(jobs, opts.threads, checkpoint ? &*checkpoint : nullptr);
}

}  // namespace carmex
