#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "carmex/driver.hpp"
#include "oracles.hpp"

using namespace carmex;
namespace fs = std::filesystem;

namespace {

EnumerationOptions options(natural limit, unsigned threads) {
    EnumerationOptions o;
    o.search.limit = limit;
    o.threads = threads;
    return o;
}

std::string text_of(const std::vector<CarmichaelRecord>& rs, natural limit) {
    std::ostringstream os;
    write(os, ResultFile{{kFormatVersion, limit, "enumerate", "all"}, rs});
    return os.str();
}

fs::path temp_path(const std::string& stem) {
    return fs::temp_directory_path() / (stem + "-" + std::to_string(oracle::uniform(0, 1ULL << 60)));
}

}  // namespace

TEST(Driver, ExampleCounts) {
    EXPECT_EQ(run_enumeration(options(100'000, 1)).size(), 16u);
    EXPECT_EQ(run_enumeration(options(100'000'000, 2)).size(), 255u);
}

TEST(Driver, ByteIdenticalAcrossThreadCounts) {
    const natural X = 1'000'000'000;
    const std::string reference = text_of(run_enumeration(options(X, 1)), X);
    for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(text_of(run_enumeration(options(X, t)), X), reference) << t;
}

TEST(Driver, PartitionsUnionToFullRun) {
    const natural X = 1'000'000'000;
    const auto full = run_enumeration(options(X, 2));
    for (const std::string scheme : {"3", "5"}) {
        const natural slices = std::stoull(scheme);
        std::vector<CarmichaelRecord> joined;
        for (natural k = 0; k < slices; ++k) {
            auto o = options(X, 2);
            o.search.partition = UnitSelector::parse(std::to_string(k) + "/" + scheme);
            auto part = run_enumeration(o);
            joined.insert(joined.end(), part.begin(), part.end());
        }
        EXPECT_EQ(merge_records(joined), full) << scheme;
    }
    auto low = options(X, 1), high = options(X, 1);
    low.search.partition = UnitSelector::parse("3-1000");
    high.search.partition = UnitSelector::parse("1001-40000");
    auto joined = run_enumeration(low);
    auto rest = run_enumeration(high);
    joined.insert(joined.end(), rest.begin(), rest.end());
    EXPECT_EQ(merge_records(joined), full);
}

TEST(Driver, NoScanStopsAtSplit) {
    auto o = options(1'000'000'000, 1);
    o.with_scan = false;
    const auto tree = run_enumeration(o);
    for (const auto& r : tree) EXPECT_LE(r.largest_prime(), o.search.effective_split());
    EXPECT_LT(tree.size(), 646u);
}

TEST(Driver, ResumeAfterInterruptionIsIdentical) {
    const natural X = 100'000'000;
    const auto path = temp_path("carmex-driver");
    const auto reference = run_enumeration(options(X, 1));

    // Simulate an interruption: run a subset of jobs into the checkpoint.
    auto o = options(X, 2);
    o.checkpoint = path;
    {
        const Searcher searcher(o.search);
        auto jobs = plan_enumeration(searcher, true);
        jobs.resize(jobs.size() / 3);
        Checkpoint cp(path, enumeration_canonical(o));
        run_jobs(jobs, 2, &cp);
        EXPECT_EQ(cp.completed_count(), jobs.size());
    }
    EXPECT_EQ(run_enumeration(o), reference);
    // A second resume finds every unit done.
    EXPECT_EQ(run_enumeration(o), reference);
    fs::remove(path);
}

TEST(Driver, ResumeRefusedForChangedLimit) {
    const auto path = temp_path("carmex-driver");
    auto o = options(1'000'000, 1);
    o.checkpoint = path;
    run_enumeration(o);
    o.search.limit = 2'000'000;
    EXPECT_THROW(run_enumeration(o), FingerprintMismatch);
    fs::remove(path);
}

TEST(Driver, EmptyCheckpointRunsEverything) {
    const auto path = temp_path("carmex-driver");
    auto o = options(1'000'000, 1);
    o.checkpoint = path;
    EXPECT_EQ(run_enumeration(o).size(), 43u);
    fs::remove(path);
}

TEST(Driver, JobFailurePropagates) {
    std::vector<Job> jobs{{"ok", 3, [] { return std::vector<CarmichaelRecord>{}; }},
                          {"bad", 5, []() -> std::vector<CarmichaelRecord> { throw std::runtime_error("boom"); }}};
    EXPECT_THROW(run_jobs(jobs, 2), std::runtime_error);
}
