// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <sstream>

#include "nqc2/coverage.hpp"
#include "nqc2/linemap.hpp"
#include "nqc2/symbolize.hpp"
#include "test_util.hpp"

using namespace nqc2;
using testutil::TempPath;

namespace {

LineMap small_map() {
    return LineMap({
        {0x1000, 4, "main.c", 10},
        {0x1004, 4, "main.c", 10},
        {0x1008, 4, "main.c", 11},
        {0x100c, 4, "main.c", 12},
        {0x2000, 4, "util.c", 5},
    });
}

std::vector<elog::Block> frames_of(std::vector<elog::ExecEntry> entries) {
    elog::ExecFrame f;
    f.entries = std::move(entries);
    return {elog::Block{f}};
}

// Brute-force per-record oracle over raw, unmerged events: record i is hit
// once by every event whose [start, end) contains its address.
std::vector<std::uint64_t> oracle_record_counts(const LineMap &map,
                                                const std::vector<elog::ExecEntry> &events) {
    std::vector<std::uint64_t> counts(map.size(), 0);
    for (const auto &ev : events)
        for (std::size_t i = 0; i < map.size(); ++i)
            if (map.records()[i].addr >= ev.start && map.records()[i].addr < ev.end)
                ++counts[i];
    return counts;
}

} // namespace

TEST_CASE("line map parsing") {
    std::istringstream in("# comment\n"
                          "0x1000 4 main.c 10\n"
                          "\n"
                          "  0x1004 8 util.c 5\n");
    const LineMap map = parse_line_map(in);
    REQUIRE(map.size() == 2);
    CHECK(map.records()[0] == LineMapRecord{0x1000, 4, "main.c", 10});
    CHECK(map.records()[1] == LineMapRecord{0x1004, 8, "util.c", 5});
    CHECK(map.lower_bound(0x1000) == 0);
    CHECK(map.lower_bound(0x1001) == 1);
    CHECK(map.lower_bound(0x9999) == 2);
}

TEST_CASE("line map rejects malformed input") {
    auto parse = [](const std::string &text) {
        std::istringstream in(text);
        return parse_line_map(in);
    };
    CHECK_THROWS_AS(parse("0x1000 4 main.c\n"), MalformedLineMap);         // missing field
    CHECK_THROWS_AS(parse("zz 4 main.c 10\n"), MalformedLineMap);          // bad address
    CHECK_THROWS_AS(parse("0x1000 4 main.c 0\n"), MalformedLineMap);       // 0-based line
    CHECK_THROWS_AS(parse("0x1000 0 main.c 1\n"), MalformedLineMap);       // zero size
    CHECK_THROWS_AS(parse("0x2000 4 a.c 1\n0x1000 4 a.c 2\n"), MalformedLineMap);  // unsorted
    CHECK_THROWS_AS(parse("0x1000 8 a.c 1\n0x1004 4 a.c 2\n"), MalformedLineMap);  // overlap

    std::uint64_t bad_line = 0;
    try {
        parse("0x1000 4 a.c 1\nbroken\n");
    } catch (const MalformedLineMap &e) {
        bad_line = e.line;
    }
    CHECK(bad_line == 2);
}

TEST_CASE("line map roundtrips through its text form") {
    const LineMap map = small_map();
    std::ostringstream out;
    write_line_map(out, map);
    std::istringstream in(out.str());
    CHECK(parse_line_map(in).records() == map.records());
}

TEST_CASE("accumulate counts records covered by an entry") {
    const LineMap map = small_map();
    // One pass over all of main.c's text, one separate hit of line 10's
    // second instruction only.
    const auto counts = accumulate(frames_of({{0, 0x1000, 0x1010}, {0, 0x1004, 0x1008}}), map);

    CHECK(counts.record_counts == std::vector<std::uint64_t>{1, 2, 1, 1, 0});
    // Line 10 takes the first instruction's count, not the max.
    CHECK(counts.lines.at("main.c").at(10) == 1);
    CHECK(counts.lines.at("main.c").at(11) == 1);
    CHECK(counts.lines.at("main.c").at(12) == 1);
    CHECK(counts.lines.at("util.c").at(5) == 0);
    CHECK(counts.residuals.empty());
}

TEST_CASE("unmapped executed ranges are reported as residuals") {
    const LineMap map = small_map();
    const auto counts = accumulate(frames_of({{0, 0x0ff8, 0x1008}, {0, 0x3000, 0x3008}, {0, 0x3000, 0x3008}}), map);
    REQUIRE(counts.residuals.size() == 2);
    CHECK(counts.residuals[0] == ResidualRange{0x0ff8, 0x1000, 1});
    CHECK(counts.residuals[1] == ResidualRange{0x3000, 0x3008, 2});
}

TEST_CASE("accumulate is invariant under adjacent-entry merging") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        // Random small map.
        std::vector<LineMapRecord> recs;
        std::uint64_t addr = 0x1000;
        const int n_recs = 1 + rng() % 20;
        for (int i = 0; i < n_recs; ++i) {
            const std::uint32_t size = 4 * (1 + rng() % 3);
            recs.push_back({addr, size, (rng() % 2) ? "a.c" : "b.c",
                            static_cast<std::uint32_t>(1 + rng() % 40)});
            addr += size + 4 * (rng() % 2);  // occasional gap
        }
        const LineMap map{std::move(recs)};

        // Random contiguity-heavy event stream and its merged form.
        std::vector<elog::ExecEntry> raw, merged;
        std::uint64_t prev_end = 0x1000;
        const int n_events = 1 + rng() % 50;
        for (int i = 0; i < n_events; ++i) {
            const std::uint64_t start = (rng() % 2) ? prev_end : 0xf00 + (rng() % 64) * 4;
            const std::uint64_t end = start + 4 + (rng() % 8) * 4;
            prev_end = end;
            raw.push_back({0, start, end});
            if (!merged.empty() && merged.back().end == start)
                merged.back().end = end;
            else
                merged.push_back({0, start, end});
        }

        const auto from_raw = accumulate(frames_of(raw), map);
        const auto from_merged = accumulate(frames_of(merged), map);
        REQUIRE(from_raw.record_counts == oracle_record_counts(map, raw));
        REQUIRE(from_merged.record_counts == from_raw.record_counts);
        REQUIRE(from_merged.lines == from_raw.lines);
    }
}

TEST_CASE("lcov output is byte-exact and deterministic") {
    const LineMap map = small_map();
    const auto counts = accumulate(frames_of({{0, 0x1000, 0x1010}}), map);
    std::ostringstream out;
    const std::size_t n = emit_lcov(counts, out);
    const std::string expected = "SF:main.c\n"
                                 "DA:10,1\n"
                                 "DA:11,1\n"
                                 "DA:12,1\n"
                                 "LF:3\n"
                                 "LH:3\n"
                                 "end_of_record\n"
                                 "SF:util.c\n"
                                 "DA:5,0\n"
                                 "LF:1\n"
                                 "LH:0\n"
                                 "end_of_record\n";
    CHECK(out.str() == expected);
    CHECK(n == expected.size());

    CHECK(emit_lcov(CoverageCounts{}, out) == 0);  // empty counts, zero bytes
}

TEST_CASE("summary percentages round half-up to tenths") {
    const LineMap map({{0x1000, 4, "a.c", 1}, {0x1004, 4, "a.c", 2}});
    const auto counts = accumulate(frames_of({{0, 0x1000, 0x1004}}), map);
    const std::string s = summarize(counts);
    CHECK(s.find("a.c: 1/2 lines (50.0%)") != std::string::npos);
    CHECK(s.find("total: 1/2 lines (50.0%)") != std::string::npos);

    // 0 of 0 lines reads as fully covered.
    const std::string empty = summarize(CoverageCounts{});
    CHECK(empty.find("total: 0/0 lines (100.0%)") != std::string::npos);

    // 2/3 = 66.666...% rounds up to 66.7%.
    const LineMap map3({{0x1000, 4, "a.c", 1}, {0x1004, 4, "a.c", 2}, {0x1008, 4, "a.c", 3}});
    const auto c3 = accumulate(frames_of({{0, 0x1000, 0x1008}}), map3);
    CHECK(summarize(c3).find("(66.7%)") != std::string::npos);
}

TEST_CASE("convert_elog_to_lcov writes the file end to end") {
    TempPath elog(".elog"), mapfile(".map"), info(".info");
    {
        std::ofstream out(elog.str(), std::ios::binary);
        elog::ConfigPreamble p;
        elog::write_config_preamble(out, p);
        elog::ExecFrame f;
        f.entries = {{0, 0x1000, 0x1010}};
        const auto bytes = elog::encode_exec_frame(f);
        out.write(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    }
    {
        std::ofstream out(mapfile.str());
        write_line_map(out, small_map());
    }
    const std::string summary = convert_elog_to_lcov(elog.str(), mapfile.str(), info.str());
    CHECK(summary.find("main.c: 3/3 lines (100.0%)") != std::string::npos);
    CHECK(testutil::read_file(info.str()).find("DA:10,1\n") != std::string::npos);

    CHECK_THROWS_AS(convert_elog_to_lcov("/no/such.elog", mapfile.str(), info.str()), IoError);
    CHECK_THROWS_AS(convert_elog_to_lcov(elog.str(), "/no/such.map", info.str()), IoError);
}

TEST_CASE("elog address ranges are coalesced and sorted") {
    TempPath elog(".elog");
    {
        std::ofstream out(elog.str(), std::ios::binary);
        elog::write_config_preamble(out, {});
        elog::ExecFrame f;
        f.entries = {{0, 0x2000, 0x2010}, {0, 0x1000, 0x1008}, {0, 0x1008, 0x1010}, {0, 0x2008, 0x2020}};
        const auto bytes = elog::encode_exec_frame(f);
        out.write(reinterpret_cast<const char *>(bytes.data()), bytes.size());
    }
    const auto ranges = elog_address_ranges(elog.str());
    REQUIRE(ranges.size() == 2);
    CHECK(ranges[0].start == 0x1000);
    CHECK(ranges[0].end == 0x1010);
    CHECK(ranges[1].start == 0x2000);
    CHECK(ranges[1].end == 0x2020);
}

TEST_CASE("symbolizer bridge parses file:line answers") {
    // String-matching fake symbolizer: no hex arithmetic needed.
    const std::string cmd = "awk '{ if ($1 == \"0x1000\") print \"main.c:10\";"
                            " else if ($1 == \"0x1004\") print \"main.c:11\";"
                            " else print \"??:0\" }'";
    const auto result = symbolize_ranges({{0x1000, 0x100c}}, cmd, 4);
    CHECK(result.skipped == 1);  // 0x1008 unresolved
    REQUIRE(result.map.size() == 2);
    CHECK(result.map.records()[0] == LineMapRecord{0x1000, 4, "main.c", 10});
    CHECK(result.map.records()[1] == LineMapRecord{0x1004, 4, "main.c", 11});
}

TEST_CASE("symbolizer record sizes are clamped to the next sample") {
    // Ranges closer together than the step force a smaller first record.
    const std::string cmd = "awk '{ print \"a.c:\" NR }'";
    const auto result = symbolize_ranges({{0x1000, 0x1002}, {0x1002, 0x1004}}, cmd, 4);
    REQUIRE(result.map.size() == 2);
    CHECK(result.map.records()[0].addr == 0x1000);
    CHECK(result.map.records()[0].size == 2);
    CHECK(result.map.records()[1].addr == 0x1002);
}

TEST_CASE("symbolizer failures are reported, not swallowed") {
    CHECK_THROWS_AS(symbolize_ranges({{0x1000, 0x1010}}, "exit 3", 4), SymbolizerError);
    // Answer count mismatch.
    CHECK_THROWS_AS(symbolize_ranges({{0x1000, 0x1010}}, "sed -n 1p | sed 's/.*/a.c:1/'", 4),
                    SymbolizerError);
    CHECK_THROWS_AS(symbolize_ranges({{0x1000, 0x1010}}, "", 4), SymbolizerError);
    CHECK_THROWS_AS(symbolize_ranges({{0x1000, 0x1010}}, "cat", 0), InvalidParam);
}
