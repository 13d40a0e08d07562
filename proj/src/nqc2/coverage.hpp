// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nqc2/elog.hpp"
#include "nqc2/linemap.hpp"

namespace nqc2 {

// Executed addresses not covered by any line-map record, kept so nothing is
// silently dropped.
struct ResidualRange {
    std::uint64_t start = 0;
    std::uint64_t end = 0;  // exclusive
    std::uint64_t count = 0;

    bool operator==(const ResidualRange &) const = default;
};

struct CoverageCounts {
    // file -> line -> execution count. Every line in the map appears, hit or not.
    std::map<std::string, std::map<std::uint32_t, std::uint64_t>> lines;
    std::vector<ResidualRange> residuals;
    // Per-record counts in line-map order, for oracles and diagnostics.
    std::vector<std::uint64_t> record_counts;
};

// Folds exec frames from an elog stream into per-line counts. An entry [s, e)
// contributes +1 to each record whose start address lies in [s, e); a line's
// count is the count of its first (lowest-address) mapped instruction.
// Non-exec blocks are skipped.
CoverageCounts accumulate(std::istream &elog_in, const LineMap &map);
CoverageCounts accumulate(const std::vector<elog::Block> &blocks, const LineMap &map);

// lcov "info" text output, deterministic byte-for-byte: files sorted by path,
// DA records sorted by line, `\n` endings. Returns bytes written.
std::size_t emit_lcov(const CoverageCounts &counts, std::ostream &out);

// Human-readable per-file hit summary plus residual ranges.
std::string summarize(const CoverageCounts &counts);

// Reads an elog and writes an lcov info file atomically (temp + rename).
// Returns the summary text.
std::string convert_elog_to_lcov(const std::string &elog_path, const std::string &linemap_path,
                                 const std::string &out_path);

} // namespace nqc2
