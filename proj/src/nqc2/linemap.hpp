// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "nqc2/errors.hpp"

namespace nqc2 {

// Address-to-source-line table, the toolchain-agnostic stand-in for ELF/DWARF
// debug info. Text format: one record per line, `0x<addr> <size> <path> <line>`,
// `#` comments, records sorted by address and non-overlapping.
struct LineMapRecord {
    std::uint64_t addr = 0;
    std::uint32_t size = 0;
    std::string file;
    std::uint32_t line = 0;

    bool operator==(const LineMapRecord &) const = default;
};

class LineMap {
  public:
    LineMap() = default;
    // Validates ordering/overlap; throws MalformedLineMap.
    explicit LineMap(std::vector<LineMapRecord> records);

    const std::vector<LineMapRecord> &records() const { return records_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

    // Index of the first record with addr >= a.
    std::size_t lower_bound(std::uint64_t a) const;

  private:
    std::vector<LineMapRecord> records_;
};

LineMap parse_line_map(std::istream &in);
LineMap load_line_map(const std::string &path);
void write_line_map(std::ostream &out, const LineMap &map);

} // namespace nqc2
