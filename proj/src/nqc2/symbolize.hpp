// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nqc2/linemap.hpp"

namespace nqc2 {

struct AddressRange {
    std::uint64_t start = 0;
    std::uint64_t end = 0;  // exclusive
};

struct SymbolizeResult {
    LineMap map;
    std::uint64_t skipped = 0;  // addresses the symbolizer could not resolve
};

// Collects the executed address ranges of an elog, coalesced and sorted.
std::vector<AddressRange> elog_address_ranges(const std::string &elog_path);

// Bridges to an external addr2line-style command: addresses are fed on its
// standard input (hex, one per line), `file:line` answers are read from its
// standard output. Each range is sampled every `step` bytes; resolved
// addresses become line-map records of size `step`. Unresolved addresses
// ("??") are dropped and counted.
SymbolizeResult symbolize_ranges(const std::vector<AddressRange> &ranges, const std::string &command,
                                 std::uint32_t step = 4);

} // namespace nqc2
