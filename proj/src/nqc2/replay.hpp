// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nqc2/collector.hpp"
#include "nqc2/stream.hpp"

namespace nqc2 {

struct ReplayOptions {
    std::uint32_t n_buffers = 4;
    std::uint64_t capacity = 8192;
    bool merge_enabled = true;
    // Injected at the sink, so the collector under test is identical to the
    // production path.
    std::uint64_t writer_latency_ns = 0;
    // Busy-wait cost charged per produced event, standing in for the guest
    // execution time between TB-exec callbacks.
    std::uint64_t producer_cost_ns = 0;
    // Empty -> count bytes in memory instead of writing a file.
    std::string elog_path;
};

struct ExperimentResult {
    CollectorStats stats;  // aggregated over units
    std::uint64_t file_bytes = 0;
    std::uint64_t wall_ns = 0;
};

// Drives one collector per unit (shared sink) over the event stream and
// reports stats, on-disk size and wall time of the produce-drain-join cycle.
ExperimentResult replay(std::span<const Event> events, const ReplayOptions &opts);

struct SweepGrid {
    std::vector<std::uint32_t> n_buffers{4};
    std::vector<std::uint64_t> capacities{8192};
    std::vector<bool> merges{true};
    std::vector<std::uint64_t> latencies_ns{0};
};

inline constexpr const char *kSweepCsvHeader =
    "n_buffers,capacity,merge,latency_ns,events,merged,frames,congestion_waits,file_bytes,wall_ns";

// One CSV row per grid cell, same stream for every cell.
std::string sweep_csv(const StreamSpec &spec, const SweepGrid &grid, std::uint64_t producer_cost_ns = 0);

} // namespace nqc2
