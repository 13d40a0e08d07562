// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "nqc2/errors.hpp"

namespace nqc2 {

// One TB-execution event as seen by a collector.
struct Event {
    std::uint16_t unit = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::uint32_t duration_ns = 0;

    bool operator==(const Event &) const = default;
};

// Synthetic workload description. `contiguity_prob` is the probability that an
// event begins exactly where its unit's previous event ended, which is the
// condition the collector's merge optimization tests for.
struct StreamSpec {
    std::uint64_t n_events = 0;
    double contiguity_prob = 0.0;
    std::uint32_t tb_size_min = 4;
    std::uint32_t tb_size_max = 64;
    std::uint64_t addr_lo = 0x1000;
    std::uint64_t addr_hi = std::uint64_t(1) << 32;
    std::uint64_t seed = 1;
    std::uint32_t n_units = 1;
};

// Deterministic for a given spec. Non-contiguous events never start at the
// previous end address, so the contiguous fraction converges to the
// configured probability.
std::vector<Event> gen_stream(const StreamSpec &spec);

} // namespace nqc2
