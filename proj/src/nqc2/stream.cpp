// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/stream.hpp"

#include <random>

namespace nqc2 {

std::vector<Event> gen_stream(const StreamSpec &spec) {
    if (spec.contiguity_prob < 0.0 || spec.contiguity_prob > 1.0)
        throw InvalidParam("contiguity_prob must be in [0, 1]");
    if (spec.tb_size_min < 1 || spec.tb_size_min > spec.tb_size_max)
        throw InvalidParam("need 1 <= tb_size_min <= tb_size_max");
    if (spec.addr_lo >= spec.addr_hi || spec.addr_hi - spec.addr_lo < 2 * std::uint64_t(spec.tb_size_max))
        throw InvalidParam("address space too small for tb_size_max");
    if (spec.n_units < 1)
        throw InvalidParam("n_units must be >= 1");

    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution contiguous(spec.contiguity_prob);
    std::uniform_int_distribution<std::uint64_t> rand_start(spec.addr_lo,
                                                            spec.addr_hi - spec.tb_size_max - 1);
    std::uniform_int_distribution<std::uint32_t> rand_size(spec.tb_size_min, spec.tb_size_max);
    std::uniform_int_distribution<std::uint32_t> rand_duration(1, 1000);

    std::vector<std::uint64_t> prev_end(spec.n_units, 0);  // 0 = no predecessor
    std::vector<Event> events;
    events.reserve(spec.n_events);
    for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        Event ev;
        ev.unit = static_cast<std::uint16_t>(i % spec.n_units);
        const std::uint64_t prev = prev_end[ev.unit];
        if (prev != 0 && contiguous(rng)) {
            ev.start = prev;
        } else {
            ev.start = rand_start(rng);
            if (ev.start == prev)
                ++ev.start;  // keep non-contiguous picks truly non-contiguous
        }
        ev.end = ev.start + rand_size(rng);
        ev.duration_ns = rand_duration(rng);
        prev_end[ev.unit] = ev.end;
        events.push_back(ev);
    }
    return events;
}

} // namespace nqc2
