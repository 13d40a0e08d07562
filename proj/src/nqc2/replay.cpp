// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/replay.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <sstream>

namespace nqc2 {

namespace {

void busy_wait(std::uint64_t ns) {
    const auto until = std::chrono::steady_clock::now() + std::chrono::nanoseconds(ns);
    while (std::chrono::steady_clock::now() < until) {
    }
}

} // namespace

ExperimentResult replay(std::span<const Event> events, const ReplayOptions &opts) {
    std::shared_ptr<FrameSink> base_sink;
    if (opts.elog_path.empty())
        base_sink = std::make_shared<CountingSink>();
    else
        base_sink = std::make_shared<FileSink>(opts.elog_path);
    std::shared_ptr<FrameSink> sink = base_sink;
    if (opts.writer_latency_ns > 0)
        sink = std::make_shared<LatencySink>(base_sink, opts.writer_latency_ns);

    const auto t0 = std::chrono::steady_clock::now();

    std::map<std::uint16_t, std::unique_ptr<Collector>> collectors;
    auto collector_for = [&](std::uint16_t unit) -> Collector & {
        auto it = collectors.find(unit);
        if (it == collectors.end()) {
            CollectorConfig cfg;
            cfg.n_buffers = opts.n_buffers;
            cfg.capacity = opts.capacity;
            cfg.merge_enabled = opts.merge_enabled;
            cfg.unit_id = unit;
            cfg.close_sink = false;  // shared; closed once below
            it = collectors.emplace(unit, std::make_unique<Collector>(cfg, sink)).first;
        }
        return *it->second;
    };

    for (const Event &ev : events) {
        if (opts.producer_cost_ns > 0)
            busy_wait(opts.producer_cost_ns);
        collector_for(ev.unit).record(ev.start, ev.end, ev.duration_ns);
    }

    ExperimentResult result;
    for (auto &[unit, collector] : collectors)
        result.stats += collector->close();
    sink->close();

    const auto t1 = std::chrono::steady_clock::now();
    result.wall_ns =
        static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    result.file_bytes = opts.elog_path.empty()
                            ? base_sink->bytes_written()
                            : static_cast<std::uint64_t>(std::filesystem::file_size(opts.elog_path));
    return result;
}

std::string sweep_csv(const StreamSpec &spec, const SweepGrid &grid, std::uint64_t producer_cost_ns) {
    if (grid.n_buffers.empty() || grid.capacities.empty() || grid.merges.empty() ||
        grid.latencies_ns.empty())
        throw InvalidParam("sweep grid must be non-empty in every dimension");

    const std::vector<Event> events = gen_stream(spec);
    std::ostringstream csv;
    csv << kSweepCsvHeader << "\n";
    for (std::uint32_t nb : grid.n_buffers) {
        for (std::uint64_t cap : grid.capacities) {
            for (bool merge : grid.merges) {
                for (std::uint64_t latency : grid.latencies_ns) {
                    ReplayOptions opts;
                    opts.n_buffers = nb;
                    opts.capacity = cap;
                    opts.merge_enabled = merge;
                    opts.writer_latency_ns = latency;
                    opts.producer_cost_ns = producer_cost_ns;
                    const ExperimentResult r = replay(events, opts);
                    csv << nb << ',' << cap << ',' << (merge ? "on" : "off") << ',' << latency << ','
                        << r.stats.events_recorded << ',' << r.stats.entries_merged << ','
                        << r.stats.frames_written << ',' << r.stats.congestion_waits << ','
                        << r.file_bytes << ',' << r.wall_ns << "\n";
                }
            }
        }
    }
    return csv.str();
}

} // namespace nqc2
