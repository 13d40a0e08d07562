// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "nqc2/elog.hpp"
#include "nqc2/sink.hpp"

namespace nqc2 {

enum class SlotState { Empty, Filling, Full, Flushing };

const char *slot_state_name(SlotState s);

struct CollectorStats {
    std::uint64_t events_recorded = 0;
    std::uint64_t entries_merged = 0;
    std::uint64_t frames_written = 0;
    std::uint64_t congestion_waits = 0;
    std::uint64_t bytes_written = 0;

    CollectorStats &operator+=(const CollectorStats &o) {
        events_recorded += o.events_recorded;
        entries_merged += o.entries_merged;
        frames_written += o.frames_written;
        congestion_waits += o.congestion_waits;
        bytes_written += o.bytes_written;
        return *this;
    }
};

struct CollectorConfig {
    std::uint32_t n_buffers = 4;
    std::uint64_t capacity = 8192;
    bool merge_enabled = true;
    bool timing_enabled = false;
    std::uint16_t unit_id = 0;
    // When false the collector leaves closing the (shared) sink to its owner.
    bool close_sink = true;
    // Test hook, invoked under the collector lock on every slot transition.
    std::function<void(std::size_t slot, SlotState from, SlotState to)> on_transition;
};

// Records TB executions into a ring of fixed-capacity buffers. The producer
// (record) fills buffers; a dedicated writer thread encodes full buffers into
// exec frames and hands them to the sink. Exactly one producer context per
// collector; record() is not safe for concurrent callers.
class Collector {
  public:
    Collector(CollectorConfig cfg, std::shared_ptr<FrameSink> sink);
    ~Collector();

    Collector(const Collector &) = delete;
    Collector &operator=(const Collector &) = delete;

    // Appends (or merges) one executed range. Blocks when the next buffer in
    // the ring is not yet empty. After a writer failure events are dropped
    // silently; the error surfaces at close().
    void record(std::uint64_t start, std::uint64_t end, std::uint32_t duration_ns = 0);

    // Flushes the partial buffer, drains the writer, joins it and (optionally)
    // closes the sink. Idempotent: repeated calls return the same stats.
    CollectorStats close();

    CollectorStats stats() const;
    bool failed() const;

    // Nanoseconds since collector creation, monotonic.
    std::uint64_t now_ns() const;

  private:
    struct Slot {
        SlotState state = SlotState::Empty;
        std::vector<elog::ExecEntry> entries;
        std::uint64_t start_time_ns = 0;
    };

    void transition(std::size_t idx, SlotState to);
    void writer_main();

    CollectorConfig cfg_;
    std::shared_ptr<FrameSink> sink_;
    std::vector<Slot> slots_;
    std::size_t fill_idx_ = 0;
    std::size_t drain_idx_ = 0;

    mutable std::mutex mu_;
    std::condition_variable cv_empty_;  // writer -> producer
    std::condition_variable cv_full_;   // producer -> writer
    bool shutdown_ = false;
    bool closed_ = false;
    std::string writer_error_;

    CollectorStats stats_;

    std::chrono::steady_clock::time_point epoch_;
    std::thread writer_;
};

} // namespace nqc2
