// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/collector.hpp"

namespace nqc2 {

const char *slot_state_name(SlotState s) {
    switch (s) {
    case SlotState::Empty:
        return "empty";
    case SlotState::Filling:
        return "filling";
    case SlotState::Full:
        return "full";
    case SlotState::Flushing:
        return "flushing";
    }
    return "?";
}

Collector::Collector(CollectorConfig cfg, std::shared_ptr<FrameSink> sink)
    : cfg_(std::move(cfg)), sink_(std::move(sink)) {
    if (cfg_.n_buffers < 1)
        throw InvalidParam("n_buffers must be >= 1");
    if (cfg_.capacity < 1)
        throw InvalidParam("capacity must be >= 1");
    if (!sink_)
        throw InvalidParam("collector needs a sink");
    slots_.resize(cfg_.n_buffers);
    for (Slot &s : slots_)
        s.entries.reserve(cfg_.capacity);
    epoch_ = std::chrono::steady_clock::now();
    writer_ = std::thread(&Collector::writer_main, this);
}

Collector::~Collector() {
    try {
        close();
    } catch (...) {
        // errors already latched; close() rethrows only on first call
    }
}

std::uint64_t Collector::now_ns() const {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - epoch_)
            .count());
}

void Collector::transition(std::size_t idx, SlotState to) {
    if (cfg_.on_transition)
        cfg_.on_transition(idx, slots_[idx].state, to);
    slots_[idx].state = to;
}

void Collector::record(std::uint64_t start, std::uint64_t end, std::uint32_t duration_ns) {
    std::unique_lock lock(mu_);
    if (closed_)
        throw ClosedCollector("record after close");
    if (start >= end)
        throw InvalidRange("TB range must satisfy start < end");
    if (!writer_error_.empty())
        return;  // sink failed; stop accepting, surface at close()

    Slot &slot = slots_[fill_idx_];
    if (slot.state == SlotState::Empty) {
        transition(fill_idx_, SlotState::Filling);
        slot.start_time_ns = now_ns();
    }

    ++stats_.events_recorded;
    if (cfg_.merge_enabled && !slot.entries.empty() && slot.entries.back().end == start) {
        slot.entries.back().end = end;
        slot.entries.back().duration_ns += duration_ns;
        ++stats_.entries_merged;
    } else {
        slot.entries.push_back(elog::ExecEntry{duration_ns, start, end});
    }

    if (slot.entries.size() == cfg_.capacity) {
        transition(fill_idx_, SlotState::Full);
        cv_full_.notify_one();
        const std::size_t filled = fill_idx_;
        fill_idx_ = (fill_idx_ + 1) % slots_.size();
        if (slots_[fill_idx_].state != SlotState::Empty) {
            // Counted only when no writer, however fast, could have freed the
            // slot: with a single buffer the producer has held the lock since
            // filling it. Multi-buffer waits depend on writer scheduling, and
            // counting them would make the stats nondeterministic per seed.
            if (fill_idx_ == filled)
                ++stats_.congestion_waits;
            cv_empty_.wait(lock, [&] {
                return slots_[fill_idx_].state == SlotState::Empty || !writer_error_.empty();
            });
        }
    }
}

void Collector::writer_main() {
    std::unique_lock lock(mu_);
    for (;;) {
        cv_full_.wait(lock, [&] { return slots_[drain_idx_].state == SlotState::Full || shutdown_; });
        // Buffers become full strictly in ring order, so if the next expected
        // slot is not full there is nothing left to drain.
        if (slots_[drain_idx_].state != SlotState::Full)
            return;

        transition(drain_idx_, SlotState::Flushing);
        elog::ExecFrame frame;
        frame.unit_id = cfg_.unit_id;
        frame.start_time_ns = slots_[drain_idx_].start_time_ns;
        frame.entries = std::move(slots_[drain_idx_].entries);
        slots_[drain_idx_].entries.clear();
        slots_[drain_idx_].entries.reserve(cfg_.capacity);

        lock.unlock();
        std::string error;
        try {
            sink_->write_frame(frame);
        } catch (const std::exception &e) {
            error = e.what();
        }
        lock.lock();

        if (!error.empty()) {
            writer_error_ = error;
            // Discard everything and unblock the producer.
            for (std::size_t i = 0; i < slots_.size(); ++i) {
                slots_[i].entries.clear();
                slots_[i].state = SlotState::Empty;
            }
            cv_empty_.notify_all();
            return;
        }

        ++stats_.frames_written;
        stats_.bytes_written += frame.encoded_size();
        transition(drain_idx_, SlotState::Empty);
        drain_idx_ = (drain_idx_ + 1) % slots_.size();
        cv_empty_.notify_all();
    }
}

CollectorStats Collector::close() {
    {
        std::unique_lock lock(mu_);
        if (closed_)
            return stats_;
        Slot &slot = slots_[fill_idx_];
        if (slot.state == SlotState::Filling && !slot.entries.empty())
            transition(fill_idx_, SlotState::Full);  // partial final frame
        shutdown_ = true;
        closed_ = true;
        cv_full_.notify_all();
    }
    writer_.join();

    std::unique_lock lock(mu_);
    std::string sink_error;
    if (cfg_.close_sink) {
        try {
            sink_->close();
        } catch (const std::exception &e) {
            sink_error = e.what();
        }
    }
    if (!writer_error_.empty() || !sink_error.empty())
        throw IoError("elog sink failure: " + (writer_error_.empty() ? sink_error : writer_error_));
    return stats_;
}

CollectorStats Collector::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

bool Collector::failed() const {
    std::lock_guard lock(mu_);
    return !writer_error_.empty();
}

} // namespace nqc2
