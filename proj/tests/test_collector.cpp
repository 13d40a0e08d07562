// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <memory>
#include <random>
#include <vector>

#include "nqc2/collector.hpp"
#include "nqc2/sink.hpp"
#include "test_util.hpp"

using namespace nqc2;
using testutil::TempPath;

namespace {

struct Transition {
    std::size_t slot;
    SlotState from;
    SlotState to;
};

// Sink that throws after a configurable number of frames.
class FailingSink : public FrameSink {
  public:
    explicit FailingSink(std::uint64_t fail_after) : fail_after_(fail_after) {}
    void write_frame(const elog::ExecFrame &) override {
        if (written_ >= fail_after_)
            throw IoError("disk full");
        ++written_;
    }
    std::uint64_t bytes_written() const override { return 0; }

  private:
    std::uint64_t fail_after_;
    std::uint64_t written_ = 0;
};

} // namespace

TEST_CASE("merging extends the previous entry only for exactly adjacent ranges") {
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.n_buffers = 2;
    cfg.capacity = 16;
    Collector c(cfg, sink);
    c.record(0x1000, 0x1010, 5);
    c.record(0x1010, 0x1020, 7);   // adjacent: merge
    c.record(0x2000, 0x2004, 1);   // gap: new entry
    c.record(0x2000, 0x2004, 1);   // same range again, not adjacent: new entry
    const auto stats = c.close();

    CHECK(stats.events_recorded == 4);
    CHECK(stats.entries_merged == 1);
    CHECK(stats.frames_written == 1);

    const auto frames = sink->frames();
    REQUIRE(frames.size() == 1);
    REQUIRE(frames[0].entries.size() == 3);
    CHECK(frames[0].entries[0] == elog::ExecEntry{12, 0x1000, 0x1020});
    CHECK(frames[0].entries[1] == elog::ExecEntry{1, 0x2000, 0x2004});
    CHECK(frames[0].entries[2] == elog::ExecEntry{1, 0x2000, 0x2004});
}

TEST_CASE("merge disabled keeps adjacent entries separate") {
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.capacity = 8;
    cfg.merge_enabled = false;
    Collector c(cfg, sink);
    c.record(0x1000, 0x1010);
    c.record(0x1010, 0x1020);
    const auto stats = c.close();
    CHECK(stats.entries_merged == 0);
    REQUIRE(sink->frames().size() == 1);
    CHECK(sink->frames()[0].entries.size() == 2);
}

TEST_CASE("a self-loop TB still merges when it chains back to back") {
    // [a, a+n) followed by [a, a+n) only merges when end == start, i.e. never
    // for a plain re-execution.
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.capacity = 8;
    Collector c(cfg, sink);
    for (int i = 0; i < 3; ++i)
        c.record(0x1000, 0x1008);
    const auto stats = c.close();
    CHECK(stats.entries_merged == 0);
    CHECK(sink->frames()[0].entries.size() == 3);
}

TEST_CASE("a fully contiguous chain collapses into one entry") {
    // Capacity counts entries, not events, so merging keeps the buffer from
    // ever filling.
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.n_buffers = 4;
    cfg.capacity = 2;
    Collector c(cfg, sink);
    std::uint64_t addr = 0x1000;
    for (int i = 0; i < 6; ++i) {
        c.record(addr, addr + 0x10);
        addr += 0x10;
    }
    const auto stats = c.close();
    CHECK(stats.entries_merged == 5);
    CHECK(stats.frames_written == 1);
    REQUIRE(sink->frames().size() == 1);
    CHECK(sink->frames()[0].entries == std::vector<elog::ExecEntry>{{0, 0x1000, 0x1060}});
}

TEST_CASE("merging never crosses a buffer boundary") {
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.n_buffers = 4;
    cfg.capacity = 2;
    Collector c(cfg, sink);
    // Each buffer fills on a non-adjacent event; the following event chains
    // onto the previous buffer's last entry and must still start a new one.
    c.record(0x1000, 0x1010);
    c.record(0x2000, 0x2010);  // buffer 0 full
    c.record(0x2010, 0x2020);  // adjacent to the flushed entry: no merge
    c.record(0x3000, 0x3010);  // buffer 1 full
    c.record(0x3010, 0x3020);  // adjacent again: no merge
    const auto stats = c.close();
    CHECK(stats.entries_merged == 0);
    CHECK(stats.frames_written == 3);
    const auto frames = sink->frames();
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].entries.size() == 2);
    CHECK(frames[1].entries.size() == 2);
    CHECK(frames[2].entries.size() == 1);
    CHECK(frames[1].entries[0] == elog::ExecEntry{0, 0x2010, 0x2020});
}

TEST_CASE("partial final buffer is flushed at close") {
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.capacity = 100;
    Collector c(cfg, sink);
    c.record(0x1000, 0x1004);
    c.record(0x2000, 0x2004);
    const auto stats = c.close();
    CHECK(stats.frames_written == 1);
    REQUIRE(sink->frames().size() == 1);
    CHECK(sink->frames()[0].entries.size() == 2);

    // And nothing is written when no events arrived.
    auto sink2 = std::make_shared<CaptureSink>();
    Collector c2(cfg, sink2);
    CHECK(c2.close().frames_written == 0);
    CHECK(sink2->frames().empty());
}

TEST_CASE("slot transitions follow the buffer lifecycle discipline") {
    std::vector<Transition> log;
    auto sink = std::make_shared<CaptureSink>();
    CollectorConfig cfg;
    cfg.n_buffers = 2;
    cfg.capacity = 4;
    cfg.on_transition = [&](std::size_t slot, SlotState from, SlotState to) {
        log.push_back({slot, from, to});
    };
    Collector c(cfg, sink);
    for (int i = 0; i < 10; ++i)
        c.record(0x1000 + 0x100 * i, 0x1010 + 0x100 * i);
    c.close();

    // Every observed transition must be one of the four legal edges.
    for (const auto &t : log) {
        const bool legal = (t.from == SlotState::Empty && t.to == SlotState::Filling) ||
                           (t.from == SlotState::Filling && t.to == SlotState::Full) ||
                           (t.from == SlotState::Full && t.to == SlotState::Flushing) ||
                           (t.from == SlotState::Flushing && t.to == SlotState::Empty);
        if (!legal)
            FAIL("illegal transition on slot ", t.slot, ": ", slot_state_name(t.from), " -> ",
                 slot_state_name(t.to));
    }
    // 10 events, capacity 4: two full buffers plus a partial one.
    int fills = 0;
    for (const auto &t : log)
        fills += (t.to == SlotState::Full);
    CHECK(fills == 3);
}

TEST_CASE("single buffer: one congestion wait per full rotation") {
    auto sink = std::make_shared<CountingSink>();
    CollectorConfig cfg;
    cfg.n_buffers = 1;
    cfg.capacity = 512;
    Collector c(cfg, sink);
    for (int i = 0; i < 5120; ++i)
        c.record(0x1000, 0x1004);  // non-adjacent, one entry per event
    const auto stats = c.close();
    CHECK(stats.congestion_waits == 10);
    CHECK(stats.frames_written == 10);
}

TEST_CASE("stats and sink byte counts agree with the codec") {
    auto sink = std::make_shared<CountingSink>();
    CollectorConfig cfg;
    cfg.capacity = 7;
    Collector c(cfg, sink);
    for (int i = 0; i < 25; ++i)
        c.record(0x1000, 0x1004);
    const auto stats = c.close();
    CHECK(stats.frames_written == 4);  // 7 + 7 + 7 + 4
    const std::uint64_t expected = 3 * (16 + 20 * 7) + (16 + 20 * 4);
    CHECK(stats.bytes_written == expected);
    CHECK(sink->bytes_written() == elog::kPreambleSize + expected);
}

TEST_CASE("randomized streams are recorded losslessly through a file") {
    TempPath tmp(".elog");
    std::mt19937_64 rng(2024);
    std::vector<Event> events;
    std::uint64_t prev_end = 0x4000;
    for (int i = 0; i < 20000; ++i) {
        Event ev;
        ev.start = (rng() % 2 == 0) ? prev_end : 0x1000 + (rng() % 0x100000) * 4;
        ev.end = ev.start + 4 + (rng() % 16) * 4;
        ev.duration_ns = static_cast<std::uint32_t>(rng() % 1000);
        prev_end = ev.end;
        events.push_back(ev);
    }

    CollectorConfig cfg;
    cfg.n_buffers = 3;
    cfg.capacity = 257;
    {
        Collector c(cfg, std::make_shared<FileSink>(tmp.str()));
        for (const Event &ev : events)
            c.record(ev.start, ev.end, ev.duration_ns);
        const auto stats = c.close();
        CHECK(stats.events_recorded == events.size());
    }

    const auto blocks = testutil::decode_file(tmp.str());
    CHECK(testutil::counts_from_blocks(blocks) == testutil::oracle_counts(events));

    // Total recorded duration survives merging too.
    std::uint64_t want = 0, got = 0;
    for (const Event &ev : events)
        want += ev.duration_ns;
    for (const auto &b : blocks)
        if (const auto *f = std::get_if<elog::ExecFrame>(&b))
            for (const auto &e : f->entries)
                got += e.duration_ns;
    CHECK(got == want);
}

TEST_CASE("argument validation") {
    auto sink = std::make_shared<CountingSink>();
    CHECK_THROWS_AS(Collector(CollectorConfig{.n_buffers = 0}, sink), InvalidParam);
    CHECK_THROWS_AS(Collector(CollectorConfig{.capacity = 0}, sink), InvalidParam);
    CHECK_THROWS_AS(Collector(CollectorConfig{}, nullptr), InvalidParam);

    Collector c(CollectorConfig{}, sink);
    CHECK_THROWS_AS(c.record(0x1000, 0x1000), InvalidRange);
    CHECK_THROWS_AS(c.record(0x1000, 0x0fff), InvalidRange);
    c.close();
    CHECK_THROWS_AS(c.record(0x1000, 0x1004), ClosedCollector);
}

TEST_CASE("close is idempotent and repeats the same stats") {
    auto sink = std::make_shared<CountingSink>();
    Collector c(CollectorConfig{.capacity = 4}, sink);
    c.record(0x1000, 0x1004);
    const auto s1 = c.close();
    const auto s2 = c.close();
    CHECK(s1.events_recorded == s2.events_recorded);
    CHECK(s1.frames_written == s2.frames_written);
}

TEST_CASE("a failing sink never wedges the producer and surfaces at close") {
    CollectorConfig cfg;
    cfg.n_buffers = 2;
    cfg.capacity = 4;
    Collector c(cfg, std::make_shared<FailingSink>(1));
    // Far more events than the ring holds; must not deadlock.
    for (int i = 0; i < 1000; ++i)
        c.record(0x1000, 0x1004);
    CHECK(c.failed());
    CHECK_THROWS_AS(c.close(), IoError);
    // After the throwing close the collector stays closed and quiet.
    CHECK_NOTHROW(c.close());
}

TEST_CASE("file sink rejects unwritable paths") {
    CHECK_THROWS_AS(FileSink("/nonexistent-dir/x/y.elog"), IoError);
}
