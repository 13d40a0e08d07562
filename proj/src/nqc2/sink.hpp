// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nqc2/elog.hpp"
#include "nqc2/errors.hpp"

namespace nqc2 {

// Consumer of encoded frames. One sink may be shared by several collectors;
// implementations must serialize at whole-frame granularity.
class FrameSink {
  public:
    virtual ~FrameSink() = default;
    virtual void write_frame(const elog::ExecFrame &frame) = 0;
    virtual void close() {}
    virtual std::uint64_t bytes_written() const = 0;
};

// Writes the preamble on open and frames as they arrive.
class FileSink : public FrameSink {
  public:
    explicit FileSink(const std::string &path, elog::ConfigPreamble preamble = {});
    ~FileSink() override;

    void write_frame(const elog::ExecFrame &frame) override;
    void close() override;
    std::uint64_t bytes_written() const override;

  private:
    std::ofstream out_;
    std::string path_;
    mutable std::mutex mu_;
    std::uint64_t bytes_ = 0;
    bool closed_ = false;
};

// Counts bytes as a file sink would, without touching the filesystem.
class CountingSink : public FrameSink {
  public:
    CountingSink() : bytes_(elog::kPreambleSize) {}
    void write_frame(const elog::ExecFrame &frame) override {
        std::lock_guard lock(mu_);
        bytes_ += frame.encoded_size();
    }
    std::uint64_t bytes_written() const override {
        std::lock_guard lock(mu_);
        return bytes_;
    }

  private:
    mutable std::mutex mu_;
    std::uint64_t bytes_;
};

// Keeps decoded frames in memory for inspection in tests.
class CaptureSink : public FrameSink {
  public:
    void write_frame(const elog::ExecFrame &frame) override {
        std::lock_guard lock(mu_);
        frames_.push_back(frame);
        bytes_ += frame.encoded_size();
    }
    std::uint64_t bytes_written() const override {
        std::lock_guard lock(mu_);
        return elog::kPreambleSize + bytes_;
    }
    std::vector<elog::ExecFrame> frames() const {
        std::lock_guard lock(mu_);
        return frames_;
    }

  private:
    mutable std::mutex mu_;
    std::vector<elog::ExecFrame> frames_;
    std::uint64_t bytes_ = 0;
};

// Injects a fixed per-frame write latency in front of another sink. Used by
// the harness to emulate slow storage without touching the collector.
class LatencySink : public FrameSink {
  public:
    LatencySink(std::shared_ptr<FrameSink> inner, std::uint64_t latency_ns)
        : inner_(std::move(inner)), latency_ns_(latency_ns) {}

    void write_frame(const elog::ExecFrame &frame) override {
        if (latency_ns_ > 0)
            std::this_thread::sleep_for(std::chrono::nanoseconds(latency_ns_));
        inner_->write_frame(frame);
    }
    void close() override { inner_->close(); }
    std::uint64_t bytes_written() const override { return inner_->bytes_written(); }

  private:
    std::shared_ptr<FrameSink> inner_;
    std::uint64_t latency_ns_;
};

} // namespace nqc2
