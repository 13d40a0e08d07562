// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nqc2 {

enum class Errc {
    invalid_param = 1,
    invalid_range,
    truncated_block,
    malformed_exec_frame,
    empty_frame,
    io,
    closed_collector,
    malformed_line_map,
    symbolizer,
    script,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

struct InvalidParam : Error {
    explicit InvalidParam(const std::string &msg) : Error(Errc::invalid_param, msg) {}
};

struct InvalidRange : Error {
    explicit InvalidRange(const std::string &msg) : Error(Errc::invalid_range, msg) {}
};

// Decode error at a known file offset.
struct TruncatedBlock : Error {
    explicit TruncatedBlock(const std::string &msg, std::uint64_t offset = 0)
        : Error(Errc::truncated_block, msg), offset(offset) {}
    std::uint64_t offset;
};

struct MalformedExecFrame : Error {
    explicit MalformedExecFrame(const std::string &msg, std::uint64_t offset = 0)
        : Error(Errc::malformed_exec_frame, msg), offset(offset) {}
    std::uint64_t offset;
};

struct EmptyFrame : Error {
    explicit EmptyFrame(const std::string &msg) : Error(Errc::empty_frame, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string &msg) : Error(Errc::io, msg) {}
};

struct ClosedCollector : Error {
    explicit ClosedCollector(const std::string &msg) : Error(Errc::closed_collector, msg) {}
};

struct MalformedLineMap : Error {
    explicit MalformedLineMap(const std::string &msg, std::uint64_t line = 0)
        : Error(Errc::malformed_line_map, msg), line(line) {}
    std::uint64_t line;
};

struct SymbolizerError : Error {
    explicit SymbolizerError(const std::string &msg) : Error(Errc::symbolizer, msg) {}
};

struct ScriptError : Error {
    explicit ScriptError(const std::string &msg) : Error(Errc::script, msg) {}
};

} // namespace nqc2
