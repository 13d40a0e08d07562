// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nqc2/errors.hpp"

// The elog trace-file format: concatenated blocks, each an 8-byte packed
// header followed by a type-specific payload. Everything is little-endian on
// disk with no alignment padding between blocks.

namespace nqc2::elog {

constexpr std::size_t kHeaderSize = 8;
constexpr std::size_t kExecHeaderSize = 8;  // the per-frame timestamp
constexpr std::size_t kEntrySize = 20;
constexpr std::size_t kPreambleSize = 124;
constexpr std::size_t kInfoPayloadSize = 56;
constexpr std::size_t kArchPayloadSize = 52;
constexpr std::size_t kToolNameSize = 48;
constexpr std::size_t kArchNameSize = 44;

enum BlockType : std::uint16_t {
    kBlockInfo = 0,
    kBlockExec = 1,
    kBlockArch = 5,
};

struct BlockHeader {
    std::uint16_t block_type = 0;
    std::uint16_t unit_id = 0;
    std::uint32_t payload_len = 0;

    bool operator==(const BlockHeader &) const = default;
};

// One executed address range. `end` is exclusive (start + byte length of the
// TB's instructions), so contiguity of consecutive TBs is the exact equality
// prev.end == next.start.
struct ExecEntry {
    std::uint32_t duration_ns = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;

    bool operator==(const ExecEntry &) const = default;
};

struct ExecFrame {
    std::uint16_t unit_id = 0;
    std::uint64_t start_time_ns = 0;
    std::vector<ExecEntry> entries;

    bool operator==(const ExecFrame &) const = default;

    std::size_t encoded_size() const { return kHeaderSize + kExecHeaderSize + kEntrySize * entries.size(); }
};

struct InfoBlock {
    std::uint16_t version_major = 1;
    std::uint16_t version_minor = 0;
    std::uint32_t flags = 0;
    std::string tool_name = "nqc2";  // truncated/zero-padded to 48 bytes on disk

    bool operator==(const InfoBlock &) const = default;
};

struct ArchBlock {
    std::uint32_t arch_id = 0;
    std::uint32_t guest_word_bits = 64;
    std::string arch_name = "unknown";  // truncated/zero-padded to 44 bytes on disk

    bool operator==(const ArchBlock &) const = default;
};

struct ConfigPreamble {
    InfoBlock info;
    ArchBlock arch;

    bool operator==(const ConfigPreamble &) const = default;
};

// Unrecognized block types are carried verbatim so readers stay forward
// compatible: payload_len alone is enough to skip them.
struct UnknownBlock {
    BlockHeader header;
    std::vector<std::uint8_t> payload;

    bool operator==(const UnknownBlock &) const = default;
};

using Block = std::variant<ExecFrame, InfoBlock, ArchBlock, UnknownBlock>;

std::array<std::uint8_t, kHeaderSize> encode_header(const BlockHeader &h);
BlockHeader decode_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_exec_frame(const ExecFrame &f);
std::vector<std::uint8_t> encode_preamble(const ConfigPreamble &p);

// Writes the info and arch blocks at file start; returns the byte count (124).
std::size_t write_config_preamble(std::ostream &out, const ConfigPreamble &p);

// Sequential block decoder over a byte stream. Errors carry the byte offset
// of the offending block.
class BlockReader {
  public:
    explicit BlockReader(std::istream &in) : in_(in) {}

    // Decodes the next block, or nullopt at a clean end-of-file.
    std::optional<Block> next();

    std::uint64_t offset() const { return offset_; }

  private:
    std::istream &in_;
    std::uint64_t offset_ = 0;
};

// Decodes all blocks in file order.
std::vector<Block> read_all_blocks(std::istream &in);

// Analytic elog size model: preamble plus one 16-byte frame overhead per
// e_buf entries, with a partial final frame when n_tb is not divisible.
std::uint64_t predict_file_size(std::uint64_t n_tb, std::uint64_t e_buf);

// Size of a buffered elog relative to the unbuffered (e_buf = 1) one,
// preamble excluded: (4/9)/e_buf + 5/9.
double size_ratio(std::uint64_t e_buf);

} // namespace nqc2::elog
