// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/elog.hpp"

#include <cstring>

namespace nqc2::elog {

namespace {

void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_text(std::vector<std::uint8_t> &out, const std::string &s, std::size_t width) {
    // Fixed-width field: truncate, zero-pad.
    for (std::size_t i = 0; i < width; ++i)
        out.push_back(i < s.size() ? static_cast<std::uint8_t>(s[i]) : 0);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | b[off + static_cast<std::size_t>(i)];
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | b[off + static_cast<std::size_t>(i)];
    return v;
}

std::string get_text(std::span<const std::uint8_t> b, std::size_t off, std::size_t width) {
    const char *p = reinterpret_cast<const char *>(b.data() + off);
    return std::string(p, strnlen(p, width));
}

void append_header(std::vector<std::uint8_t> &out, const BlockHeader &h) {
    put_u16(out, h.block_type);
    put_u16(out, h.unit_id);
    put_u32(out, h.payload_len);
}

InfoBlock decode_info_payload(std::span<const std::uint8_t> p) {
    InfoBlock b;
    b.version_major = get_u16(p, 0);
    b.version_minor = get_u16(p, 2);
    b.flags = get_u32(p, 4);
    b.tool_name = get_text(p, 8, kToolNameSize);
    return b;
}

ArchBlock decode_arch_payload(std::span<const std::uint8_t> p) {
    ArchBlock b;
    b.arch_id = get_u32(p, 0);
    b.guest_word_bits = get_u32(p, 4);
    b.arch_name = get_text(p, 8, kArchNameSize);
    return b;
}

ExecFrame decode_exec_payload(std::uint16_t unit_id, std::span<const std::uint8_t> p,
                              std::uint64_t offset) {
    if (p.size() < kExecHeaderSize || (p.size() - kExecHeaderSize) % kEntrySize != 0 ||
        p.size() == kExecHeaderSize) {
        throw MalformedExecFrame("exec frame payload length " + std::to_string(p.size()) +
                                     " is not 8 + 20k (k >= 1) at offset " + std::to_string(offset),
                                 offset);
    }
    ExecFrame f;
    f.unit_id = unit_id;
    f.start_time_ns = get_u64(p, 0);
    const std::size_t n = (p.size() - kExecHeaderSize) / kEntrySize;
    f.entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = kExecHeaderSize + i * kEntrySize;
        ExecEntry e;
        e.duration_ns = get_u32(p, base);
        e.start = get_u64(p, base + 4);
        e.end = get_u64(p, base + 12);
        f.entries.push_back(e);
    }
    return f;
}

} // namespace

std::array<std::uint8_t, kHeaderSize> encode_header(const BlockHeader &h) {
    std::array<std::uint8_t, kHeaderSize> out{};
    out[0] = static_cast<std::uint8_t>(h.block_type & 0xff);
    out[1] = static_cast<std::uint8_t>(h.block_type >> 8);
    out[2] = static_cast<std::uint8_t>(h.unit_id & 0xff);
    out[3] = static_cast<std::uint8_t>(h.unit_id >> 8);
    for (int i = 0; i < 4; ++i)
        out[4 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((h.payload_len >> (8 * i)) & 0xff);
    return out;
}

BlockHeader decode_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize)
        throw TruncatedBlock("block header needs 8 bytes, got " + std::to_string(bytes.size()));
    BlockHeader h;
    h.block_type = get_u16(bytes, 0);
    h.unit_id = get_u16(bytes, 2);
    h.payload_len = get_u32(bytes, 4);
    return h;
}

std::vector<std::uint8_t> encode_exec_frame(const ExecFrame &f) {
    if (f.entries.empty())
        throw EmptyFrame("exec frame has no entries");
    std::vector<std::uint8_t> out;
    out.reserve(f.encoded_size());
    BlockHeader h;
    h.block_type = kBlockExec;
    h.unit_id = f.unit_id;
    h.payload_len = static_cast<std::uint32_t>(kExecHeaderSize + kEntrySize * f.entries.size());
    append_header(out, h);
    put_u64(out, f.start_time_ns);
    for (const ExecEntry &e : f.entries) {
        put_u32(out, e.duration_ns);
        put_u64(out, e.start);
        put_u64(out, e.end);
    }
    return out;
}

std::vector<std::uint8_t> encode_preamble(const ConfigPreamble &p) {
    std::vector<std::uint8_t> out;
    out.reserve(kPreambleSize);
    append_header(out, BlockHeader{kBlockInfo, 0, kInfoPayloadSize});
    put_u16(out, p.info.version_major);
    put_u16(out, p.info.version_minor);
    put_u32(out, p.info.flags);
    put_text(out, p.info.tool_name, kToolNameSize);
    append_header(out, BlockHeader{kBlockArch, 0, kArchPayloadSize});
    put_u32(out, p.arch.arch_id);
    put_u32(out, p.arch.guest_word_bits);
    put_text(out, p.arch.arch_name, kArchNameSize);
    return out;
}

std::size_t write_config_preamble(std::ostream &out, const ConfigPreamble &p) {
    const std::vector<std::uint8_t> bytes = encode_preamble(p);
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("failed to write config preamble");
    return bytes.size();
}

std::optional<Block> BlockReader::next() {
    std::uint8_t hdr[kHeaderSize];
    in_.read(reinterpret_cast<char *>(hdr), kHeaderSize);
    const std::size_t got = static_cast<std::size_t>(in_.gcount());
    if (got == 0)
        return std::nullopt;
    if (got < kHeaderSize)
        throw TruncatedBlock("truncated block header at offset " + std::to_string(offset_), offset_);

    const BlockHeader h = decode_header(hdr);
    std::vector<std::uint8_t> payload(h.payload_len);
    if (h.payload_len > 0) {
        in_.read(reinterpret_cast<char *>(payload.data()), static_cast<std::streamsize>(h.payload_len));
        if (static_cast<std::size_t>(in_.gcount()) < h.payload_len)
            throw TruncatedBlock("truncated payload at offset " + std::to_string(offset_), offset_);
    }
    const std::uint64_t block_offset = offset_;
    offset_ += kHeaderSize + h.payload_len;

    switch (h.block_type) {
    case kBlockExec:
        return decode_exec_payload(h.unit_id, payload, block_offset);
    case kBlockInfo:
        if (payload.size() == kInfoPayloadSize)
            return decode_info_payload(payload);
        break;
    case kBlockArch:
        if (payload.size() == kArchPayloadSize)
            return decode_arch_payload(payload);
        break;
    default:
        break;
    }
    return UnknownBlock{h, std::move(payload)};
}

std::vector<Block> read_all_blocks(std::istream &in) {
    BlockReader reader(in);
    std::vector<Block> blocks;
    while (auto b = reader.next())
        blocks.push_back(std::move(*b));
    return blocks;
}

std::uint64_t predict_file_size(std::uint64_t n_tb, std::uint64_t e_buf) {
    if (e_buf == 0)
        throw InvalidParam("e_buf must be >= 1");
    const std::uint64_t frames = n_tb / e_buf;
    const std::uint64_t rest = n_tb % e_buf;
    std::uint64_t size = kPreambleSize + frames * (kHeaderSize + kExecHeaderSize + e_buf * kEntrySize);
    if (rest != 0)
        size += kHeaderSize + kExecHeaderSize + rest * kEntrySize;
    return size;
}

double size_ratio(std::uint64_t e_buf) {
    if (e_buf == 0)
        throw InvalidParam("e_buf must be >= 1");
    return (4.0 / 9.0) / static_cast<double>(e_buf) + 5.0 / 9.0;
}

} // namespace nqc2::elog
