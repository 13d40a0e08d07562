// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/coverage.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nqc2 {

namespace {

void fold_entry(const elog::ExecEntry &entry, const LineMap &map, std::vector<std::uint64_t> &record_counts,
                std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> &residuals) {
    const auto &records = map.records();
    const std::uint64_t s = entry.start;
    const std::uint64_t e = entry.end;

    for (std::size_t i = map.lower_bound(s); i < records.size() && records[i].addr < e; ++i)
        ++record_counts[i];

    // Gaps of [s, e) not covered by any record's [addr, addr+size).
    std::uint64_t cursor = s;
    std::size_t j = map.lower_bound(s);
    if (j > 0 && records[j - 1].addr + records[j - 1].size > s)
        --j;
    for (; j < records.size() && records[j].addr < e && cursor < e; ++j) {
        if (records[j].addr > cursor)
            residuals[{cursor, std::min<std::uint64_t>(records[j].addr, e)}] += 1;
        cursor = std::max(cursor, records[j].addr + records[j].size);
    }
    if (cursor < e)
        residuals[{cursor, e}] += 1;
}

// Percentage in tenths, rounded half-up. 0 of 0 counts as fully covered.
std::string percent_str(std::uint64_t hit, std::uint64_t total) {
    std::uint64_t tenths = 1000;
    if (total != 0)
        tenths = (hit * 2000 + total) / (2 * total);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu.%llu%%", static_cast<unsigned long long>(tenths / 10),
                  static_cast<unsigned long long>(tenths % 10));
    return buf;
}

} // namespace

CoverageCounts accumulate(const std::vector<elog::Block> &blocks, const LineMap &map) {
    std::vector<std::uint64_t> record_counts(map.size(), 0);
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> residuals;

    for (const elog::Block &block : blocks) {
        const auto *frame = std::get_if<elog::ExecFrame>(&block);
        if (!frame)
            continue;
        for (const elog::ExecEntry &entry : frame->entries)
            fold_entry(entry, map, record_counts, residuals);
    }

    CoverageCounts counts;
    counts.record_counts = std::move(record_counts);
    const auto &records = map.records();
    for (std::size_t i = 0; i < records.size(); ++i) {
        // First (lowest-address) instruction of a line defines its count.
        counts.lines[records[i].file].try_emplace(records[i].line, counts.record_counts[i]);
    }
    counts.residuals.reserve(residuals.size());
    for (const auto &[range, n] : residuals)
        counts.residuals.push_back(ResidualRange{range.first, range.second, n});
    return counts;
}

CoverageCounts accumulate(std::istream &elog_in, const LineMap &map) {
    return accumulate(elog::read_all_blocks(elog_in), map);
}

std::size_t emit_lcov(const CoverageCounts &counts, std::ostream &out) {
    std::string text;
    for (const auto &[file, lines] : counts.lines) {
        text += "SF:" + file + "\n";
        std::uint64_t hit = 0;
        for (const auto &[line, count] : lines) {
            text += "DA:" + std::to_string(line) + "," + std::to_string(count) + "\n";
            if (count > 0)
                ++hit;
        }
        text += "LF:" + std::to_string(lines.size()) + "\n";
        text += "LH:" + std::to_string(hit) + "\n";
        text += "end_of_record\n";
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw IoError("failed to write lcov output");
    return text.size();
}

std::string summarize(const CoverageCounts &counts) {
    std::ostringstream out;
    std::uint64_t total_lines = 0;
    std::uint64_t total_hit = 0;
    for (const auto &[file, lines] : counts.lines) {
        std::uint64_t hit = 0;
        for (const auto &[line, count] : lines)
            if (count > 0)
                ++hit;
        out << file << ": " << hit << "/" << lines.size() << " lines (" << percent_str(hit, lines.size())
            << ")\n";
        total_lines += lines.size();
        total_hit += hit;
    }
    out << "total: " << total_hit << "/" << total_lines << " lines ("
        << percent_str(total_hit, total_lines) << ")\n";
    if (!counts.residuals.empty()) {
        out << "unmapped executed ranges:\n";
        char buf[64];
        for (const ResidualRange &r : counts.residuals) {
            std::snprintf(buf, sizeof buf, "  0x%llx-0x%llx x%llu\n",
                          static_cast<unsigned long long>(r.start), static_cast<unsigned long long>(r.end),
                          static_cast<unsigned long long>(r.count));
            out << buf;
        }
    }
    return out.str();
}

std::string convert_elog_to_lcov(const std::string &elog_path, const std::string &linemap_path,
                                 const std::string &out_path) {
    const LineMap map = load_line_map(linemap_path);
    std::ifstream in(elog_path, std::ios::binary);
    if (!in)
        throw IoError("cannot open elog: " + elog_path);
    const CoverageCounts counts = accumulate(in, map);

    const std::string tmp_path = out_path + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open output: " + tmp_path);
        emit_lcov(counts, out);
        out.flush();
        if (!out)
            throw IoError("failed writing output: " + tmp_path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, out_path, ec);
    if (ec) {
        std::filesystem::remove(tmp_path);
        throw IoError("cannot rename " + tmp_path + " to " + out_path + ": " + ec.message());
    }
    return summarize(counts);
}

} // namespace nqc2
