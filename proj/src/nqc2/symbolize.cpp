// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/symbolize.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "nqc2/elog.hpp"

namespace nqc2 {

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string &stem) {
        path = (std::filesystem::temp_directory_path() /
                (stem + "." + std::to_string(::getpid()) + "." +
                 std::to_string(reinterpret_cast<std::uintptr_t>(this))))
                   .string();
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

std::string shell_quote(const std::string &s) {
    std::string out = "'";
    for (char c : s)
        out += (c == '\'') ? std::string("'\\''") : std::string(1, c);
    out += "'";
    return out;
}

} // namespace

std::vector<AddressRange> elog_address_ranges(const std::string &elog_path) {
    std::ifstream in(elog_path, std::ios::binary);
    if (!in)
        throw IoError("cannot open elog: " + elog_path);
    std::vector<AddressRange> ranges;
    for (const elog::Block &block : elog::read_all_blocks(in)) {
        const auto *frame = std::get_if<elog::ExecFrame>(&block);
        if (!frame)
            continue;
        for (const elog::ExecEntry &e : frame->entries)
            ranges.push_back(AddressRange{e.start, e.end});
    }
    std::sort(ranges.begin(), ranges.end(),
              [](const AddressRange &a, const AddressRange &b) { return a.start < b.start; });
    // Coalesce overlapping/adjacent ranges.
    std::vector<AddressRange> merged;
    for (const AddressRange &r : ranges) {
        if (!merged.empty() && r.start <= merged.back().end)
            merged.back().end = std::max(merged.back().end, r.end);
        else
            merged.push_back(r);
    }
    return merged;
}

SymbolizeResult symbolize_ranges(const std::vector<AddressRange> &ranges, const std::string &command,
                                 std::uint32_t step) {
    if (step < 1)
        throw InvalidParam("step must be >= 1");
    if (command.empty())
        throw SymbolizerError("empty symbolizer command");

    std::vector<std::uint64_t> addrs;
    for (const AddressRange &r : ranges)
        for (std::uint64_t a = r.start; a < r.end; a += step)
            addrs.push_back(a);
    std::sort(addrs.begin(), addrs.end());
    addrs.erase(std::unique(addrs.begin(), addrs.end()), addrs.end());

    TempFile addr_file("nqc2-addrs");
    TempFile err_file("nqc2-symerr");
    {
        std::ofstream out(addr_file.path);
        char buf[32];
        for (std::uint64_t a : addrs) {
            std::snprintf(buf, sizeof buf, "0x%llx\n", static_cast<unsigned long long>(a));
            out << buf;
        }
        if (!out)
            throw IoError("cannot write address list: " + addr_file.path);
    }

    const std::string shell_cmd = "( " + command + " ) < " + shell_quote(addr_file.path) + " 2> " +
                                  shell_quote(err_file.path);
    FILE *pipe = popen(shell_cmd.c_str(), "r");
    if (!pipe)
        throw SymbolizerError("cannot launch symbolizer: " + command);

    std::vector<std::string> answers;
    char line[4096];
    while (fgets(line, sizeof line, pipe)) {
        std::string s(line);
        while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
            s.pop_back();
        answers.push_back(std::move(s));
    }
    const int status = pclose(pipe);
    if (status != 0)
        throw SymbolizerError("symbolizer failed (exit status " + std::to_string(status) +
                              "): " + read_file(err_file.path));
    if (answers.size() != addrs.size())
        throw SymbolizerError("symbolizer answered " + std::to_string(answers.size()) + " of " +
                              std::to_string(addrs.size()) + " addresses: " + read_file(err_file.path));

    SymbolizeResult result;
    std::vector<LineMapRecord> records;
    for (std::size_t i = 0; i < addrs.size(); ++i) {
        const std::string &ans = answers[i];
        // addr2line output: path:line, optionally followed by " (discriminator N)"
        std::string trimmed = ans.substr(0, ans.find(" ("));
        const auto colon = trimmed.rfind(':');
        if (colon == std::string::npos || trimmed.compare(0, 2, "??") == 0) {
            ++result.skipped;
            continue;
        }
        const std::string file = trimmed.substr(0, colon);
        unsigned long lineno = 0;
        try {
            lineno = std::stoul(trimmed.substr(colon + 1));
        } catch (const std::exception &) {
            ++result.skipped;
            continue;
        }
        if (file.empty() || file == "??" || lineno == 0) {
            ++result.skipped;
            continue;
        }
        records.push_back(LineMapRecord{addrs[i], step, file, static_cast<std::uint32_t>(lineno)});
    }
    // Sampled addresses can sit closer than `step` where ranges do not align;
    // clamp record sizes so the map stays non-overlapping.
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        const std::uint64_t gap = records[i + 1].addr - records[i].addr;
        if (gap < records[i].size)
            records[i].size = static_cast<std::uint32_t>(gap);
    }
    result.map = LineMap(std::move(records));
    return result;
}

} // namespace nqc2
