// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/linemap.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace nqc2 {

LineMap::LineMap(std::vector<LineMapRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].size < 1)
            throw MalformedLineMap("record size must be >= 1", i + 1);
        if (i > 0) {
            const LineMapRecord &prev = records_[i - 1];
            if (records_[i].addr < prev.addr)
                throw MalformedLineMap("records not sorted by address", i + 1);
            if (records_[i].addr < prev.addr + prev.size)
                throw MalformedLineMap("overlapping records", i + 1);
        }
    }
}

std::size_t LineMap::lower_bound(std::uint64_t a) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), a,
                               [](const LineMapRecord &r, std::uint64_t v) { return r.addr < v; });
    return static_cast<std::size_t>(it - records_.begin());
}

LineMap parse_line_map(std::istream &in) {
    std::vector<LineMapRecord> records;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ss(line);
        LineMapRecord rec;
        std::string addr_tok;
        if (!(ss >> addr_tok >> rec.size >> rec.file >> rec.line))
            throw MalformedLineMap("bad record at line " + std::to_string(lineno), lineno);
        try {
            rec.addr = std::stoull(addr_tok, nullptr, 0);
        } catch (const std::exception &) {
            throw MalformedLineMap("bad address at line " + std::to_string(lineno), lineno);
        }
        if (rec.line < 1)
            throw MalformedLineMap("line numbers are 1-based, line " + std::to_string(lineno), lineno);
        records.push_back(std::move(rec));
    }
    try {
        return LineMap(std::move(records));
    } catch (MalformedLineMap &e) {
        throw;  // already carries the record index
    }
}

LineMap load_line_map(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open line map: " + path);
    return parse_line_map(in);
}

void write_line_map(std::ostream &out, const LineMap &map) {
    char buf[32];
    for (const LineMapRecord &r : map.records()) {
        std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(r.addr));
        out << buf << ' ' << r.size << ' ' << r.file << ' ' << r.line << '\n';
    }
}

} // namespace nqc2
