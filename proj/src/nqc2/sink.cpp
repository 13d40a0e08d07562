// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/sink.hpp"

namespace nqc2 {

FileSink::FileSink(const std::string &path, elog::ConfigPreamble preamble) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw IoError("cannot open elog file for writing: " + path);
    bytes_ = elog::write_config_preamble(out_, preamble);
}

FileSink::~FileSink() {
    try {
        close();
    } catch (...) {
        // destructor must not throw; close() reports errors when called directly
    }
}

void FileSink::write_frame(const elog::ExecFrame &frame) {
    const std::vector<std::uint8_t> bytes = elog::encode_exec_frame(frame);
    std::lock_guard lock(mu_);
    if (closed_)
        throw IoError("write to closed elog file: " + path_);
    out_.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out_)
        throw IoError("write failed on elog file: " + path_);
    bytes_ += bytes.size();
}

void FileSink::close() {
    std::lock_guard lock(mu_);
    if (closed_)
        return;
    closed_ = true;
    out_.flush();
    const bool ok = static_cast<bool>(out_);
    out_.close();
    if (!ok)
        throw IoError("flush failed on elog file: " + path_);
}

std::uint64_t FileSink::bytes_written() const {
    std::lock_guard lock(mu_);
    return bytes_;
}

} // namespace nqc2
