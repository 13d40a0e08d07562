// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/nqc2.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "nqc2/collector.hpp"
#include "nqc2/coverage.hpp"
#include "nqc2/elog.hpp"
#include "nqc2/replay.hpp"
#include "nqc2/symbolize.hpp"

namespace {

thread_local std::string t_last_error = "";

int set_error(const std::exception &e) {
    t_last_error = e.what();
    const auto *err = dynamic_cast<const nqc2::Error *>(&e);
    if (!err)
        return NQC2_ERR_FAILURE;
    switch (err->code()) {
    case nqc2::Errc::invalid_param:
        return NQC2_ERR_INVALID_PARAM;
    case nqc2::Errc::invalid_range:
        return NQC2_ERR_INVALID_RANGE;
    case nqc2::Errc::truncated_block:
        return NQC2_ERR_TRUNCATED;
    case nqc2::Errc::malformed_exec_frame:
        return NQC2_ERR_MALFORMED;
    case nqc2::Errc::empty_frame:
        return NQC2_ERR_EMPTY_FRAME;
    case nqc2::Errc::io:
        return NQC2_ERR_IO;
    case nqc2::Errc::closed_collector:
        return NQC2_ERR_CLOSED;
    case nqc2::Errc::malformed_line_map:
        return NQC2_ERR_LINEMAP;
    case nqc2::Errc::symbolizer:
        return NQC2_ERR_SYMBOLIZER;
    case nqc2::Errc::script:
        return NQC2_ERR_SCRIPT;
    }
    return NQC2_ERR_FAILURE;
}

int bad_param(const char *msg) {
    t_last_error = msg;
    return NQC2_ERR_INVALID_PARAM;
}

nqc2_stats to_c_stats(const nqc2::CollectorStats &s) {
    return nqc2_stats{s.events_recorded, s.entries_merged, s.frames_written, s.congestion_waits,
                      s.bytes_written};
}

nqc2::StreamSpec to_stream_spec(const nqc2_stream_spec &s) {
    nqc2::StreamSpec spec;
    spec.n_events = s.n_events;
    spec.contiguity_prob = s.contiguity_prob;
    spec.tb_size_min = s.tb_size_min;
    spec.tb_size_max = s.tb_size_max;
    spec.addr_lo = s.addr_lo;
    spec.addr_hi = s.addr_hi;
    spec.seed = s.seed;
    spec.n_units = s.n_units;
    return spec;
}

} // namespace

extern "C" {

const char *nqc2_last_error(void) { return t_last_error.c_str(); }

void nqc2_string_free(char *s) { std::free(s); }

/* ---- elog reading ------------------------------------------------------- */

struct nqc2_reader {
    std::ifstream in;
    std::unique_ptr<nqc2::elog::BlockReader> reader;
};

int nqc2_reader_open(const char *elog_path, nqc2_reader **out) {
    if (!elog_path || !out)
        return bad_param("elog_path and out must be non-NULL");
    auto r = std::make_unique<nqc2_reader>();
    r->in.open(elog_path, std::ios::binary);
    if (!r->in) {
        t_last_error = std::string("cannot open elog: ") + elog_path;
        return NQC2_ERR_IO;
    }
    r->reader = std::make_unique<nqc2::elog::BlockReader>(r->in);
    *out = r.release();
    return NQC2_OK;
}

int nqc2_reader_next(nqc2_reader *reader, nqc2_block_info *out) {
    if (!reader || !out)
        return bad_param("reader and out must be non-NULL");
    try {
        const std::uint64_t offset = reader->reader->offset();
        auto block = reader->reader->next();
        if (!block)
            return 0;
        *out = nqc2_block_info{};
        out->offset = offset;
        if (const auto *frame = std::get_if<nqc2::elog::ExecFrame>(&*block)) {
            out->block_type = nqc2::elog::kBlockExec;
            out->unit_id = frame->unit_id;
            out->payload_len = static_cast<uint32_t>(nqc2::elog::kExecHeaderSize +
                                                     nqc2::elog::kEntrySize * frame->entries.size());
            out->entry_count = static_cast<uint32_t>(frame->entries.size());
            out->start_time_ns = frame->start_time_ns;
            for (const auto &e : frame->entries)
                out->duration_ns += e.duration_ns;
        } else if (std::get_if<nqc2::elog::InfoBlock>(&*block)) {
            out->block_type = nqc2::elog::kBlockInfo;
            out->payload_len = nqc2::elog::kInfoPayloadSize;
        } else if (std::get_if<nqc2::elog::ArchBlock>(&*block)) {
            out->block_type = nqc2::elog::kBlockArch;
            out->payload_len = nqc2::elog::kArchPayloadSize;
        } else {
            const auto &unknown = std::get<nqc2::elog::UnknownBlock>(*block);
            out->block_type = unknown.header.block_type;
            out->unit_id = unknown.header.unit_id;
            out->payload_len = unknown.header.payload_len;
        }
        return 1;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

uint64_t nqc2_reader_offset(const nqc2_reader *reader) {
    return reader ? reader->reader->offset() : 0;
}

void nqc2_reader_close(nqc2_reader *reader) { delete reader; }

/* ---- size model --------------------------------------------------------- */

int nqc2_predict_file_size(uint64_t n_tb, uint64_t e_buf, uint64_t *out_bytes) {
    if (!out_bytes)
        return bad_param("out_bytes must be non-NULL");
    try {
        *out_bytes = nqc2::elog::predict_file_size(n_tb, e_buf);
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

int nqc2_size_ratio(uint64_t e_buf, double *out_ratio) {
    if (!out_ratio)
        return bad_param("out_ratio must be non-NULL");
    try {
        *out_ratio = nqc2::elog::size_ratio(e_buf);
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

/* ---- collector ---------------------------------------------------------- */

struct nqc2_collector {
    std::unique_ptr<nqc2::Collector> impl;
};

int nqc2_collector_open(const char *elog_path, const nqc2_collector_config *cfg, nqc2_collector **out) {
    if (!elog_path || !cfg || !out)
        return bad_param("elog_path, cfg and out must be non-NULL");
    try {
        nqc2::CollectorConfig cc;
        cc.n_buffers = cfg->n_buffers;
        cc.capacity = cfg->capacity;
        cc.merge_enabled = cfg->merge_enabled != 0;
        cc.timing_enabled = cfg->timing_enabled != 0;
        cc.unit_id = cfg->unit_id;
        auto sink = std::make_shared<nqc2::FileSink>(elog_path);
        auto handle = std::make_unique<nqc2_collector>();
        handle->impl = std::make_unique<nqc2::Collector>(cc, std::move(sink));
        *out = handle.release();
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

int nqc2_collector_record(nqc2_collector *c, uint64_t start, uint64_t end, uint32_t duration_ns) {
    if (!c)
        return bad_param("collector must be non-NULL");
    try {
        c->impl->record(start, end, duration_ns);
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

int nqc2_collector_stats(const nqc2_collector *c, nqc2_stats *out) {
    if (!c || !out)
        return bad_param("collector and out must be non-NULL");
    *out = to_c_stats(c->impl->stats());
    return NQC2_OK;
}

int nqc2_collector_close(nqc2_collector *c, nqc2_stats *out_stats) {
    if (!c)
        return bad_param("collector must be non-NULL");
    std::unique_ptr<nqc2_collector> owned(c);
    try {
        const nqc2::CollectorStats stats = owned->impl->close();
        if (out_stats)
            *out_stats = to_c_stats(stats);
        return NQC2_OK;
    } catch (const std::exception &e) {
        if (out_stats)
            *out_stats = to_c_stats(owned->impl->stats());
        return set_error(e);
    }
}

/* ---- synthetic replay experiments --------------------------------------- */

void nqc2_stream_spec_default(nqc2_stream_spec *spec) {
    if (!spec)
        return;
    const nqc2::StreamSpec d;
    *spec = nqc2_stream_spec{d.n_events, d.contiguity_prob, d.tb_size_min, d.tb_size_max,
                             d.addr_lo,  d.addr_hi,         d.seed,        d.n_units};
}

void nqc2_run_config_default(nqc2_run_config *cfg) {
    if (!cfg)
        return;
    const nqc2::ReplayOptions d;
    *cfg = nqc2_run_config{d.n_buffers, d.capacity, d.merge_enabled ? 1 : 0, d.writer_latency_ns,
                           d.producer_cost_ns};
}

int nqc2_simulate(const nqc2_stream_spec *spec, const nqc2_run_config *cfg, const char *elog_path,
                  nqc2_run_result *out) {
    if (!spec || !cfg || !out)
        return bad_param("spec, cfg and out must be non-NULL");
    try {
        const std::vector<nqc2::Event> events = nqc2::gen_stream(to_stream_spec(*spec));
        nqc2::ReplayOptions opts;
        opts.n_buffers = cfg->n_buffers;
        opts.capacity = cfg->capacity;
        opts.merge_enabled = cfg->merge_enabled != 0;
        opts.writer_latency_ns = cfg->writer_latency_ns;
        opts.producer_cost_ns = cfg->producer_cost_ns;
        if (elog_path)
            opts.elog_path = elog_path;
        const nqc2::ExperimentResult r = nqc2::replay(events, opts);
        out->stats = to_c_stats(r.stats);
        out->file_bytes = r.file_bytes;
        out->wall_ns = r.wall_ns;
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

int nqc2_sweep(const nqc2_stream_spec *spec, const uint32_t *n_buffers, size_t n_buffers_len,
               const uint64_t *capacities, size_t capacities_len, const int *merges, size_t merges_len,
               const uint64_t *latencies_ns, size_t latencies_len, uint64_t producer_cost_ns,
               const char *csv_path) {
    if (!spec || !csv_path || !n_buffers || !capacities || !merges || !latencies_ns)
        return bad_param("spec, grid arrays and csv_path must be non-NULL");
    try {
        nqc2::SweepGrid grid;
        grid.n_buffers.assign(n_buffers, n_buffers + n_buffers_len);
        grid.capacities.assign(capacities, capacities + capacities_len);
        grid.merges.clear();
        for (size_t i = 0; i < merges_len; ++i)
            grid.merges.push_back(merges[i] != 0);
        grid.latencies_ns.assign(latencies_ns, latencies_ns + latencies_len);
        const std::string csv = nqc2::sweep_csv(to_stream_spec(*spec), grid, producer_cost_ns);

        const std::string tmp = std::string(csv_path) + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw nqc2::IoError("cannot open output: " + tmp);
            out << csv;
            if (!out)
                throw nqc2::IoError("failed writing output: " + tmp);
        }
        std::filesystem::rename(tmp, csv_path);
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

/* ---- coverage conversion ------------------------------------------------ */

int nqc2_convert(const char *elog_path, const char *linemap_path, const char *out_info_path,
                 char **out_summary) {
    if (!elog_path || !linemap_path || !out_info_path)
        return bad_param("elog_path, linemap_path and out_info_path must be non-NULL");
    try {
        const std::string summary = nqc2::convert_elog_to_lcov(elog_path, linemap_path, out_info_path);
        if (out_summary) {
            *out_summary = static_cast<char *>(std::malloc(summary.size() + 1));
            if (*out_summary)
                std::memcpy(*out_summary, summary.c_str(), summary.size() + 1);
        }
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

int nqc2_gen_linemap(const char *elog_path, const char *symbolizer_cmd, uint32_t step,
                     const char *out_linemap_path, uint64_t *out_skipped) {
    if (!elog_path || !symbolizer_cmd || !out_linemap_path)
        return bad_param("elog_path, symbolizer_cmd and out_linemap_path must be non-NULL");
    try {
        const auto ranges = nqc2::elog_address_ranges(elog_path);
        const nqc2::SymbolizeResult result = nqc2::symbolize_ranges(ranges, symbolizer_cmd, step);
        const std::string tmp = std::string(out_linemap_path) + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw nqc2::IoError("cannot open output: " + tmp);
            nqc2::write_line_map(out, result.map);
            if (!out)
                throw nqc2::IoError("failed writing output: " + tmp);
        }
        std::filesystem::rename(tmp, out_linemap_path);
        if (out_skipped)
            *out_skipped = result.skipped;
        return NQC2_OK;
    } catch (const std::exception &e) {
        return set_error(e);
    }
}

} // extern "C"
