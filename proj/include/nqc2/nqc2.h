/* Copyright (c) 2026 The nqc2 Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the nqc2 trace toolchain: elog inspection, the size model,
 * collectors, synthetic replay experiments, and lcov conversion. All
 * functions return 0 on success or a negative nqc2_errc; the thread-local
 * message of the most recent failure is available via nqc2_last_error().
 */

#ifndef NQC2_H
#define NQC2_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum nqc2_errc {
    NQC2_OK = 0,
    NQC2_ERR_INVALID_PARAM = -1,
    NQC2_ERR_INVALID_RANGE = -2,
    NQC2_ERR_TRUNCATED = -3,
    NQC2_ERR_MALFORMED = -4,
    NQC2_ERR_EMPTY_FRAME = -5,
    NQC2_ERR_IO = -6,
    NQC2_ERR_CLOSED = -7,
    NQC2_ERR_LINEMAP = -8,
    NQC2_ERR_SYMBOLIZER = -9,
    NQC2_ERR_SCRIPT = -10,
    NQC2_ERR_FAILURE = -100,
};

/* Message of the last failing call on this thread. Never NULL. */
const char *nqc2_last_error(void);

/* Frees strings returned through char** out-parameters. */
void nqc2_string_free(char *s);

/* ---- elog reading ------------------------------------------------------- */

typedef struct nqc2_reader nqc2_reader;

typedef struct nqc2_block_info {
    uint64_t offset;        /* byte offset of the block in the file */
    uint16_t block_type;
    uint16_t unit_id;
    uint32_t payload_len;
    uint32_t entry_count;   /* exec frames only, else 0 */
    uint64_t start_time_ns; /* exec frames only, else 0 */
    uint64_t duration_ns;   /* sum of entry durations, exec frames only */
} nqc2_block_info;

int nqc2_reader_open(const char *elog_path, nqc2_reader **out);
/* 1: block decoded, 0: end of file, <0: error (offset still reported). */
int nqc2_reader_next(nqc2_reader *reader, nqc2_block_info *out);
uint64_t nqc2_reader_offset(const nqc2_reader *reader);
void nqc2_reader_close(nqc2_reader *reader);

/* ---- size model --------------------------------------------------------- */

int nqc2_predict_file_size(uint64_t n_tb, uint64_t e_buf, uint64_t *out_bytes);
int nqc2_size_ratio(uint64_t e_buf, double *out_ratio);

/* ---- collector ---------------------------------------------------------- */

typedef struct nqc2_collector nqc2_collector;

typedef struct nqc2_collector_config {
    uint32_t n_buffers;   /* >= 1 */
    uint64_t capacity;    /* entries per buffer, >= 1 */
    int merge_enabled;
    int timing_enabled;
    uint16_t unit_id;
} nqc2_collector_config;

typedef struct nqc2_stats {
    uint64_t events_recorded;
    uint64_t entries_merged;
    uint64_t frames_written;
    uint64_t congestion_waits;
    uint64_t bytes_written;
} nqc2_stats;

/* Creates the elog file, writes the preamble and starts the writer thread. */
int nqc2_collector_open(const char *elog_path, const nqc2_collector_config *cfg, nqc2_collector **out);
int nqc2_collector_record(nqc2_collector *c, uint64_t start, uint64_t end, uint32_t duration_ns);
int nqc2_collector_stats(const nqc2_collector *c, nqc2_stats *out);
/* Flushes, joins the writer, closes the file. Frees the handle either way. */
int nqc2_collector_close(nqc2_collector *c, nqc2_stats *out_stats);

/* ---- synthetic replay experiments --------------------------------------- */

typedef struct nqc2_stream_spec {
    uint64_t n_events;
    double contiguity_prob;   /* [0, 1] */
    uint32_t tb_size_min;     /* bytes */
    uint32_t tb_size_max;
    uint64_t addr_lo;
    uint64_t addr_hi;
    uint64_t seed;
    uint32_t n_units;
} nqc2_stream_spec;

typedef struct nqc2_run_config {
    uint32_t n_buffers;
    uint64_t capacity;
    int merge_enabled;
    uint64_t writer_latency_ns; /* injected per frame at the sink */
    uint64_t producer_cost_ns;  /* busy-wait charged per event */
} nqc2_run_config;

typedef struct nqc2_run_result {
    nqc2_stats stats;
    uint64_t file_bytes;
    uint64_t wall_ns;
} nqc2_run_result;

void nqc2_stream_spec_default(nqc2_stream_spec *spec);
void nqc2_run_config_default(nqc2_run_config *cfg);

/* elog_path may be NULL: sizes are then computed without touching disk. */
int nqc2_simulate(const nqc2_stream_spec *spec, const nqc2_run_config *cfg, const char *elog_path,
                  nqc2_run_result *out);

/* Full grid sweep; writes the CSV (header + one row per cell) to csv_path. */
int nqc2_sweep(const nqc2_stream_spec *spec, const uint32_t *n_buffers, size_t n_buffers_len,
               const uint64_t *capacities, size_t capacities_len, const int *merges, size_t merges_len,
               const uint64_t *latencies_ns, size_t latencies_len, uint64_t producer_cost_ns,
               const char *csv_path);

/* ---- coverage conversion ------------------------------------------------ */

/* Writes the lcov info file atomically. If out_summary is non-NULL it
 * receives the per-file summary table (free with nqc2_string_free). */
int nqc2_convert(const char *elog_path, const char *linemap_path, const char *out_info_path,
                 char **out_summary);

/* Builds a line map by piping the addresses executed in an elog through an
 * external addr2line-style command, sampling every `step` bytes. */
int nqc2_gen_linemap(const char *elog_path, const char *symbolizer_cmd, uint32_t step,
                     const char *out_linemap_path, uint64_t *out_skipped);

#ifdef __cplusplus
}
#endif

#endif /* NQC2_H */
