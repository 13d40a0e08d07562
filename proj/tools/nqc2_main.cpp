// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the libnqc2 C API: inspect elog files, convert
// them to lcov, run synthetic collector experiments and evaluate the size
// model. Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqc2/nqc2.h"

namespace {

int runtime_error(int rc) {
    std::fprintf(stderr, "error: %s\n", nqc2_last_error());
    return rc < 0 ? 2 : 0;
}

bool parse_merge(const std::string &value, int &merge) {
    if (value == "on")
        merge = 1;
    else if (value == "off")
        merge = 0;
    else
        return false;
    return true;
}

int cmd_inspect(const std::string &elog, bool as_json) {
    nqc2_reader *reader = nullptr;
    int rc = nqc2_reader_open(elog.c_str(), &reader);
    if (rc != NQC2_OK)
        return runtime_error(rc);

    nlohmann::json json_blocks = nlohmann::json::array();
    nqc2_block_info info;
    while ((rc = nqc2_reader_next(reader, &info)) == 1) {
        if (as_json) {
            json_blocks.push_back({{"offset", info.offset},
                                   {"type", info.block_type},
                                   {"unit", info.unit_id},
                                   {"payload_len", info.payload_len},
                                   {"entries", info.entry_count},
                                   {"start_time_ns", info.start_time_ns},
                                   {"duration_ns", info.duration_ns}});
        } else {
            std::printf("%-10" PRIu64 " type=%-5u unit=%-3u len=%-8u", info.offset, info.block_type,
                        info.unit_id, info.payload_len);
            if (info.block_type == 1)
                std::printf(" entries=%-6u t=[%" PRIu64 ", %" PRIu64 "]", info.entry_count,
                            info.start_time_ns, info.start_time_ns + info.duration_ns);
            std::printf("\n");
        }
    }
    if (as_json)
        std::printf("%s\n", json_blocks.dump(2).c_str());
    if (rc < 0) {
        std::fprintf(stderr, "error at offset %" PRIu64 ": %s\n", nqc2_reader_offset(reader),
                     nqc2_last_error());
        nqc2_reader_close(reader);
        return 2;
    }
    nqc2_reader_close(reader);
    return 0;
}

int cmd_convert(const std::string &elog, const std::string &linemap, const std::string &out,
                bool summary) {
    char *summary_text = nullptr;
    const int rc = nqc2_convert(elog.c_str(), linemap.c_str(), out.c_str(),
                                summary ? &summary_text : nullptr);
    if (rc != NQC2_OK)
        return runtime_error(rc);
    if (summary_text) {
        std::printf("%s", summary_text);
        nqc2_string_free(summary_text);
    }
    return 0;
}

void print_result(const nqc2_run_result &r) {
    std::printf("events=%" PRIu64 " merged=%" PRIu64 " frames=%" PRIu64 " congestion_waits=%" PRIu64
                " file_bytes=%" PRIu64 " wall_ns=%" PRIu64 "\n",
                r.stats.events_recorded, r.stats.entries_merged, r.stats.frames_written,
                r.stats.congestion_waits, r.file_bytes, r.wall_ns);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"nqc2 trace toolchain: elog inspection, lcov conversion, collector experiments"};
    app.require_subcommand(1);

    // inspect
    auto *inspect = app.add_subcommand("inspect", "List the blocks of an elog file");
    std::string elog_path;
    bool as_json = false;
    inspect->add_option("--elog", elog_path, "elog file")->required();
    inspect->add_flag("--json", as_json, "emit a machine-readable JSON array");

    // convert
    auto *convert = app.add_subcommand("convert", "Convert an elog to an lcov info file");
    std::string linemap_path, out_info;
    bool with_summary = false;
    convert->add_option("--elog", elog_path, "elog file")->required();
    convert->add_option("--linemap", linemap_path, "address-to-line map file")->required();
    convert->add_option("-o,--out", out_info, "output lcov info file")->required();
    convert->add_flag("--summary", with_summary, "print a per-file coverage summary");

    // simulate / sweep shared stream flags
    nqc2_stream_spec spec;
    nqc2_stream_spec_default(&spec);
    nqc2_run_config run_cfg;
    nqc2_run_config_default(&run_cfg);
    std::string merge_str = "on";
    std::string out_elog, stats_csv;

    auto add_stream_flags = [&](CLI::App *cmd) {
        cmd->add_option("--events", spec.n_events, "number of TB-execution events")->required();
        cmd->add_option("--contig", spec.contiguity_prob, "contiguity probability p in [0,1]");
        cmd->add_option("--seed", spec.seed, "stream RNG seed (default printed)");
        cmd->add_option("--units", spec.n_units, "number of vCPUs");
        cmd->add_option("--tb-min", spec.tb_size_min, "minimum TB size in bytes");
        cmd->add_option("--tb-max", spec.tb_size_max, "maximum TB size in bytes");
        cmd->add_option("--event-cost", run_cfg.producer_cost_ns, "per-event producer cost (ns)");
    };

    auto *simulate = app.add_subcommand("simulate", "Replay a synthetic stream through a collector");
    add_stream_flags(simulate);
    simulate->add_option("--buffers", run_cfg.n_buffers, "buffer count (>= 1)");
    simulate->add_option("--capacity", run_cfg.capacity, "entries per buffer (>= 1)");
    simulate->add_option("--merge", merge_str, "merge adjacent entries: on|off");
    simulate->add_option("--latency", run_cfg.writer_latency_ns, "injected per-frame write latency (ns)");
    simulate->add_option("--out", out_elog, "write the elog to this path");
    simulate->add_option("--stats", stats_csv, "write a one-row CSV to this path");

    auto *sweep = app.add_subcommand("sweep", "Run a grid of collector configurations");
    std::vector<std::uint32_t> sweep_buffers{1, 2, 4, 8, 16};
    std::vector<std::uint64_t> sweep_caps{512, 8192, 65536};
    std::vector<std::string> sweep_merges{"on"};
    std::vector<std::uint64_t> sweep_latencies{0};
    add_stream_flags(sweep);
    sweep->add_option("--buffers", sweep_buffers, "buffer counts")->delimiter(',');
    sweep->add_option("--capacities", sweep_caps, "buffer capacities")->delimiter(',');
    sweep->add_option("--merge", sweep_merges, "merge settings (on,off)")->delimiter(',');
    sweep->add_option("--latencies", sweep_latencies, "injected write latencies (ns)")->delimiter(',');
    sweep->add_option("--stats", stats_csv, "output CSV path")->required();

    // predict
    auto *predict = app.add_subcommand("predict", "Evaluate the analytic elog size model");
    std::uint64_t predict_tb = 0, predict_cap = 0;
    predict->add_option("--tb", predict_tb, "recorded TB executions")->required();
    predict->add_option("--capacity", predict_cap, "entries per buffer (>= 1)")->required();

    // gen-linemap
    auto *genmap = app.add_subcommand("gen-linemap", "Build a line map via an external symbolizer");
    std::string symbolizer_cmd, out_linemap;
    std::uint32_t step = 4;
    genmap->add_option("--elog", elog_path, "elog whose executed addresses to symbolize")->required();
    genmap->add_option("--symbolizer", symbolizer_cmd, "addr2line-style command")->required();
    genmap->add_option("--step", step, "address sampling step in bytes");
    genmap->add_option("-o,--out", out_linemap, "output line map path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    if (inspect->parsed())
        return cmd_inspect(elog_path, as_json);

    if (convert->parsed())
        return cmd_convert(elog_path, linemap_path, out_info, with_summary);

    if (simulate->parsed()) {
        if (!parse_merge(merge_str, run_cfg.merge_enabled)) {
            std::fprintf(stderr, "error: --merge must be on or off\n");
            return 1;
        }
        std::printf("seed: %" PRIu64 "\n", spec.seed);
        nqc2_run_result result;
        int rc = nqc2_simulate(&spec, &run_cfg, out_elog.empty() ? nullptr : out_elog.c_str(), &result);
        if (rc != NQC2_OK)
            return runtime_error(rc);
        print_result(result);
        if (!stats_csv.empty()) {
            std::FILE *f = std::fopen(stats_csv.c_str(), "w");
            if (!f) {
                std::fprintf(stderr, "error: cannot open %s\n", stats_csv.c_str());
                return 2;
            }
            std::fprintf(f,
                         "n_buffers,capacity,merge,latency_ns,events,merged,frames,congestion_waits,"
                         "file_bytes,wall_ns\n");
            std::fprintf(f, "%u,%" PRIu64 ",%s,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                            ",%" PRIu64 ",%" PRIu64 "\n",
                         run_cfg.n_buffers, run_cfg.capacity, run_cfg.merge_enabled ? "on" : "off",
                         run_cfg.writer_latency_ns, result.stats.events_recorded,
                         result.stats.entries_merged, result.stats.frames_written,
                         result.stats.congestion_waits, result.file_bytes, result.wall_ns);
            std::fclose(f);
        }
        return 0;
    }

    if (sweep->parsed()) {
        std::vector<int> merges;
        for (const std::string &m : sweep_merges) {
            int v;
            if (!parse_merge(m, v)) {
                std::fprintf(stderr, "error: --merge entries must be on or off\n");
                return 1;
            }
            merges.push_back(v);
        }
        std::printf("seed: %" PRIu64 "\n", spec.seed);
        const int rc =
            nqc2_sweep(&spec, sweep_buffers.data(), sweep_buffers.size(), sweep_caps.data(),
                       sweep_caps.size(), merges.data(), merges.size(), sweep_latencies.data(),
                       sweep_latencies.size(), run_cfg.producer_cost_ns, stats_csv.c_str());
        if (rc != NQC2_OK)
            return runtime_error(rc);
        std::printf("wrote %s\n", stats_csv.c_str());
        return 0;
    }

    if (predict->parsed()) {
        std::uint64_t bytes = 0, bytes_unbuffered = 0;
        int rc = nqc2_predict_file_size(predict_tb, predict_cap, &bytes);
        if (rc == NQC2_OK)
            rc = nqc2_predict_file_size(predict_tb, 1, &bytes_unbuffered);
        if (rc != NQC2_OK)
            return runtime_error(rc);
        double asymptotic = 0.0;
        nqc2_size_ratio(predict_cap, &asymptotic);
        std::printf("predicted bytes: %" PRIu64 "\n", bytes);
        std::printf("bytes at capacity 1: %" PRIu64 "\n", bytes_unbuffered);
        std::printf("ratio vs capacity 1: %.4f (model: %.4f)\n",
                    static_cast<double>(bytes) / static_cast<double>(bytes_unbuffered), asymptotic);
        return 0;
    }

    if (genmap->parsed()) {
        std::uint64_t skipped = 0;
        const int rc =
            nqc2_gen_linemap(elog_path.c_str(), symbolizer_cmd.c_str(), step, out_linemap.c_str(),
                             &skipped);
        if (rc != NQC2_OK)
            return runtime_error(rc);
        std::printf("wrote %s (%" PRIu64 " unresolved addresses skipped)\n", out_linemap.c_str(),
                    skipped);
        return 0;
    }

    return 1;
}
