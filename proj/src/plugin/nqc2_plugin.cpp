// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0
//
// QEMU TCG plugin that records TB executions into an elog file, one collector
// per vCPU. Loaded as:
//   qemu-system-aarch64 ... -plugin libnqc2-tcg-plugin.so,out=run.elog,buffers=4,capacity=8192,merge=on

#include <atomic>
#include <cstdio>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nqc2/collector.hpp"
#include "plugin/qemu-plugin-api.h"

extern "C" {
QEMU_PLUGIN_EXPORT int qemu_plugin_version = QEMU_PLUGIN_VERSION;
}

namespace {

using namespace nqc2;

struct TbDescriptor {
    std::uint64_t start;
    std::uint64_t end;  // one past the last instruction byte
};

struct PluginArgs {
    std::string out = "nqc2.elog";
    std::uint32_t buffers = 4;
    std::uint64_t capacity = 8192;
    bool merge = true;
    bool timing = false;
};

struct VcpuState {
    std::unique_ptr<Collector> collector;
    std::uint64_t last_exec_ns = 0;
};

struct PluginState {
    PluginArgs args;
    std::shared_ptr<FileSink> sink;
    std::mutex mu;  // guards vcpus growth and descriptor storage
    std::deque<VcpuState> vcpus;
    std::deque<TbDescriptor> descriptors;  // stable addresses, live until exit
    std::atomic<std::uint64_t> dropped{0};
    std::atomic<bool> shutting_down{false};
    bool active = false;
};

PluginState g_state;

bool parse_bool(const std::string &v, bool &out) {
    if (v == "on" || v == "true" || v == "1") {
        out = true;
        return true;
    }
    if (v == "off" || v == "false" || v == "0") {
        out = false;
        return true;
    }
    return false;
}

bool parse_args(int argc, char **argv, PluginArgs &args) {
    for (int i = 0; i < argc; ++i) {
        // QEMU passes one key=value per argv entry; accept comma-joined too.
        std::string arg(argv[i]);
        std::size_t pos = 0;
        while (pos <= arg.size()) {
            const std::size_t comma = arg.find(',', pos);
            const std::string kv = arg.substr(pos, comma == std::string::npos ? comma : comma - pos);
            pos = comma == std::string::npos ? arg.size() + 1 : comma + 1;
            if (kv.empty())
                continue;
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "nqc2: bad plugin argument '%s'\n", kv.c_str());
                return false;
            }
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            try {
                if (key == "out") {
                    args.out = value;
                    if (args.out.empty())
                        return false;
                } else if (key == "buffers") {
                    args.buffers = static_cast<std::uint32_t>(std::stoul(value));
                    if (args.buffers < 1)
                        return false;
                } else if (key == "capacity") {
                    args.capacity = std::stoull(value);
                    if (args.capacity < 1)
                        return false;
                } else if (key == "merge") {
                    if (!parse_bool(value, args.merge))
                        return false;
                } else if (key == "timing") {
                    if (!parse_bool(value, args.timing))
                        return false;
                } else {
                    std::fprintf(stderr, "nqc2: unknown plugin argument '%s'\n", key.c_str());
                    return false;
                }
            } catch (const std::exception &) {
                std::fprintf(stderr, "nqc2: bad value in '%s'\n", kv.c_str());
                return false;
            }
        }
    }
    return true;
}

VcpuState &vcpu_state(unsigned int vcpu_index) {
    std::lock_guard lock(g_state.mu);
    if (g_state.vcpus.size() <= vcpu_index)
        g_state.vcpus.resize(vcpu_index + 1);
    VcpuState &v = g_state.vcpus[vcpu_index];
    if (!v.collector) {
        CollectorConfig cfg;
        cfg.n_buffers = g_state.args.buffers;
        cfg.capacity = g_state.args.capacity;
        cfg.merge_enabled = g_state.args.merge;
        cfg.timing_enabled = g_state.args.timing;
        cfg.unit_id = static_cast<std::uint16_t>(vcpu_index);
        cfg.close_sink = false;
        v.collector = std::make_unique<Collector>(cfg, g_state.sink);
    }
    return v;
}

void vcpu_tb_exec(unsigned int vcpu_index, void *userdata) {
    // Must never fail into the host: every error path degrades to a drop.
    if (g_state.shutting_down.load(std::memory_order_acquire)) {
        g_state.dropped.fetch_add(1, std::memory_order_relaxed);
        return;
    }
    try {
        const auto *tb = static_cast<const TbDescriptor *>(userdata);
        VcpuState &v = vcpu_state(vcpu_index);
        if (v.collector->failed()) {
            g_state.dropped.fetch_add(1, std::memory_order_relaxed);
            return;
        }
        std::uint32_t duration = 0;
        if (g_state.args.timing) {
            const std::uint64_t now = v.collector->now_ns();
            if (v.last_exec_ns != 0) {
                const std::uint64_t delta = now - v.last_exec_ns;
                duration = delta > UINT32_MAX ? UINT32_MAX : static_cast<std::uint32_t>(delta);
            }
            v.last_exec_ns = now;
        }
        v.collector->record(tb->start, tb->end, duration);
    } catch (...) {
        g_state.dropped.fetch_add(1, std::memory_order_relaxed);
    }
}

void vcpu_tb_trans(qemu_plugin_id_t, struct qemu_plugin_tb *tb) {
    try {
        const size_t n = qemu_plugin_tb_n_insns(tb);
        if (n == 0)
            return;
        struct qemu_plugin_insn *first = qemu_plugin_tb_get_insn(tb, 0);
        struct qemu_plugin_insn *last = qemu_plugin_tb_get_insn(tb, n - 1);
        TbDescriptor desc;
        desc.start = qemu_plugin_insn_vaddr(first);
        desc.end = qemu_plugin_insn_vaddr(last) + qemu_plugin_insn_size(last);
        TbDescriptor *stored;
        {
            std::lock_guard lock(g_state.mu);
            g_state.descriptors.push_back(desc);
            stored = &g_state.descriptors.back();
        }
        qemu_plugin_register_vcpu_tb_exec_cb(tb, vcpu_tb_exec, QEMU_PLUGIN_CB_NO_REGS, stored);
    } catch (...) {
        // drop this TB's instrumentation rather than disturb the host
    }
}

void at_exit(qemu_plugin_id_t, void *) {
    g_state.shutting_down.store(true, std::memory_order_release);
    CollectorStats total;
    std::lock_guard lock(g_state.mu);
    for (VcpuState &v : g_state.vcpus) {
        if (!v.collector)
            continue;
        try {
            total += v.collector->close();
        } catch (const std::exception &e) {
            total += v.collector->stats();
            std::fprintf(stderr, "nqc2: %s\n", e.what());
        }
    }
    try {
        g_state.sink->close();
    } catch (const std::exception &e) {
        std::fprintf(stderr, "nqc2: %s\n", e.what());
    }
    std::fprintf(stderr,
                 "nqc2: %llu events, %llu merged, %llu frames, %llu congestion waits, "
                 "%llu frame bytes, %llu dropped -> %s\n",
                 static_cast<unsigned long long>(total.events_recorded),
                 static_cast<unsigned long long>(total.entries_merged),
                 static_cast<unsigned long long>(total.frames_written),
                 static_cast<unsigned long long>(total.congestion_waits),
                 static_cast<unsigned long long>(total.bytes_written),
                 static_cast<unsigned long long>(g_state.dropped.load()), g_state.args.out.c_str());
    g_state.active = false;
}

} // namespace

extern "C" QEMU_PLUGIN_EXPORT int qemu_plugin_install(qemu_plugin_id_t id, const qemu_info_t *info,
                                                      int argc, char **argv) {
    PluginArgs args;
    if (!parse_args(argc, argv, args))
        return 1;

    // Fresh state; supports a second install after a completed run.
    g_state.args = args;
    g_state.vcpus.clear();
    g_state.descriptors.clear();
    g_state.dropped.store(0);
    g_state.shutting_down.store(false);

    elog::ConfigPreamble preamble;
    if (info && info->target_name)
        preamble.arch.arch_name = info->target_name;
    try {
        g_state.sink = std::make_shared<FileSink>(args.out, preamble);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "nqc2: %s\n", e.what());
        return 1;
    }
    g_state.active = true;

    qemu_plugin_register_vcpu_tb_trans_cb(id, vcpu_tb_trans);
    qemu_plugin_register_atexit_cb(id, at_exit, nullptr);
    return 0;
}
