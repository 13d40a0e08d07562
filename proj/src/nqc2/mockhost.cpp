// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#include "nqc2/mockhost.hpp"

#include <dlfcn.h>

#include <memory>
#include <mutex>
#include <set>
#include <utility>

#include "plugin/qemu-plugin-api.h"

// The opaque host-side structures the plugin queries through the ABI.
extern "C" {
struct qemu_plugin_insn {
    uint64_t vaddr;
    uint32_t size;
};
struct qemu_plugin_tb {
    std::vector<qemu_plugin_insn> insns;
    std::vector<std::pair<qemu_plugin_vcpu_udata_cb_t, void *>> exec_cbs;
};
}

namespace nqc2::mockhost {

namespace {

struct HostState {
    qemu_plugin_vcpu_tb_trans_cb_t trans_cb = nullptr;
    std::vector<std::pair<qemu_plugin_udata_cb_t, void *>> atexit_cbs;
    std::vector<std::unique_ptr<qemu_plugin_tb>> tbs;
    qemu_plugin_id_t id = 1;
};

std::mutex g_mu;  // one mock run at a time
HostState g_host;

} // namespace

} // namespace nqc2::mockhost

// ABI implementation the plugin resolves against at load time.
extern "C" {

void qemu_plugin_register_vcpu_tb_trans_cb(qemu_plugin_id_t, qemu_plugin_vcpu_tb_trans_cb_t cb) {
    nqc2::mockhost::g_host.trans_cb = cb;
}

void qemu_plugin_register_vcpu_tb_exec_cb(struct qemu_plugin_tb *tb, qemu_plugin_vcpu_udata_cb_t cb,
                                          enum qemu_plugin_cb_flags, void *userdata) {
    tb->exec_cbs.emplace_back(cb, userdata);
}

void qemu_plugin_register_atexit_cb(qemu_plugin_id_t, qemu_plugin_udata_cb_t cb, void *userdata) {
    nqc2::mockhost::g_host.atexit_cbs.emplace_back(cb, userdata);
}

size_t qemu_plugin_tb_n_insns(const struct qemu_plugin_tb *tb) { return tb->insns.size(); }

struct qemu_plugin_insn *qemu_plugin_tb_get_insn(const struct qemu_plugin_tb *tb, size_t idx) {
    return const_cast<struct qemu_plugin_insn *>(&tb->insns[idx]);
}

uint64_t qemu_plugin_insn_vaddr(const struct qemu_plugin_insn *insn) { return insn->vaddr; }

size_t qemu_plugin_insn_size(const struct qemu_plugin_insn *insn) { return insn->size; }

} // extern "C"

namespace nqc2::mockhost {

void validate_script(const Script &script) {
    std::set<std::uint64_t> translated;
    for (std::size_t i = 0; i < script.size(); ++i) {
        const ScriptOp &op = script[i];
        switch (op.kind) {
        case ScriptOp::Kind::Translate:
            if (op.insn_sizes.empty())
                throw ScriptError("op " + std::to_string(i) + ": TB without instructions");
            for (std::uint32_t s : op.insn_sizes)
                if (s == 0)
                    throw ScriptError("op " + std::to_string(i) + ": zero-size instruction");
            translated.insert(op.tb_id);
            break;
        case ScriptOp::Kind::Exec:
            if (!translated.count(op.tb_id))
                throw ScriptError("op " + std::to_string(i) + ": exec of untranslated TB " +
                                  std::to_string(op.tb_id));
            break;
        case ScriptOp::Kind::Exit:
            break;
        }
    }
}

std::map<std::uint64_t, std::uint64_t> script_address_counts(const Script &script) {
    validate_script(script);
    std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> latest;  // tb_id -> [start, end)
    std::map<std::uint64_t, std::uint64_t> counts;
    for (const ScriptOp &op : script) {
        if (op.kind == ScriptOp::Kind::Exit)
            break;  // later execs are dropped by the plugin
        if (op.kind == ScriptOp::Kind::Translate) {
            std::uint64_t end = op.start;
            for (std::uint32_t s : op.insn_sizes)
                end += s;
            latest[op.tb_id] = {op.start, end};
        } else {
            const auto [start, end] = latest.at(op.tb_id);
            for (std::uint64_t a = start; a < end; ++a)
                ++counts[a];
        }
    }
    return counts;
}

void run_script(const Script &script, const std::string &plugin_path,
                const std::vector<std::string> &plugin_args) {
    validate_script(script);
    std::lock_guard lock(g_mu);
    g_host = HostState{};

    void *handle = dlopen(plugin_path.c_str(), RTLD_NOW | RTLD_LOCAL);
    if (!handle)
        throw IoError(std::string("dlopen failed: ") + dlerror());

    auto *version = static_cast<int *>(dlsym(handle, "qemu_plugin_version"));
    if (!version || *version > QEMU_PLUGIN_VERSION) {
        dlclose(handle);
        throw IoError("plugin has no compatible qemu_plugin_version");
    }
    using install_fn = int (*)(qemu_plugin_id_t, const qemu_info_t *, int, char **);
    auto install = reinterpret_cast<install_fn>(dlsym(handle, "qemu_plugin_install"));
    if (!install) {
        dlclose(handle);
        throw IoError("plugin does not export qemu_plugin_install");
    }

    qemu_info_t info{};
    info.target_name = "aarch64";
    info.version.min = QEMU_PLUGIN_VERSION;
    info.version.cur = QEMU_PLUGIN_VERSION;
    info.system_emulation = true;
    info.system.smp_vcpus = 4;
    info.system.max_vcpus = 8;

    std::vector<std::string> args_copy(plugin_args);
    std::vector<char *> argv;
    for (std::string &a : args_copy)
        argv.push_back(a.data());

    const int rc = install(g_host.id, &info, static_cast<int>(argv.size()), argv.data());
    if (rc != 0) {
        dlclose(handle);
        throw IoError("qemu_plugin_install returned " + std::to_string(rc));
    }

    std::map<std::uint64_t, qemu_plugin_tb *> latest;  // tb_id -> newest translation
    bool exited = false;
    for (const ScriptOp &op : script) {
        switch (op.kind) {
        case ScriptOp::Kind::Translate: {
            auto tb = std::make_unique<qemu_plugin_tb>();
            std::uint64_t addr = op.start;
            for (std::uint32_t s : op.insn_sizes) {
                tb->insns.push_back(qemu_plugin_insn{addr, s});
                addr += s;
            }
            latest[op.tb_id] = tb.get();
            if (g_host.trans_cb)
                g_host.trans_cb(g_host.id, tb.get());
            g_host.tbs.push_back(std::move(tb));
            break;
        }
        case ScriptOp::Kind::Exec: {
            qemu_plugin_tb *tb = latest.at(op.tb_id);
            for (auto &[cb, userdata] : tb->exec_cbs)
                cb(op.vcpu, userdata);
            break;
        }
        case ScriptOp::Kind::Exit:
            for (auto &[cb, userdata] : g_host.atexit_cbs)
                cb(g_host.id, userdata);
            exited = true;
            break;
        }
    }
    if (!exited) {
        // The plugin must be shut down before its code is unmapped.
        for (auto &[cb, userdata] : g_host.atexit_cbs)
            cb(g_host.id, userdata);
    }

    g_host = HostState{};
    dlclose(handle);
}

} // namespace nqc2::mockhost
