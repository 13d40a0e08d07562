// Copyright (c) 2026 The nqc2 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nqc2/errors.hpp"

// A stand-in QEMU host: implements the TCG plugin ABI surface, dlopens the
// plugin shared library, and drives its translate/exec/exit callbacks from a
// script. Lets the plugin be tested end to end without QEMU.

namespace nqc2::mockhost {

struct ScriptOp {
    enum class Kind { Translate, Exec, Exit };
    Kind kind = Kind::Translate;
    std::uint64_t tb_id = 0;                  // Translate, Exec
    std::uint64_t start = 0;                  // Translate: guest address of first insn
    std::vector<std::uint32_t> insn_sizes;    // Translate
    std::uint32_t vcpu = 0;                   // Exec
};

using Script = std::vector<ScriptOp>;

inline ScriptOp translate(std::uint64_t tb_id, std::uint64_t start, std::vector<std::uint32_t> sizes) {
    return ScriptOp{ScriptOp::Kind::Translate, tb_id, start, std::move(sizes), 0};
}
inline ScriptOp exec(std::uint64_t tb_id, std::uint32_t vcpu = 0) {
    return ScriptOp{ScriptOp::Kind::Exec, tb_id, 0, {}, vcpu};
}
inline ScriptOp exit_op() { return ScriptOp{ScriptOp::Kind::Exit, 0, 0, {}, 0}; }

// Throws ScriptError on an exec for a never-translated TB or an empty/zero
// instruction list.
void validate_script(const Script &script);

// Per-byte-address execution counts implied by the script (execs after the
// first Exit are dropped by the plugin and not counted).
std::map<std::uint64_t, std::uint64_t> script_address_counts(const Script &script);

// Loads the plugin, calls its install entry point with the given argument
// strings, then drives the script through the registered callbacks. The
// script is fully validated before any plugin call.
void run_script(const Script &script, const std::string &plugin_path,
                const std::vector<std::string> &plugin_args);

} // namespace nqc2::mockhost
