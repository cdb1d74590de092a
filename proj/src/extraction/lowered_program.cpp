// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "lowered_program.hpp"

#include <unordered_map>

#include "sfip/errors.hpp"

namespace sfip::detail {

LoweredProgram::LoweredProgram(const Program& program) : n_(program.syscall_table_size) {
    FunctionIndex index(program);
    std::unordered_map<const Function*, std::uint32_t> ids;
    for (const Function* fn : index.functions()) {
        ids.emplace(fn, static_cast<std::uint32_t>(functions_.size()));
        functions_.push_back(LoweredFunction{fn, {}});
    }
    const Function* entry = index.find(program.entry);
    if (entry == nullptr) throw ContractViolation("entry function '" + program.entry + "' not found");
    entry_ = ids.at(entry);

    for (auto& lf : functions_) {
        const Function& fn = *lf.source;
        std::unordered_map<std::string, std::uint32_t> block_ids;
        for (std::size_t b = 0; b < fn.blocks.size(); ++b) block_ids.emplace(fn.blocks[b].id, static_cast<std::uint32_t>(b));
        for (const auto& block : fn.blocks) {
            LoweredBlock lb;
            for (const auto& succ : block.successors) lb.successors.push_back(block_ids.at(succ));
            for (const auto& insn : block.instructions) {
                if (const auto* site = std::get_if<SyscallSite>(&insn)) {
                    lb.steps.emplace_back(LoweredSite{site});
                } else if (const auto* call = std::get_if<DirectCall>(&insn)) {
                    const Function* target = index.find(call->target);
                    if (target == nullptr) throw ContractViolation("undefined call target '" + call->target + "'");
                    lb.steps.emplace_back(LoweredCall{{ids.at(target)}, call->arg_number, false, call->target});
                } else if (const auto* icall = std::get_if<IndirectCall>(&insn)) {
                    LoweredCall lc{{}, icall->arg_number, true, "indirect " + icall->signature};
                    for (const Function* target : index.signature_matches(icall->signature)) lc.targets.push_back(ids.at(target));
                    lb.steps.emplace_back(std::move(lc));
                }
            }
            lf.blocks.push_back(std::move(lb));
        }
    }
}

void WarningOnce::warn(const std::string& code, const std::string& entity, const std::string& message) {
    if (!seen_.emplace(code, entity).second || !sink_) return;
    sink_(Diagnostic{Severity::Warning, code, entity, message});
}

void warn_about_call(WarningOnce& warnings, const LoweredProgram& lowered, const LoweredCall& call,
                     const std::string& caller) {
    if (call.indirect && call.targets.empty()) {
        warnings.warn("unresolved indirect call", caller,
                      "no address-taken function matches " + call.description + "; treated as syscall-free");
    }
    for (std::uint32_t t : call.targets) {
        const auto& target = lowered.functions()[t];
        if (target.declaration()) {
            warnings.warn("external function", target.source->name, "no definition; treated as syscall-free");
        }
    }
}

} // namespace sfip::detail
