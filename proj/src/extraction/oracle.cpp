// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Path-enumerating reference for the state machine.  Shares nothing with the
// summary-based extractor beyond the IR types: names, aliases and indirect
// targets are resolved here from scratch.

#include <map>
#include <string>

#include "sfip/errors.hpp"
#include "sfip/extraction.hpp"

namespace sfip {

namespace {

class PathOracle {
  public:
    PathOracle(const Program& program, std::uint64_t max_paths)
        : program_(program), start_(program.syscall_table_size), max_paths_(max_paths) {
        for (const auto& unit : program.units) {
            for (const auto& fn : unit.functions) {
                by_name_[fn.name] = &fn;
                for (const auto& alias : fn.aliases) by_name_[alias] = &fn;
                std::map<std::string, std::size_t> ids;
                for (std::size_t b = 0; b < fn.blocks.size(); ++b) ids[fn.blocks[b].id] = b;
                auto& succ = successors_[&fn];
                for (const auto& block : fn.blocks) {
                    std::vector<std::size_t> targets;
                    for (const auto& s : block.successors) targets.push_back(ids.at(s));
                    succ.push_back(std::move(targets));
                }
            }
        }
    }

    std::set<TransitionPair> run() {
        check_cfgs_acyclic();
        check_calls_acyclic();
        const Function* entry = lookup(program_.entry);
        if (entry == nullptr || entry->blocks.empty()) throw ContractViolation("entry function not defined");
        explore({Frame{entry, 0, 0, std::nullopt}}, start_);
        return std::move(pairs_);
    }

  private:
    struct Frame {
        const Function* fn;
        std::size_t block;
        std::size_t insn;
        std::optional<SyscallNumber> context;
    };

    const Function* lookup(const std::string& name) const {
        auto it = by_name_.find(name);
        return it == by_name_.end() ? nullptr : it->second;
    }

    std::vector<const Function*> callees(const Instruction& insn) const {
        std::vector<const Function*> out;
        if (const auto* call = std::get_if<DirectCall>(&insn)) {
            if (const Function* fn = lookup(call->target)) out.push_back(fn);
        } else if (const auto* icall = std::get_if<IndirectCall>(&insn)) {
            for (const auto& unit : program_.units) {
                for (const auto& fn : unit.functions) {
                    if (fn.address_taken && fn.signature == icall->signature) out.push_back(&fn);
                }
            }
        }
        return out;
    }

    void check_cfgs_acyclic() const {
        for (const auto& [fn, succ] : successors_) {
            std::vector<int> color(succ.size(), 0); // 0 white, 1 on stack, 2 done
            auto visit = [&](auto& self, std::size_t b) -> void {
                color[b] = 1;
                for (std::size_t s : succ[b]) {
                    if (color[s] == 1) throw OracleError(OracleError::Kind::CfgCycle, "CFG cycle in " + fn->name);
                    if (color[s] == 0) self(self, s);
                }
                color[b] = 2;
            };
            for (std::size_t b = 0; b < succ.size(); ++b) {
                if (color[b] == 0) visit(visit, b);
            }
        }
    }

    void check_calls_acyclic() const {
        std::map<const Function*, int> color;
        auto visit = [&](auto& self, const Function* fn) -> void {
            color[fn] = 1;
            for (const auto& block : fn->blocks) {
                for (const auto& insn : block.instructions) {
                    for (const Function* callee : callees(insn)) {
                        if (color[callee] == 1) {
                            throw OracleError(OracleError::Kind::CallCycle, "call cycle through " + callee->name);
                        }
                        if (color[callee] == 0) self(self, callee);
                    }
                }
            }
            color[fn] = 2;
        };
        for (const auto& [fn, succ] : successors_) {
            if (color[fn] == 0) visit(visit, fn);
        }
    }

    void count_path() {
        if (++paths_ > max_paths_) {
            throw OracleError(OracleError::Kind::PathExplosion,
                              "more than " + std::to_string(max_paths_) + " execution paths");
        }
    }

    // Runs one path to completion, recursing at every choice point.
    void explore(std::vector<Frame> stack, StateIndex last) {
        while (true) {
            if (stack.empty()) {
                count_path();
                return;
            }
            Frame& top = stack.back();
            const BasicBlock& block = top.fn->blocks[top.block];
            if (top.insn == block.instructions.size()) {
                const auto& next = successors_.at(top.fn)[top.block];
                if (next.empty()) {
                    stack.pop_back();
                } else {
                    for (std::size_t i = 1; i < next.size(); ++i) {
                        auto branch = stack;
                        branch.back().block = next[i];
                        branch.back().insn = 0;
                        explore(std::move(branch), last);
                    }
                    top.block = next[0];
                    top.insn = 0;
                }
                continue;
            }
            const Instruction& insn = block.instructions[top.insn++];
            if (const auto* site = std::get_if<SyscallSite>(&insn)) {
                std::vector<SyscallNumber> choices = site->numbers;
                if (site->unknown) {
                    choices.clear();
                    if (top.context) choices.push_back(*top.context);
                }
                if (choices.empty()) continue;
                for (std::size_t i = 1; i < choices.size(); ++i) {
                    pairs_.emplace(last, choices[i]);
                    explore(stack, choices[i]);
                }
                pairs_.emplace(last, choices[0]);
                last = choices[0];
                continue;
            }
            std::optional<SyscallNumber> arg;
            if (const auto* call = std::get_if<DirectCall>(&insn)) arg = call->arg_number;
            if (const auto* icall = std::get_if<IndirectCall>(&insn)) arg = icall->arg_number;
            const auto targets = callees(insn);
            if (targets.empty()) continue;
            for (std::size_t i = 1; i < targets.size(); ++i) {
                auto branch = stack;
                if (!targets[i]->blocks.empty()) branch.push_back(Frame{targets[i], 0, 0, arg});
                explore(std::move(branch), last);
            }
            if (!targets[0]->blocks.empty()) stack.push_back(Frame{targets[0], 0, 0, arg});
        }
    }

    const Program& program_;
    StateIndex start_;
    std::uint64_t max_paths_;
    std::uint64_t paths_ = 0;
    std::map<std::string, const Function*> by_name_;
    std::map<const Function*, std::vector<std::vector<std::size_t>>> successors_;
    std::set<TransitionPair> pairs_;
};

} // namespace

std::set<TransitionPair> oracle_transition_pairs(const Program& program, std::uint64_t max_paths) {
    return PathOracle(program, max_paths).run();
}

} // namespace sfip
