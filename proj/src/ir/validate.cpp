// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <string>

#include "sfip/ir.hpp"

namespace sfip {

namespace {

class Validator {
  public:
    explicit Validator(const Program& program) : program_(program), index_(program) {}

    std::vector<Diagnostic> run() {
        if (program_.syscall_table_size == 0) {
            report("invalid syscall table size", "syscall_table_size", "must be at least 1");
        }
        check_units();
        check_names();
        check_entry();
        for (const Function* fn : index_.functions()) check_function(*fn);
        check_symbols();
        return std::move(diagnostics_);
    }

  private:
    void report(std::string code, std::string entity, std::string message = {}) {
        diagnostics_.push_back({Severity::Error, std::move(code), std::move(entity), std::move(message)});
    }

    void check_units() {
        std::set<std::string> seen;
        for (const auto& unit : program_.units) {
            if (unit.name.empty()) report("empty identifier", "unit", "translation unit without a name");
            if (!seen.insert(unit.name).second) report("duplicate unit name", unit.name);
        }
    }

    void check_names() {
        std::set<std::string> seen;
        for (const Function* fn : index_.functions()) {
            if (fn->name.empty()) report("empty identifier", "function", "function without a name");
            if (!seen.insert(fn->name).second) report("duplicate function name", fn->name);
            for (const auto& alias : fn->aliases) {
                if (alias.empty()) report("empty identifier", fn->name, "empty alias");
                if (!seen.insert(alias).second) report("duplicate function name", alias, "alias of " + fn->name);
            }
        }
    }

    void check_entry() {
        const Function* fn = index_.find(program_.entry);
        if (fn == nullptr || fn->is_declaration()) {
            report("entry function not defined", program_.entry);
        }
    }

    bool in_range(SyscallNumber n) const { return n < program_.syscall_table_size; }

    void check_number(const std::string& where, SyscallNumber n) {
        if (!in_range(n)) {
            report("number out of range", where,
                   std::to_string(n) + " >= " + std::to_string(program_.syscall_table_size));
        }
    }

    void check_function(const Function& fn) {
        if (fn.signature.empty()) report("empty signature", fn.name);

        std::set<std::string> ids;
        for (const auto& block : fn.blocks) {
            if (block.id.empty()) report("empty identifier", fn.name, "block without an id");
            if (!ids.insert(block.id).second) report("duplicate block id", fn.name + ":" + block.id);
        }

        std::optional<Offset> last_offset;
        for (const auto& block : fn.blocks) {
            const std::string where = fn.name + ":" + block.id;
            for (const auto& succ : block.successors) {
                if (!ids.contains(succ)) report("unknown successor block", where, "successor '" + succ + "'");
            }
            for (const auto& insn : block.instructions) {
                std::visit([&](const auto& i) { check_instruction(fn, where, i, last_offset); }, insn);
            }
        }
    }

    void check_instruction(const Function&, const std::string& where, const SyscallSite& site,
                           std::optional<Offset>& last_offset) {
        if (last_offset && site.offset <= *last_offset) {
            report("non-increasing syscall offset", where,
                   "offset " + std::to_string(site.offset) + " after " + std::to_string(*last_offset));
        }
        last_offset = site.offset;
        if (site.unknown) {
            if (!site.numbers.empty()) report("unknown site with numbers", where);
        } else if (site.numbers.empty()) {
            report("empty syscall number set", where);
        }
        std::set<SyscallNumber> seen;
        for (SyscallNumber n : site.numbers) {
            check_number(where, n);
            if (!seen.insert(n).second) report("duplicate syscall number", where, std::to_string(n));
        }
        if (site.via_wrapper && site.via_wrapper->empty()) report("empty identifier", where, "empty via_wrapper");
    }

    void check_instruction(const Function&, const std::string& where, const DirectCall& call,
                           std::optional<Offset>&) {
        if (index_.find(call.target) == nullptr) {
            report("undefined call target", call.target, "called from " + where);
        }
        if (call.arg_number) check_number(where, *call.arg_number);
    }

    void check_instruction(const Function&, const std::string& where, const IndirectCall& call,
                           std::optional<Offset>&) {
        if (call.signature.empty()) report("empty signature", where, "indirect call");
        if (call.arg_number) check_number(where, *call.arg_number);
    }

    void check_instruction(const Function&, const std::string&, const PlainInstruction&, std::optional<Offset>&) {}

    void check_symbols() {
        std::map<std::string, Address> resolved;
        auto bind = [&](const std::string& name, Address address) {
            auto [it, inserted] = resolved.emplace(name, address);
            if (!inserted && it->second != address) report("conflicting load address", name);
        };
        for (const auto& [name, address] : program_.symbols) {
            const Function* fn = index_.find(name);
            bind(fn ? fn->name : name, address);
        }
        for (const Function* fn : index_.functions()) {
            if (fn->load_address) bind(fn->name, *fn->load_address);
        }
        std::map<Address, std::string> owners;
        for (const auto& [name, address] : resolved) {
            auto [it, inserted] = owners.emplace(address, name);
            if (!inserted) report("duplicate load address", name, "shares address with " + it->second);
        }
    }

    const Program& program_;
    FunctionIndex index_;
    std::vector<Diagnostic> diagnostics_;
};

} // namespace

std::vector<Diagnostic> validate_program(const Program& program) { return Validator(program).run(); }

} // namespace sfip
