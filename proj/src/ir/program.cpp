// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/ir.hpp"

#include <algorithm>

namespace sfip {

bool Function::has_unknown_sites() const {
    for (const auto& block : blocks) {
        for (const auto& insn : block.instructions) {
            if (const auto* site = std::get_if<SyscallSite>(&insn); site && site->unknown) return true;
        }
    }
    return false;
}

SymbolTable Program::symbol_table() const {
    FunctionIndex index(*this);
    SymbolTable table;
    for (const auto& [name, address] : symbols) {
        const Function* fn = index.find(name);
        table[fn ? fn->name : name] = address;
    }
    for (const Function* fn : index.functions()) {
        if (fn->load_address) table[fn->name] = *fn->load_address;
    }
    return table;
}

FunctionIndex::FunctionIndex(const Program& program) {
    for (const auto& unit : program.units) {
        for (const auto& fn : unit.functions) {
            functions_.push_back(&fn);
            by_name_.emplace(fn.name, &fn);
            for (const auto& alias : fn.aliases) by_name_.emplace(alias, &fn);
        }
    }
}

const Function* FunctionIndex::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : it->second;
}

std::vector<const Function*> FunctionIndex::signature_matches(std::string_view sig) const {
    std::vector<const Function*> out;
    for (const Function* fn : functions_) {
        if (fn->address_taken && fn->signature == sig) out.push_back(fn);
    }
    return out;
}

} // namespace sfip
