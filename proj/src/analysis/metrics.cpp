// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>

#include "sfip/analysis.hpp"

namespace sfip {

StateMachineMetrics state_machine_metrics(const SyscallStateMachine& machine) {
    StateMachineMetrics m;
    m.n = machine.size();
    std::vector<SyscallStateMachine::Word> columns(machine.words_per_row(), 0);
    for (StateIndex s = 0; s <= machine.size(); ++s) {
        const auto row = machine.row(s);
        for (std::size_t w = 0; w < row.size(); ++w) columns[w] |= row[w];
        if (s == machine.start_state()) break;
        const auto count = static_cast<std::uint32_t>(machine.row_popcount(s));
        if (count == 0) continue;
        ++m.state_count;
        m.total_transitions += count;
        m.min_transitions = std::min(m.min_transitions.value_or(count), count);
        m.max_transitions = std::max(m.max_transitions.value_or(count), count);
    }
    m.first_syscalls = static_cast<std::uint32_t>(machine.row_popcount(machine.start_state()));
    for (auto w : columns) m.active_syscalls += static_cast<std::uint32_t>(std::popcount(w));
    if (m.state_count > 0) m.avg_transitions = static_cast<double>(m.total_transitions) / m.state_count;
    return m;
}

OriginMetrics origin_metrics(const OriginMapRelative& relative, const Program& program) {
    OriginMetrics m;
    const FunctionIndex index(program);
    std::map<std::string, std::set<SyscallNumber>> per_function;
    for (const auto& [site, numbers] : relative.entries) {
        ++m.total_offsets;
        auto& distinct = per_function[site.function];
        for (SyscallNumber nr : numbers) {
            distinct.insert(nr);
            ++m.offsets_per_syscall[nr];
        }
    }
    std::map<std::string, std::set<SyscallNumber>> wrapper_numbers;
    for (const auto& [site, numbers] : relative.entries) {
        const Function* fn = index.find(site.function);
        if (fn != nullptr && fn->is_wrapper) wrapper_numbers[fn->name].insert(numbers.begin(), numbers.end());
    }
    for (const auto& [name, numbers] : wrapper_numbers) {
        m.wrapper_syscalls[name] = static_cast<std::uint32_t>(numbers.size());
    }

    m.functions_with_syscalls = static_cast<std::uint32_t>(per_function.size());
    std::uint64_t sum = 0;
    for (const auto& [name, numbers] : per_function) {
        const auto count = static_cast<std::uint32_t>(numbers.size());
        sum += count;
        m.min_syscalls_per_function = std::min(m.min_syscalls_per_function.value_or(count), count);
        m.max_syscalls_per_function = std::max(m.max_syscalls_per_function.value_or(count), count);
    }
    if (!per_function.empty()) m.avg_syscalls_per_function = static_cast<double>(sum) / per_function.size();
    if (!m.offsets_per_syscall.empty()) {
        std::uint64_t offsets = 0;
        for (const auto& [nr, count] : m.offsets_per_syscall) offsets += count;
        m.avg_offsets_per_syscall = static_cast<double>(offsets) / m.offsets_per_syscall.size();
    }
    return m;
}

AddressMetrics address_metrics(const OriginMapAbsolute& map) {
    AddressMetrics m;
    std::set<Address> distinct;
    for (SyscallNumber nr = 0; nr < map.size(); ++nr) {
        const auto addresses = map.addresses(nr);
        if (addresses.empty()) continue;
        ++m.syscalls_with_origins;
        m.total_entries += addresses.size();
        distinct.insert(addresses.begin(), addresses.end());
    }
    m.total_addresses = distinct.size();
    if (m.syscalls_with_origins > 0) {
        m.avg_addresses_per_syscall = static_cast<double>(m.total_entries) / m.syscalls_with_origins;
    }
    return m;
}

} // namespace sfip
