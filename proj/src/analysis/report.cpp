// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "sfip/analysis.hpp"
#include "sfip/types.hpp"

namespace sfip {

namespace {

std::string fixed2(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.2f", value);
    return buffer;
}

template <typename T>
std::string cell(const std::optional<T>& value) {
    return value ? fixed2(static_cast<double>(*value)) : std::string("-");
}

std::string cell(double value) { return fixed2(value); }

// Header row, one value row, columns right-aligned to the wider of the two.
std::string table(const std::vector<std::pair<std::string, std::string>>& columns) {
    std::string header, values;
    for (const auto& [title, value] : columns) {
        const std::size_t width = std::max(title.size(), value.size());
        if (!header.empty()) {
            header += "  ";
            values += "  ";
        }
        header += std::string(width - title.size(), ' ') + title;
        values += std::string(width - value.size(), ' ') + value;
    }
    return header + "\n" + values + "\n";
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

// Two-decimal rounding keeps JSON output stable across platforms.
nlohmann::ordered_json rounded(const std::optional<double>& value) {
    if (!value) return nullptr;
    return std::stod(fixed2(*value));
}

} // namespace

std::string format_state_table(const StateMachineMetrics& m) {
    return table({{"Average Transitions", cell(m.avg_transitions)},
                  {"#States", cell(static_cast<double>(m.state_count))},
                  {"Min Transitions", cell(m.min_transitions)},
                  {"Max Transitions", cell(m.max_transitions)},
                  {"#First Syscalls", cell(static_cast<double>(m.first_syscalls))}});
}

std::string format_baseline_table(const BaselineComparison& c) {
    return table({{"SFIP", cell(c.transitions_sfip)},
                  {"Seccomp", cell(c.transitions_seccomp)},
                  {"Unprotected", cell(c.transitions_unprotected)},
                  {"Unprotected (all N)", cell(c.transitions_unprotected_all)},
                  {"vs Seccomp %", cell(c.reduction_vs_seccomp)},
                  {"vs Unprotected %", cell(c.reduction_vs_unprotected)},
                  {"vs Unprotected (all N) %", cell(c.reduction_vs_unprotected_all)},
                  {"N / Avg", cell(c.unprotected_to_average)},
                  {"K / Avg", cell(c.seccomp_to_average)}});
}

std::string format_address_table(const AddressMetrics& m) {
    return table({{"#Syscalls", cell(static_cast<double>(m.syscalls_with_origins))},
                  {"Total #Offsets", cell(static_cast<double>(m.total_addresses))},
                  {"Avg #Offsets", cell(m.avg_addresses_per_syscall)}});
}

std::string format_origin_table(const OriginMetrics& m) {
    std::vector<std::pair<std::string, std::string>> columns{
        {"#Functions", cell(static_cast<double>(m.functions_with_syscalls))},
        {"Min Syscalls", cell(m.min_syscalls_per_function)},
        {"Max Syscalls", cell(m.max_syscalls_per_function)},
        {"Avg Syscalls / Function", cell(m.avg_syscalls_per_function)},
        {"Total #Offsets", cell(static_cast<double>(m.total_offsets))},
        {"Avg #Offsets", cell(m.avg_offsets_per_syscall)}};
    for (const auto& [wrapper, count] : m.wrapper_syscalls) {
        columns.emplace_back("#" + wrapper + "()", cell(static_cast<double>(count)));
    }
    return table(columns);
}

std::string format_report_text(const AnalysisReport& r) {
    std::string out = "State machine (N = " + std::to_string(r.state_machine.n) + ")\n";
    out += format_state_table(r.state_machine);
    out += "\nTransitions compared to baselines\n";
    out += format_baseline_table(r.baseline);
    out += "\nSyscall origins\n";
    out += format_address_table(r.addresses);
    if (r.origins) {
        out += "\nSyscall origins by function\n";
        out += format_origin_table(*r.origins);
    }
    return out;
}

std::string report_to_json(const AnalysisReport& r) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    const auto& m = r.state_machine;
    doc["state_machine"] = {{"n", m.n},
                            {"states", m.state_count},
                            {"min_transitions", optional_json(m.min_transitions)},
                            {"max_transitions", optional_json(m.max_transitions)},
                            {"avg_transitions", rounded(m.avg_transitions)},
                            {"first_syscalls", m.first_syscalls},
                            {"total_transitions", m.total_transitions},
                            {"active_syscalls", m.active_syscalls}};
    const auto& c = r.baseline;
    doc["baseline"] = {{"states", c.states},
                       {"active", c.active},
                       {"transitions_sfip", c.transitions_sfip},
                       {"transitions_seccomp", c.transitions_seccomp},
                       {"transitions_unprotected", c.transitions_unprotected},
                       {"transitions_unprotected_all", c.transitions_unprotected_all},
                       {"reduction_vs_seccomp", rounded(c.reduction_vs_seccomp)},
                       {"reduction_vs_unprotected", rounded(c.reduction_vs_unprotected)},
                       {"reduction_vs_unprotected_all", rounded(c.reduction_vs_unprotected_all)},
                       {"unprotected_to_average", rounded(c.unprotected_to_average)},
                       {"seccomp_to_average", rounded(c.seccomp_to_average)}};
    const auto& a = r.addresses;
    doc["origins"] = {{"syscalls_with_origins", a.syscalls_with_origins},
                      {"total_offsets", a.total_addresses},
                      {"total_entries", a.total_entries},
                      {"avg_offsets_per_syscall", rounded(a.avg_addresses_per_syscall)}};
    if (r.origins) {
        const auto& o = *r.origins;
        ordered_json per_syscall = ordered_json::object();
        for (const auto& [nr, count] : o.offsets_per_syscall) per_syscall[std::to_string(nr)] = count;
        ordered_json wrappers = ordered_json::object();
        for (const auto& [name, count] : o.wrapper_syscalls) wrappers[name] = count;
        doc["functions"] = {{"functions_with_syscalls", o.functions_with_syscalls},
                            {"min_syscalls_per_function", optional_json(o.min_syscalls_per_function)},
                            {"max_syscalls_per_function", optional_json(o.max_syscalls_per_function)},
                            {"avg_syscalls_per_function", rounded(o.avg_syscalls_per_function)},
                            {"total_offsets", o.total_offsets},
                            {"avg_offsets_per_syscall", rounded(o.avg_offsets_per_syscall)},
                            {"offsets_per_syscall", std::move(per_syscall)},
                            {"wrapper_syscalls", std::move(wrappers)}};
    }
    return doc.dump(2) + "\n";
}

} // namespace sfip
