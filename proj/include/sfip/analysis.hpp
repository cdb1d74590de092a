// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Security metrics over extracted syscall-flow information: state-machine
// shape, baseline comparisons, origin statistics and mimicry reachability.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sfip/ir.hpp"
#include "sfip/origins.hpp"
#include "sfip/state_machine.hpp"

namespace sfip {

/// A state is a syscall with at least one outgoing transition.  The START
/// row is reported separately as `first_syscalls`.
struct StateMachineMetrics {
    std::uint32_t n = 0;
    std::uint32_t state_count = 0;
    std::optional<std::uint32_t> min_transitions; // absent without states
    std::optional<std::uint32_t> max_transitions;
    std::optional<double> avg_transitions;
    std::uint32_t first_syscalls = 0;
    std::uint64_t total_transitions = 0;          // excluding the START row
    std::uint32_t active_syscalls = 0;            // columns with any true bit, START row included

    friend bool operator==(const StateMachineMetrics&, const StateMachineMetrics&) = default;
};

StateMachineMetrics state_machine_metrics(const SyscallStateMachine& machine);

/// Per-function origin statistics; needs the relative map and the program.
struct OriginMetrics {
    std::uint32_t functions_with_syscalls = 0;
    std::optional<std::uint32_t> min_syscalls_per_function; // distinct numbers per function
    std::optional<std::uint32_t> max_syscalls_per_function;
    std::optional<double> avg_syscalls_per_function;
    std::uint64_t total_offsets = 0;                        // distinct (function, offset) sites
    std::map<SyscallNumber, std::uint64_t> offsets_per_syscall;
    std::optional<double> avg_offsets_per_syscall;          // over syscalls with >= 1 site
    std::map<std::string, std::uint32_t> wrapper_syscalls;  // wrapper -> distinct numbers at its sites

    friend bool operator==(const OriginMetrics&, const OriginMetrics&) = default;
};

OriginMetrics origin_metrics(const OriginMapRelative& relative, const Program& program);

/// The subset of origin statistics recoverable from a finalized map.
struct AddressMetrics {
    std::uint32_t syscalls_with_origins = 0;
    std::uint64_t total_addresses = 0; // distinct addresses over all syscalls
    std::uint64_t total_entries = 0;   // (syscall, address) pairs
    std::optional<double> avg_addresses_per_syscall;

    friend bool operator==(const AddressMetrics&, const AddressMetrics&) = default;
};

AddressMetrics address_metrics(const OriginMapAbsolute& map);

struct BaselineOptions {
    /// Seccomp baseline counts K^2 ordered pairs; false gives K(K-1).
    bool seccomp_self_pairs = true;
    /// Syscalls the application executes; defaults to the machine's active
    /// columns (or the state count for the metrics-only overload).
    std::optional<std::set<SyscallNumber>> active_set;
};

/// Transition totals are doubles so fractional averages from external figures can be
/// fed in; machine-derived totals are exact integers.
struct BaselineComparison {
    std::uint32_t n = 0;
    std::uint32_t states = 0;           // K
    std::uint32_t active = 0;           // K_active
    std::optional<double> avg_transitions;
    double transitions_sfip = 0;
    double transitions_seccomp = 0;     // K^2 or K(K-1)
    double transitions_unprotected = 0; // N * K_active
    double transitions_unprotected_all = 0; // N * N
    // Percentages 100 * (1 - sfip / baseline); absent for an empty baseline.
    std::optional<double> reduction_vs_seccomp;
    std::optional<double> reduction_vs_unprotected;
    std::optional<double> reduction_vs_unprotected_all;
    // Per-state branching ratios: N / avg and per-state seccomp / avg.
    std::optional<double> unprotected_to_average;
    std::optional<double> seccomp_to_average;

    friend bool operator==(const BaselineComparison&, const BaselineComparison&) = default;
};

BaselineComparison baseline_comparison(const SyscallStateMachine& machine, const BaselineOptions& options = {});

/// From summary figures only: N, state count K and average
/// transitions per state.  `active_set`, if given, only contributes its size.
BaselineComparison baseline_comparison(std::uint32_t n, double states, double avg_transitions,
                                       const BaselineOptions& options = {});

/// Aggregates over several applications.  All values are percentages.
struct ReductionAggregate {
    /// Mean of the per-application reductions.
    double mean_of_apps = 0;
    /// 1 - sum(avg transitions per state) / sum(baseline successors per state).
    double pooled_per_state = 0;
    /// 1 - sum(sfip transitions) / sum(baseline transitions).
    double transition_weighted = 0;

    friend bool operator==(const ReductionAggregate&, const ReductionAggregate&) = default;
};

struct CorpusReductions {
    std::size_t applications = 0; // with at least one state
    ReductionAggregate vs_seccomp;
    ReductionAggregate vs_unprotected;

    friend bool operator==(const CorpusReductions&, const CorpusReductions&) = default;
};

/// Applications without states are left out.
CorpusReductions aggregate_reductions(std::span<const BaselineComparison> apps);

/// Shortest chain from -> ... -> to over matrix rows (breadth-first, at least
/// one transition).  A returned chain has length 2 iff the direct bit is set.
/// Throws ContractViolation for out-of-range states.
std::optional<std::vector<StateIndex>> reachable(const SyscallStateMachine& machine, StateIndex from,
                                                 SyscallNumber to);

// Reports.  Numbers in text tables use 2 decimals.
std::string format_state_table(const StateMachineMetrics& metrics);
std::string format_baseline_table(const BaselineComparison& comparison);
std::string format_address_table(const AddressMetrics& metrics);
std::string format_origin_table(const OriginMetrics& metrics);

struct AnalysisReport {
    StateMachineMetrics state_machine;
    BaselineComparison baseline;
    AddressMetrics addresses;
    std::optional<OriginMetrics> origins; // only when the program is at hand

    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

std::string format_report_text(const AnalysisReport& report);
std::string report_to_json(const AnalysisReport& report);

} // namespace sfip
