// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <deque>

#include "sfip/analysis.hpp"
#include "sfip/errors.hpp"

namespace sfip {

namespace {

std::optional<double> reduction(double sfip, double baseline) {
    if (baseline <= 0) return std::nullopt;
    return 100.0 * (1.0 - sfip / baseline);
}

BaselineComparison compare(std::uint32_t n, double states, std::optional<double> avg, double sfip, double active,
                           const BaselineOptions& options) {
    BaselineComparison c;
    c.n = n;
    c.states = static_cast<std::uint32_t>(states + 0.5);
    c.active = static_cast<std::uint32_t>(active + 0.5);
    c.avg_transitions = avg;
    c.transitions_sfip = sfip;
    c.transitions_seccomp = options.seccomp_self_pairs ? states * states : states * (states - 1);
    c.transitions_unprotected = static_cast<double>(n) * active;
    c.transitions_unprotected_all = static_cast<double>(n) * n;
    c.reduction_vs_seccomp = reduction(sfip, c.transitions_seccomp);
    c.reduction_vs_unprotected = reduction(sfip, c.transitions_unprotected);
    c.reduction_vs_unprotected_all = reduction(sfip, c.transitions_unprotected_all);
    if (avg && *avg > 0) {
        c.unprotected_to_average = n / *avg;
        c.seccomp_to_average = c.transitions_seccomp / states / *avg;
    }
    return c;
}

} // namespace

BaselineComparison baseline_comparison(const SyscallStateMachine& machine, const BaselineOptions& options) {
    const auto m = state_machine_metrics(machine);
    double active = m.active_syscalls;
    if (options.active_set) {
        for (SyscallNumber nr : *options.active_set) {
            if (nr >= machine.size()) throw ContractViolation("active syscall " + std::to_string(nr) + " >= N");
        }
        active = static_cast<double>(options.active_set->size());
    }
    return compare(m.n, m.state_count, m.avg_transitions, static_cast<double>(m.total_transitions), active, options);
}

BaselineComparison baseline_comparison(std::uint32_t n, double states, double avg_transitions,
                                       const BaselineOptions& options) {
    if (states < 0 || avg_transitions < 0 || states > n) throw ContractViolation("inconsistent machine figures");
    const double active = options.active_set ? static_cast<double>(options.active_set->size()) : states;
    const std::optional<double> avg = states > 0 ? std::optional<double>(avg_transitions) : std::nullopt;
    return compare(n, states, avg, avg_transitions * states, active, options);
}

CorpusReductions aggregate_reductions(std::span<const BaselineComparison> apps) {
    CorpusReductions out;
    struct Sums {
        double reductions = 0, avg = 0, per_state = 0, sfip = 0, baseline = 0;
    } seccomp, unprotected;
    for (const auto& app : apps) {
        if (!app.avg_transitions || app.states == 0) continue;
        ++out.applications;
        // Use the exact state count implied by sfip / avg for fractional rows.
        const double states = app.transitions_sfip / *app.avg_transitions;
        auto add = [&](Sums& s, double baseline) {
            s.reductions += 1.0 - app.transitions_sfip / baseline;
            s.avg += *app.avg_transitions;
            s.per_state += baseline / states;
            s.sfip += app.transitions_sfip;
            s.baseline += baseline;
        };
        add(seccomp, app.transitions_seccomp);
        add(unprotected, app.transitions_unprotected);
    }
    if (out.applications == 0) return out;
    auto finish = [&](const Sums& s) {
        ReductionAggregate a;
        a.mean_of_apps = 100.0 * s.reductions / static_cast<double>(out.applications);
        a.pooled_per_state = 100.0 * (1.0 - s.avg / s.per_state);
        a.transition_weighted = 100.0 * (1.0 - s.sfip / s.baseline);
        return a;
    };
    out.vs_seccomp = finish(seccomp);
    out.vs_unprotected = finish(unprotected);
    return out;
}

std::optional<std::vector<StateIndex>> reachable(const SyscallStateMachine& machine, StateIndex from,
                                                 SyscallNumber to) {
    const std::uint32_t n = machine.size();
    if (from > n || to >= n) throw ContractViolation("state index out of range");
    constexpr StateIndex kNone = ~StateIndex{0};
    std::vector<StateIndex> parent(n + 1, kNone);
    std::vector<bool> seen(n + 1, false);
    std::deque<StateIndex> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        const StateIndex u = queue.front();
        queue.pop_front();
        for (SyscallNumber v = 0; v < n; ++v) {
            if (!machine.test(u, v)) continue;
            if (v == to) {
                std::vector<StateIndex> chain{to};
                for (StateIndex s = u; s != kNone; s = (s == from ? kNone : parent[s])) chain.push_back(s);
                return std::vector<StateIndex>(chain.rbegin(), chain.rend());
            }
            if (!seen[v]) {
                seen[v] = true;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    return std::nullopt;
}

} // namespace sfip
