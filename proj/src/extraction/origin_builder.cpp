// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <deque>
#include <set>

#include "lowered_program.hpp"
#include "sfip/extraction.hpp"

namespace sfip {

OriginMapRelative build_origin_map(const Program& program, const DiagnosticSink& sink) {
    const detail::LoweredProgram lowered(program);
    const auto& functions = lowered.functions();
    detail::WarningOnce warnings(sink);

    // Call-graph reachability over CFG-reachable blocks, collecting the
    // constant numbers passed into each function along the way.
    std::vector<std::vector<bool>> live_blocks(functions.size());
    std::vector<bool> reached(functions.size(), false);
    std::vector<std::set<SyscallNumber>> passed(functions.size());
    std::deque<std::uint32_t> queue{lowered.entry()};
    reached[lowered.entry()] = true;
    while (!queue.empty()) {
        const std::uint32_t f = queue.front();
        queue.pop_front();
        const auto& fn = functions[f];
        if (fn.declaration()) continue;
        auto& seen = live_blocks[f];
        seen.assign(fn.blocks.size(), false);
        std::deque<std::uint32_t> blocks{0};
        seen[0] = true;
        while (!blocks.empty()) {
            const auto& block = fn.blocks[blocks.front()];
            blocks.pop_front();
            for (const auto& step : block.steps) {
                const auto* call = std::get_if<detail::LoweredCall>(&step);
                if (call == nullptr) continue;
                detail::warn_about_call(warnings, lowered, *call, fn.source->name);
                for (std::uint32_t t : call->targets) {
                    if (call->arg_number) passed[t].insert(*call->arg_number);
                    if (!reached[t]) {
                        reached[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            for (std::uint32_t succ : block.successors) {
                if (!seen[succ]) {
                    seen[succ] = true;
                    blocks.push_back(succ);
                }
            }
        }
    }

    OriginMapRelative map;
    map.n = lowered.table_size();
    for (std::size_t f = 0; f < functions.size(); ++f) {
        const auto& fn = functions[f];
        if (!reached[f] || fn.declaration()) continue;
        for (std::size_t b = 0; b < fn.blocks.size(); ++b) {
            if (!live_blocks[f][b]) continue;
            for (const auto& step : fn.blocks[b].steps) {
                const auto* lowered_site = std::get_if<detail::LoweredSite>(&step);
                if (lowered_site == nullptr) continue;
                const SyscallSite& site = *lowered_site->source;
                std::vector<SyscallNumber> numbers;
                if (site.unknown) {
                    numbers.assign(passed[f].begin(), passed[f].end());
                    if (numbers.empty()) {
                        warnings.warn("unresolvable origin", fn.source->name + "+" + std::to_string(site.offset),
                                      "no constant syscall number reaches this site; it rejects every syscall");
                    }
                } else {
                    std::set<SyscallNumber> sorted(site.numbers.begin(), site.numbers.end());
                    numbers.assign(sorted.begin(), sorted.end());
                }
                map.entries.emplace(OriginSite{fn.source->name, site.offset}, std::move(numbers));
            }
        }
    }
    return map;
}

} // namespace sfip
