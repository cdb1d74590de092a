// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <deque>
#include <map>
#include <set>

#include "live_set.hpp"
#include "lowered_program.hpp"
#include "sfip/extraction.hpp"

namespace sfip {

namespace {

using detail::LiveSet;
using detail::LoweredCall;
using detail::LoweredFunction;
using detail::LoweredProgram;
using detail::LoweredSite;

// Argument context: the constant syscall number a function was called with,
// or kNoContext.
constexpr std::int64_t kNoContext = -1;

struct SummaryKey {
    std::uint32_t function;
    std::int64_t context;
    friend auto operator<=>(const SummaryKey&, const SummaryKey&) = default;
};

struct Summary {
    SummaryKey key;
    // Bottom (no terminating path) until first analyzed.
    bool passthrough = false;
    LiveSet firsts;
    LiveSet lasts;
    std::set<std::uint32_t> dependents;
};

class StateMachineExtractor {
  public:
    StateMachineExtractor(const Program& program, const DiagnosticSink& sink)
        : lowered_(program), n_(lowered_.table_size()), entry_bit_(n_), builder_(n_), warnings_(sink) {}

    SyscallStateMachine run(ExtractionStats* stats) {
        const std::uint32_t root = summary_for({lowered_.entry(), kNoContext}, std::nullopt);
        while (!pending_.empty()) {
            // Highest id first: callees are discovered after their callers.
            const auto it = std::prev(pending_.end());
            const std::uint32_t id = *it;
            pending_.erase(it);
            analyze(id);
        }
        builder_.add_row(n_, summaries_[root].firsts.words());
        if (stats) *stats = {summaries_.size(), visits_};
        return std::move(builder_).build();
    }

  private:
    std::uint32_t summary_for(SummaryKey key, std::optional<std::uint32_t> dependent) {
        auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(summaries_.size()));
        if (inserted) {
            summaries_.push_back(Summary{key, false, LiveSet(n_), LiveSet(n_), {}});
            pending_.insert(it->second);
        }
        if (dependent) summaries_[it->second].dependents.insert(*dependent);
        return it->second;
    }

    // Adds live × columns: concrete predecessors go into the matrix, the
    // symbolic ENTRY element into this function's first set.
    void connect(const LiveSet& live, std::span<const LiveSet::Word> columns, LiveSet& firsts) {
        live.for_each([&](std::size_t s) {
            if (s == entry_bit_) {
                firsts.merge_words(columns);
            } else {
                builder_.add_row(static_cast<StateIndex>(s), columns);
            }
        });
    }

    void apply_site(const LoweredSite& step, std::int64_t context, LiveSet& live, LiveSet& firsts) {
        const SyscallSite& site = *step.source;
        LiveSet performed(n_);
        if (site.unknown) {
            if (context == kNoContext) return;
            performed.set(static_cast<std::size_t>(context));
        } else {
            for (SyscallNumber number : site.numbers) performed.set(number);
        }
        connect(live, performed.words(), firsts);
        live = LiveSet(n_ + 1);
        live.merge(performed);
    }

    void apply_call(std::uint32_t caller, const LoweredCall& call, LiveSet& live, LiveSet& firsts) {
        detail::warn_about_call(warnings_, lowered_, call,
                                lowered_.functions()[summaries_[caller].key.function].source->name);
        if (call.targets.empty()) return;
        LiveSet out(n_ + 1);
        const std::int64_t context = call.arg_number ? static_cast<std::int64_t>(*call.arg_number) : kNoContext;
        for (std::uint32_t target : call.targets) {
            if (lowered_.functions()[target].declaration()) {
                out.merge(live);
                continue;
            }
            const std::uint32_t id = summary_for({target, context}, caller);
            const Summary& callee = summaries_[id];
            if (callee.firsts.any()) connect(live, callee.firsts.words(), firsts);
            if (callee.passthrough) out.merge(live);
            out.merge(callee.lasts);
        }
        live = std::move(out);
    }

    void analyze(std::uint32_t id) {
        ++visits_;
        const SummaryKey key = summaries_[id].key;
        const LoweredFunction& fn = lowered_.functions()[key.function];

        std::vector<LiveSet> in(fn.blocks.size(), LiveSet(n_ + 1));
        LiveSet exit(n_ + 1);
        LiveSet firsts(n_);
        in[0].set(entry_bit_);
        std::set<std::uint32_t> worklist{0};
        while (!worklist.empty()) {
            const std::uint32_t b = *worklist.begin();
            worklist.erase(worklist.begin());
            const auto& block = fn.blocks[b];
            LiveSet live = in[b];
            for (const auto& step : block.steps) {
                if (live.none()) break;
                if (const auto* site = std::get_if<LoweredSite>(&step)) {
                    apply_site(*site, key.context, live, firsts);
                } else {
                    apply_call(id, std::get<LoweredCall>(step), live, firsts);
                }
            }
            if (live.none()) continue;
            if (block.successors.empty()) exit.merge(live);
            for (std::uint32_t succ : block.successors) {
                if (in[succ].merge(live)) worklist.insert(succ);
            }
        }

        Summary& summary = summaries_[id];
        const bool passthrough = exit.test(entry_bit_);
        exit.reset(entry_bit_);
        LiveSet lasts(n_);
        lasts.merge(exit);
        if (passthrough != summary.passthrough || !(firsts == summary.firsts) || !(lasts == summary.lasts)) {
            summary.passthrough = passthrough;
            summary.firsts = std::move(firsts);
            summary.lasts = std::move(lasts);
            pending_.insert(summary.dependents.begin(), summary.dependents.end());
        }
    }

    LoweredProgram lowered_;
    std::uint32_t n_;
    std::size_t entry_bit_;
    SyscallStateMachine::Builder builder_;
    detail::WarningOnce warnings_;
    std::deque<Summary> summaries_;
    std::map<SummaryKey, std::uint32_t> ids_;
    std::set<std::uint32_t> pending_;
    std::size_t visits_ = 0;
};

} // namespace

SyscallStateMachine build_state_machine(const Program& program, const DiagnosticSink& sink, ExtractionStats* stats) {
    return StateMachineExtractor(program, sink).run(stats);
}

} // namespace sfip
