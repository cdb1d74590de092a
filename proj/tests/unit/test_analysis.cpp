// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "generators.hpp"
#include "sfip/analysis.hpp"
#include "sfip/cli.hpp"
#include "sfip/errors.hpp"
#include "sfip/extraction.hpp"

using namespace sfip;
using Catch::Approx;
using sfip::testing::fixture_path;

namespace {

constexpr SyscallNumber kSocket = 41, kMprotect = 10, kExecve = 59, kExit = 60,
                        kExitGroup = 231, kFutex = 202;

SyscallStateMachine machine(std::uint32_t n, std::vector<SyscallStateMachine::Transition> ts) {
    return SyscallStateMachine::from_transitions(n, ts);
}

} // namespace

TEST_CASE("state metrics on a single exit_group row", "[analysis]") {
    const auto m = state_machine_metrics(machine(357, {{kExitGroup, kExit}}));
    CHECK(m.state_count == 1);
    CHECK(m.min_transitions == 1u);
    CHECK(m.max_transitions == 1u);
    CHECK(m.avg_transitions == Approx(1.0));
    CHECK(m.first_syscalls == 0);
}

TEST_CASE("state metrics on an empty machine report absent averages", "[analysis]") {
    const auto m = state_machine_metrics(machine(357, {}));
    CHECK(m.state_count == 0);
    CHECK_FALSE(m.min_transitions);
    CHECK_FALSE(m.avg_transitions);
    const auto b = baseline_comparison(machine(357, {}));
    CHECK_FALSE(b.reduction_vs_seccomp);
    CHECK_FALSE(b.unprotected_to_average);
}

TEST_CASE("state metrics agree with an independent popcount over oracle pairs", "[analysis]") {
    const Program p = load_program(fixture_path("ir/branch_arg.json"));
    const auto pairs = oracle_transition_pairs(p, 1000);
    std::map<StateIndex, std::uint32_t> out;
    std::uint32_t first = 0;
    for (const auto& [from, to] : pairs) {
        if (from == 357) {
            ++first;
        } else {
            ++out[from];
        }
    }
    std::uint32_t lo = 1000, hi = 0, total = 0;
    for (const auto& [s, c] : out) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        total += c;
    }
    const auto m = state_machine_metrics(build_state_machine(p));
    CHECK(m.state_count == out.size());
    CHECK(m.min_transitions == lo);
    CHECK(m.max_transitions == hi);
    CHECK(m.total_transitions == total);
    CHECK(m.first_syscalls == first);
    CHECK(*m.avg_transitions == Approx(static_cast<double>(total) / out.size()));
    CHECK(*m.min_transitions <= *m.avg_transitions);
    CHECK(*m.avg_transitions <= *m.max_transitions);
}

TEST_CASE("origin metrics", "[analysis]") {
    SECTION("one function, one site") {
        const Program p = load_program(fixture_path("ir/malloc.json"));
        const auto rel = build_origin_map(p);
        const auto m = origin_metrics(rel, p);
        CHECK(m.functions_with_syscalls == 1);
        CHECK(m.total_offsets == 1);
        CHECK(m.avg_offsets_per_syscall == Approx(1.0));
    }
    SECTION("futex at four sites") {
        const Program p = load_program(fixture_path("ir/futex4.json"));
        const auto m = origin_metrics(build_origin_map(p), p);
        CHECK(m.offsets_per_syscall.at(kFutex) == 4);
        std::uint64_t sum = 0;
        for (const auto& [nr, count] : m.offsets_per_syscall) sum += count;
        CHECK(m.total_offsets == 7);
        CHECK(sum == m.total_offsets);
    }
    SECTION("wrapper resolving to three numbers") {
        const Program p = load_program(fixture_path("ir/wrapper3.json"));
        const auto m = origin_metrics(build_origin_map(p), p);
        CHECK(m.wrapper_syscalls.at("syscall_cp") == 3);
        CHECK(m.max_syscalls_per_function == 3u);
    }
}

TEST_CASE("address metrics", "[analysis]") {
    const Program p = load_program(fixture_path("ir/futex4.json"));
    const auto abs = finalize_origins(build_origin_map(p), p.symbol_table());
    const auto m = address_metrics(abs);
    CHECK(m.total_entries == 7);
    CHECK(m.total_addresses == 7);
    CHECK(m.syscalls_with_origins == 4);
    CHECK(m.avg_addresses_per_syscall == Approx(1.75));
}

TEST_CASE("baseline comparison from summary figures", "[analysis]") {
    const auto b = baseline_comparison(357, 108, 65.55);
    REQUIRE(b.unprotected_to_average);
    CHECK(*b.unprotected_to_average == Approx(357.0 / 65.55));
    CHECK(*b.unprotected_to_average == Approx(5.4).margin(0.05));
    CHECK(b.transitions_sfip == Approx(108 * 65.55));
    CHECK(b.transitions_seccomp == Approx(108.0 * 108.0));
    CHECK(b.transitions_unprotected == Approx(357.0 * 108));
}

TEST_CASE("saturated machine has no reduction against seccomp", "[analysis]") {
    std::vector<SyscallStateMachine::Transition> ts;
    for (StateIndex s = 0; s < 10; ++s)
        for (SyscallNumber t = 0; t < 10; ++t) ts.emplace_back(s, t);
    ts.emplace_back(357, 0);
    const auto b = baseline_comparison(machine(357, ts));
    CHECK(b.states == 10);
    CHECK(b.active == 10);
    CHECK(*b.reduction_vs_seccomp == Approx(0.0).margin(1e-12));
    CHECK(*b.reduction_vs_unprotected == Approx(100.0 * (1 - 100.0 / 3570)));
    BaselineOptions no_self;
    no_self.seccomp_self_pairs = false;
    CHECK(baseline_comparison(machine(357, ts), no_self).transitions_seccomp == 90);
}

TEST_CASE("baseline invariants and monotonicity", "[analysis]") {
    std::mt19937_64 rng(4);
    for (int round = 0; round < 30; ++round) {
        const Bundle bundle = sfip::testing::random_bundle(rng, 64, 0.1 + 0.02 * round);
        const auto& m = bundle.state_machine;
        const auto b = baseline_comparison(m);
        if (b.active == b.states) {
            CHECK(b.transitions_sfip <= b.transitions_seccomp);
            CHECK(b.transitions_seccomp <= b.transitions_unprotected);
        }
        // Add one more transition among existing states.
        auto ts = m.transitions();
        bool added = false;
        for (StateIndex s = 0; s < 64 && !added; ++s) {
            if (m.row_popcount(s) == 0) continue;
            for (SyscallNumber t = 0; t < 64 && !added; ++t) {
                if (!m.test(s, t) && m.row_popcount(t) > 0) {
                    ts.emplace_back(s, t);
                    added = true;
                }
            }
        }
        if (!added) continue;
        const auto b2 = baseline_comparison(machine(64, ts));
        CHECK(b2.states == b.states);
        CHECK(*b2.reduction_vs_seccomp <= *b.reduction_vs_seccomp);
        CHECK(*b2.reduction_vs_unprotected <= *b.reduction_vs_unprotected);
    }
}

TEST_CASE("aggregations over a circulant corpus", "[analysis]") {
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes{{10, 5}, {20, 5}, {8, 2},
                                                                      {16, 12}, {4, 4}, {25, 10}};
    std::vector<BaselineComparison> apps;
    for (const auto& [k, a] : shapes) {
        const auto m = sfip::testing::circulant_machine(357, k, a);
        const auto sm = state_machine_metrics(m);
        REQUIRE(sm.state_count == k);
        REQUIRE(*sm.avg_transitions == Approx(a));
        apps.push_back(baseline_comparison(m));
    }
    const auto agg = aggregate_reductions(apps);
    CHECK(agg.applications == 6);
    CHECK(agg.vs_seccomp.mean_of_apps == Approx(47.5));
    CHECK(agg.vs_seccomp.pooled_per_state == Approx(100.0 * 45 / 83));
    CHECK(agg.vs_seccomp.transition_weighted == Approx(100.0 * 837 / 1461));
    CHECK(agg.vs_unprotected.mean_of_apps == Approx(100.0 * (1 - 38.0 / (6 * 357))));
    CHECK(agg.vs_unprotected.pooled_per_state == Approx(100.0 * (1 - 38.0 / (6 * 357))));
    CHECK(agg.vs_unprotected.transition_weighted == Approx(100.0 * (1 - 624.0 / (357 * 83))));
}

TEST_CASE("empty applications are dropped from aggregates", "[analysis]") {
    std::vector<BaselineComparison> apps{baseline_comparison(machine(357, {})),
                                         baseline_comparison(sfip::testing::circulant_machine(357, 10, 5))};
    const auto agg = aggregate_reductions(apps);
    CHECK(agg.applications == 1);
    CHECK(agg.vs_seccomp.mean_of_apps == Approx(50.0));
}

TEST_CASE("reachable", "[analysis]") {
    const Program p = load_program(fixture_path("ir/busybox.json"));
    const auto m = build_state_machine(p);
    SECTION("direct bit gives a two-element chain") {
        const auto [from, to] = m.transitions().front();
        const auto chain = reachable(m, from, to);
        REQUIRE(chain);
        CHECK(*chain == std::vector<StateIndex>{from, to});
    }
    SECTION("socket cannot reach mprotect at all") {
        CHECK_FALSE(m.allows_transition(kSocket, kMprotect));
        CHECK_FALSE(reachable(m, kSocket, kMprotect));
    }
    SECTION("socket to execve needs a mimicry chain") {
        CHECK_FALSE(m.allows_transition(kSocket, kExecve));
        const auto chain = reachable(m, kSocket, kExecve);
        REQUIRE(chain);
        CHECK(chain->size() > 2);
        CHECK(chain->front() == kSocket);
        CHECK(chain->back() == kExecve);
        for (std::size_t i = 0; i + 1 < chain->size(); ++i) CHECK(m.allows_transition((*chain)[i], (*chain)[i + 1]));
    }
    SECTION("disconnected machine") {
        const auto empty = machine(16, {});
        for (StateIndex s = 0; s <= 16; ++s)
            for (SyscallNumber t = 0; t < 16; ++t) CHECK_FALSE(reachable(empty, s, t));
    }
    SECTION("bounds") {
        CHECK_THROWS_AS(reachable(m, 358, 0), ContractViolation);
        CHECK_THROWS_AS(reachable(m, 0, 357), ContractViolation);
    }
}

TEST_CASE("reachable agrees with transitive closure and chains replay clean", "[analysis]") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 10; ++round) {
        auto bundle = std::make_shared<const Bundle>(sfip::testing::random_bundle(rng, 24, 0.05));
        const auto& m = bundle->state_machine;
        const std::uint32_t n = m.size();
        // Warshall closure over the full (N+1) node set.
        std::vector<std::vector<bool>> closure(n + 1, std::vector<bool>(n + 1));
        for (const auto& [s, t] : m.transitions()) closure[s][t] = true;
        for (std::uint32_t k = 0; k <= n; ++k)
            for (std::uint32_t i = 0; i <= n; ++i)
                if (closure[i][k])
                    for (std::uint32_t j = 0; j <= n; ++j)
                        if (closure[k][j]) closure[i][j] = true;
        for (StateIndex s = 0; s <= n; ++s) {
            for (SyscallNumber t = 0; t < n; ++t) {
                const auto chain = reachable(m, s, t);
                REQUIRE(chain.has_value() == closure[s][t]);
                if (!chain || s != n) continue;
                EnforcementEngine engine;
                engine.install(bundle, EnforcementMode::transitions());
                for (std::size_t i = 1; i < chain->size(); ++i) {
                    REQUIRE(engine.on_event(SyscallEvent{1, (*chain)[i], 0, false}).allowed());
                }
            }
        }
    }
}

TEST_CASE("metrics survive serialization", "[analysis]") {
    const Program p = load_program(fixture_path("ir/busybox.json"));
    const Bundle b = cli::extract_bundle(p, EnforcementMode::both(), "busybox.json");
    const Bundle back = load_bundle(save_bundle(b));
    CHECK(cli::analyze_bundle(back) == cli::analyze_bundle(b));
    CHECK(state_machine_metrics(back.state_machine) == state_machine_metrics(build_state_machine(p)));
    auto direct = cli::analyze_program(p, false);
    CHECK(direct == cli::analyze_bundle(back));
}

TEST_CASE("reports", "[analysis]") {
    const Program p = load_program(fixture_path("ir/busybox.json"));
    const auto report = cli::analyze_program(p, true);
    REQUIRE(report.origins);
    const auto text = format_report_text(report);
    CHECK(text.find("Average Transitions") != std::string::npos);
    const auto json = report_to_json(report);
    CHECK(json.find("\"format_version\"") != std::string::npos);
    CHECK(json.find("\"functions\"") != std::string::npos);
    CHECK(report_to_json(report) == json);
    CHECK(format_state_table(report.state_machine).find("15") != std::string::npos);
}
