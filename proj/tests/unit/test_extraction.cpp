// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "generators.hpp"
#include "sfip/errors.hpp"
#include "sfip/extraction.hpp"

using namespace sfip;
using sfip::testing::fixture_path;

namespace {

constexpr SyscallNumber kRead = 0, kWrite = 1, kOpen = 2, kClose = 3, kGetpid = 39, kFutex = 202;
constexpr StateIndex kStart = 357;

std::set<TransitionPair> entries(const SyscallStateMachine& m) {
    std::set<TransitionPair> out;
    for (const auto& t : m.transitions()) out.insert(t);
    return out;
}

SyscallSite site(Offset offset, std::vector<SyscallNumber> numbers) { return {offset, std::move(numbers), false, {}}; }
SyscallSite unknown_site(Offset offset) { return {offset, {}, true, {}}; }

Function fn(std::string name, std::vector<BasicBlock> blocks) {
    Function f;
    f.name = std::move(name);
    f.blocks = std::move(blocks);
    return f;
}

Program program(std::vector<Function> functions) {
    Program p;
    p.syscall_table_size = 357;
    p.units.push_back({"a.c", std::move(functions)});
    return p;
}

bool has_warning(const std::vector<Diagnostic>& ds, const std::string& code) {
    for (const auto& d : ds) {
        if (d.code == code && d.severity == Severity::Warning) return true;
    }
    return false;
}

} // namespace

TEST_CASE("straight-line program gives exactly its three transitions", "[extraction]") {
    const Program p = load_program(fixture_path("ir/linear.json"));
    const std::set<TransitionPair> expected{{kStart, kOpen}, {kOpen, kRead}, {kRead, kClose}};
    CHECK(entries(build_state_machine(p)) == expected);
    CHECK(oracle_transition_pairs(p, 100) == expected);
}

TEST_CASE("branching program with a wrapper argument", "[extraction]") {
    const Program p = load_program(fixture_path("ir/branch_arg.json"));
    const auto m = build_state_machine(p);
    CHECK(m.allows_transition(kOpen, kRead));
    CHECK(m.allows_transition(kOpen, kWrite));
    CHECK_FALSE(m.allows_transition(kRead, kWrite));
    // Only close follows read; the oracle pair set is the reference.
    const auto oracle = oracle_transition_pairs(p, 1000);
    CHECK(entries(m) == oracle);
    for (SyscallNumber nr = 0; nr < 357; ++nr) {
        CHECK(m.allows_transition(kRead, nr) == oracle.contains({kRead, nr}));
    }
    const std::set<TransitionPair> expected{
        {kStart, kOpen}, {kOpen, kRead}, {kOpen, kWrite}, {kRead, kClose}, {kWrite, kClose}};
    CHECK(oracle == expected);
}

TEST_CASE("diamond CFG gives the union of both branches", "[extraction]") {
    const Program p = program({fn("main", {{"top", {site(0x10, {kOpen})}, {"l", "r"}},
                                           {"l", {site(0x20, {kRead})}, {"end"}},
                                           {"r", {site(0x30, {kWrite})}, {"end"}},
                                           {"end", {site(0x40, {kClose})}, {}}})});
    const std::set<TransitionPair> expected{
        {kStart, kOpen}, {kOpen, kRead}, {kOpen, kWrite}, {kRead, kClose}, {kWrite, kClose}};
    CHECK(oracle_transition_pairs(p, 10) == expected);
    CHECK(entries(build_state_machine(p)) == expected);
}

TEST_CASE("a syscall-free path lets the caller's state flow through", "[extraction]") {
    // main: open; helper(); close, where helper may or may not read.
    const Program p = program({fn("main", {{"b", {site(0x10, {kOpen}), DirectCall{"helper", {}}, site(0x20, {kClose})}, {}}}),
                               fn("helper", {{"h0", {}, {"h1", "h2"}}, {"h1", {site(0x8, {kRead})}, {}}, {"h2", {}, {}}})});
    const auto m = build_state_machine(p);
    CHECK(m.allows_transition(kOpen, kRead));
    CHECK(m.allows_transition(kRead, kClose));
    CHECK(m.allows_transition(kOpen, kClose));
    CHECK(entries(m) == oracle_transition_pairs(p, 100));
}

TEST_CASE("loops and recursion converge", "[extraction]") {
    SECTION("self loop") {
        const Program p = program({fn("main", {{"head", {site(0x10, {kRead})}, {"head", "out"}},
                                               {"out", {site(0x20, {kClose})}, {}}})});
        const auto m = build_state_machine(p);
        CHECK(m.allows_transition(kRead, kRead));
        CHECK(m.allows_transition(kRead, kClose));
        CHECK(m.allows_transition(kStart, kRead));
        CHECK(entries(m).size() == 3);
        REQUIRE_THROWS_AS(oracle_transition_pairs(p, 100), OracleError);
    }
    SECTION("mutual recursion") {
        const Program p = program({fn("main", {{"b", {DirectCall{"ping", {}}}, {}}}),
                                   fn("ping", {{"p0", {site(0x10, {kRead})}, {"p1", "p2"}},
                                               {"p1", {DirectCall{"pong", {}}}, {}},
                                               {"p2", {}, {}}}),
                                   fn("pong", {{"q", {site(0x10, {kWrite}), DirectCall{"ping", {}}}, {}}})});
        const auto m = build_state_machine(p);
        CHECK(m.allows_transition(kStart, kRead));
        CHECK(m.allows_transition(kRead, kWrite));
        CHECK(m.allows_transition(kWrite, kRead));
        CHECK_FALSE(m.allows_transition(kRead, kRead));
        try {
            oracle_transition_pairs(p, 100);
            FAIL("expected a call cycle");
        } catch (const OracleError& e) {
            CHECK(e.kind() == OracleError::Kind::CallCycle);
        }
    }
}

TEST_CASE("indirect calls match address-taken functions by signature", "[extraction]") {
    Function a = fn("a", {{"b", {site(0x4, {kRead})}, {}}});
    a.address_taken = true;
    a.signature = "int(int)";
    Function b = fn("b", {{"b", {site(0x4, {kWrite})}, {}}});
    b.address_taken = true;
    b.signature = "int(int)";
    Function c = fn("c", {{"b", {site(0x4, {kGetpid})}, {}}});
    c.signature = "int(int)"; // not address-taken
    Function d = fn("d", {{"b", {site(0x4, {kFutex})}, {}}});
    d.address_taken = true; // other signature
    const Program p = program({fn("main", {{"b", {site(0x10, {kOpen}), IndirectCall{"int(int)", {}}, site(0x20, {kClose})}, {}}}),
                               a, b, c, d});
    const auto m = build_state_machine(p);
    CHECK(m.allows_transition(kOpen, kRead));
    CHECK(m.allows_transition(kOpen, kWrite));
    CHECK(m.allows_transition(kRead, kClose));
    CHECK_FALSE(m.allows_transition(kOpen, kGetpid));
    CHECK_FALSE(m.allows_transition(kOpen, kFutex));
    CHECK_FALSE(m.allows_transition(kOpen, kClose));
    CHECK(entries(m) == oracle_transition_pairs(p, 100));
}

TEST_CASE("unresolved icalls and declarations warn and are syscall-free", "[extraction]") {
    Function ext;
    ext.name = "external";
    const Program p = program({fn("main", {{"b", {site(0x10, {kOpen}), IndirectCall{"void(char)", {}},
                                                  DirectCall{"external", {}}, site(0x20, {kClose})}, {}}}),
                               ext});
    std::vector<Diagnostic> ds;
    const auto m = build_state_machine(p, collect_into(ds));
    CHECK(m.allows_transition(kOpen, kClose));
    CHECK(ds.size() == 2);
    for (const auto& d : ds) CHECK(d.severity == Severity::Warning);
}

TEST_CASE("origin map examples", "[extraction]") {
    SECTION("plain site in malloc") {
        const Program p = load_program(fixture_path("ir/malloc.json"));
        const auto rel = build_origin_map(p);
        const OriginSite key{"malloc", 0x209};
        REQUIRE(rel.entries.contains(key));
        CHECK(rel.entries.at(key) == std::vector<SyscallNumber>{kFutex});
    }
    SECTION("wrapper merged across units") {
        const Program p = load_program(fixture_path("ir/wrapper.json"));
        const auto rel = build_origin_map(p);
        const OriginSite key{"syscall_cp", 0x1c};
        REQUIRE(rel.entries.contains(key));
        CHECK(rel.entries.at(key) == std::vector<SyscallNumber>{kRead, kWrite});
    }
    SECTION("no syscalls") {
        CHECK(build_origin_map(load_program(fixture_path("ir/minimal.json"))).empty());
    }
    SECTION("unresolvable wrapper site fails closed") {
        const Program p = load_program(fixture_path("ir/unresolvable.json"));
        std::vector<Diagnostic> ds;
        const auto rel = build_origin_map(p, collect_into(ds));
        CHECK(has_warning(ds, "unresolvable origin"));
        bool found_empty = false;
        for (const auto& [key, numbers] : rel.entries) found_empty |= numbers.empty();
        CHECK(found_empty);
    }
    SECTION("unreachable functions contribute nothing") {
        const Program p = program({fn("main", {{"b", {site(0x10, {kOpen})}, {}}}),
                                   fn("dead", {{"b", {site(0x10, {kRead})}, {}}})});
        const auto rel = build_origin_map(p);
        CHECK(rel.entries.size() == 1);
        CHECK(rel.entries.begin()->first.function == "main");
    }
}

TEST_CASE("oracle errors", "[extraction]") {
    SECTION("cfg cycle") {
        const Program p = program({fn("main", {{"a", {}, {"b"}}, {"b", {}, {"a"}}})});
        try {
            oracle_transition_pairs(p, 100);
            FAIL("expected OracleError");
        } catch (const OracleError& e) {
            CHECK(e.kind() == OracleError::Kind::CfgCycle);
        }
    }
    SECTION("path explosion") {
        // 2^12 paths through a chain of diamonds.
        std::vector<BasicBlock> blocks;
        for (int i = 0; i < 12; ++i) {
            const std::string s = std::to_string(i), t = std::to_string(i + 1);
            blocks.push_back({"d" + s, {}, {"l" + s, "r" + s}});
            blocks.push_back({"l" + s, {site(static_cast<Offset>(0x10 * (i + 1)), {kRead})}, {"d" + t}});
            blocks.push_back({"r" + s, {}, {"d" + t}});
        }
        blocks.push_back({"d12", {}, {}});
        const Program p = program({fn("main", blocks)});
        try {
            oracle_transition_pairs(p, 1000);
            FAIL("expected OracleError");
        } catch (const OracleError& e) {
            CHECK(e.kind() == OracleError::Kind::PathExplosion);
        }
        CHECK(oracle_transition_pairs(p, 5000) == entries(build_state_machine(p)));
    }
}

TEST_CASE("extraction is deterministic and monotone", "[extraction]") {
    std::mt19937_64 rng(21);
    sfip::testing::RandomProgramOptions opts;
    opts.loops = true;
    opts.indirect_calls = true;
    for (int i = 0; i < 40; ++i) {
        Program p = sfip::testing::random_program(rng, opts);
        const auto m = build_state_machine(p);
        CHECK(build_state_machine(p) == m);
        CHECK(build_origin_map(p) == build_origin_map(p));

        // Every column in use has an origin.
        const auto rel = build_origin_map(p);
        std::set<SyscallNumber> with_origin;
        for (const auto& [key, numbers] : rel.entries) with_origin.insert(numbers.begin(), numbers.end());
        for (const auto& [from, to] : m.transitions()) CHECK(with_origin.contains(to));

        // A transition-free extra function changes nothing.
        Program more = p;
        more.units[0].functions.push_back(fn("zz_unused", {{"b", {PlainInstruction{}}, {}}}));
        CHECK(build_state_machine(more) == m);

        // Widening a site's number set never removes an entry.
        Program grown = p;
        bool widened = false;
        for (auto& unit : grown.units)
            for (auto& f : unit.functions)
                for (auto& b : f.blocks)
                    for (auto& insn : b.instructions)
                        if (auto* s = std::get_if<SyscallSite>(&insn); s && !widened && !s->numbers.empty() &&
                                                                       std::find(s->numbers.begin(), s->numbers.end(), kGetpid) == s->numbers.end()) {
                            s->numbers.push_back(kGetpid);
                            widened = true;
                        }
        REQUIRE(validate_program(grown).empty());
        const auto g = build_state_machine(grown);
        for (const auto& t : m.transitions()) CHECK(g.allows_transition(t.first, t.second));
    }
}

TEST_CASE("stats count summaries", "[extraction]") {
    const Program p = load_program(fixture_path("ir/branch_arg.json"));
    ExtractionStats stats;
    build_state_machine(p, {}, &stats);
    CHECK(stats.summaries >= 3);
    CHECK(stats.function_visits >= stats.summaries);
}

TEST_CASE("unknown sites reached without context are transparent in the machine", "[extraction]") {
    const Program p = program({fn("main", {{"b", {site(0x10, {kOpen}), DirectCall{"w", {}}, site(0x20, {kClose})}, {}}}),
                               fn("w", {{"b", {unknown_site(0x8)}, {}}})});
    const auto m = build_state_machine(p);
    CHECK(m.allows_transition(kOpen, kClose));
    CHECK(m.row_popcount(kOpen) == 1);
}

TEST_CASE("documented examples extract to their stated machines", "[extraction]") {
    auto doc = [](const std::string& name) { return load_program(fixture_path("../../docs/examples/" + name + ".json")); };
    const std::set<TransitionPair> linear{{kStart, kOpen}, {kOpen, kRead}, {kRead, kClose}};
    CHECK(entries(build_state_machine(doc("linear"))) == linear);

    const std::set<TransitionPair> branching{
        {kStart, kOpen}, {kOpen, kRead}, {kOpen, kGetpid}, {kRead, kClose}, {kGetpid, kClose}};
    const Program b = doc("branching");
    CHECK(entries(build_state_machine(b)) == branching);
    CHECK(oracle_transition_pairs(b, 100) == branching);

    const Program w = doc("wrapper");
    CHECK(entries(build_state_machine(w)) == std::set<TransitionPair>{{kStart, kRead}, {kRead, kWrite}});
    const auto origins = finalize_origins(build_origin_map(w), w.symbol_table());
    for (SyscallNumber nr : {kRead, kWrite}) {
        const auto a = origins.addresses(nr);
        CHECK(std::vector<Address>(a.begin(), a.end()) == std::vector<Address>{0x40131c});
    }
}
