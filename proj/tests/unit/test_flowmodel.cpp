// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "generators.hpp"
#include "sfip/bundle.hpp"
#include "sfip/cli.hpp"
#include "sfip/errors.hpp"
#include "sfip/extraction.hpp"

using namespace sfip;
using sfip::testing::fixture_path;

namespace {

constexpr SyscallNumber kRead = 0, kWrite = 1, kOpen = 2, kFutex = 202;

Bundle branch_arg_bundle() {
    const Program p = load_program(fixture_path("ir/branch_arg.json"));
    return cli::extract_bundle(p, EnforcementMode::both(), "branch_arg.json");
}

} // namespace

TEST_CASE("allows_transition agrees with raw bits on every cell", "[flowmodel]") {
    std::mt19937_64 rng(11);
    for (std::uint32_t n : {1U, 2U, 7U, 63U, 64U}) {
        std::vector<std::vector<bool>> truth(n + 1, std::vector<bool>(n));
        std::vector<SyscallStateMachine::Transition> ts;
        std::bernoulli_distribution bit(0.3);
        for (StateIndex r = 0; r <= n; ++r) {
            for (SyscallNumber c = 0; c < n; ++c) {
                if (bit(rng)) {
                    truth[r][c] = true;
                    ts.emplace_back(r, c);
                }
            }
        }
        const auto m = SyscallStateMachine::from_transitions(n, ts);
        const auto wpr = words_for_bits(n);
        for (StateIndex r = 0; r <= n; ++r) {
            for (SyscallNumber c = 0; c < n; ++c) {
                const bool raw = (m.words()[r * wpr + c / 64] >> (c % 64)) & 1U;
                REQUIRE(m.allows_transition(r, c) == truth[r][c]);
                REQUIRE(m.test(r, c) == raw);
                REQUIRE(raw == truth[r][c]);
            }
        }
        CHECK(m.transitions() == ts);
    }
}

TEST_CASE("out-of-range lookups are contract violations", "[flowmodel]") {
    const auto m = SyscallStateMachine::from_transitions(10, std::vector<SyscallStateMachine::Transition>{{10, 3}});
    CHECK(m.allows_transition(10, 3));
    CHECK_THROWS_AS(m.allows_transition(11, 0), ContractViolation);
    CHECK_THROWS_AS(m.allows_transition(0, 10), ContractViolation);
    CHECK_THROWS_AS(SyscallStateMachine::Builder(4).add(0, 4), ContractViolation);
    CHECK_THROWS_AS(SyscallStateMachine::from_words(4, std::vector<SyscallStateMachine::Word>(4, 0)),
                    ContractViolation);
    CHECK_THROWS_AS(SyscallStateMachine::from_words(4, std::vector<SyscallStateMachine::Word>(5, 0x10)),
                    ContractViolation);
}

TEST_CASE("empty program machine rejects every non-START query", "[flowmodel]") {
    const Program p = load_program(fixture_path("ir/minimal.json"));
    const auto m = build_state_machine(p);
    for (StateIndex r = 0; r < m.size(); ++r) {
        CHECK(m.row_popcount(r) == 0);
    }
    CHECK(m.row_popcount(m.start_state()) == 0);
}

TEST_CASE("finalize adds load addresses to offsets", "[flowmodel]") {
    const Program p = load_program(fixture_path("ir/malloc.json"));
    const auto rel = build_origin_map(p);
    const auto abs = finalize_origins(rel, p.symbol_table());
    REQUIRE(abs.addresses(kFutex).size() == 1);
    CHECK(abs.contains(kFutex, 0x401209));
    CHECK_FALSE(abs.contains(kFutex, 0x401208));
    CHECK_FALSE(abs.contains(400, 0x401209));
}

TEST_CASE("finalize edge cases", "[flowmodel]") {
    SECTION("empty relative map") {
        const auto abs = finalize_origins(OriginMapRelative{357, {}}, {});
        CHECK(abs.empty());
        CHECK(abs.size() == 357);
    }
    SECTION("two functions landing on one address keep per-syscall sets duplicate-free") {
        OriginMapRelative rel{357, {}};
        rel.entries[{"a", 0x10}] = {kRead};
        rel.entries[{"b", 0x0}] = {kRead, kWrite};
        const SymbolTable syms{{"a", 0x401000}, {"b", 0x401010}};
        const auto abs = finalize_origins(rel, syms);
        REQUIRE(abs.addresses(kRead).size() == 1);
        CHECK(abs.addresses(kRead)[0] == 0x401010);
        CHECK(abs.contains(kWrite, 0x401010));
        CHECK(abs.total_entries() == 2);
    }
    SECTION("missing symbol names the function and is all-or-nothing") {
        OriginMapRelative rel{357, {}};
        rel.entries[{"a", 0x10}] = {kRead};
        rel.entries[{"z", 0x10}] = {kWrite};
        try {
            finalize_origins(rel, SymbolTable{{"a", 0x1000}});
            FAIL("expected MissingSymbolError");
        } catch (const MissingSymbolError& e) {
            CHECK(e.function() == "z");
        }
    }
    SECTION("multiplicity is preserved for distinct addresses") {
        const Program p = load_program(fixture_path("ir/futex4.json"));
        const auto rel = build_origin_map(p);
        std::size_t rel_total = 0;
        for (const auto& [site, numbers] : rel.entries) rel_total += numbers.size();
        CHECK(finalize_origins(rel, p.symbol_table()).total_entries() == rel_total);
    }
}

TEST_CASE("bundle round trip", "[flowmodel]") {
    const Bundle b = branch_arg_bundle();
    const Bytes bytes = save_bundle(b);
    const Bundle back = load_bundle(bytes);
    CHECK(back == b);
    CHECK(save_bundle(back) == bytes);
    CHECK(back.state_machine.allows_transition(kOpen, kRead));
    CHECK(back.provenance.source == "branch_arg.json");

    std::mt19937_64 rng(3);
    for (double density : {0.0, 0.01, 0.5, 1.0}) {
        const Bundle r = sfip::testing::random_bundle(rng, 357, density);
        CHECK(load_bundle(save_bundle(r)) == r);
    }
}

TEST_CASE("bundle encoding is deterministic across construction runs", "[flowmodel]") {
    CHECK(save_bundle(branch_arg_bundle()) == save_bundle(branch_arg_bundle()));
}

TEST_CASE("bundle errors are distinguishable", "[flowmodel]") {
    const Bytes good = save_bundle(branch_arg_bundle());
    auto kind_of = [](const Bytes& bytes) {
        try {
            load_bundle(bytes);
        } catch (const BundleError& e) {
            return static_cast<int>(e.kind());
        }
        return -1;
    };

    Bytes bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(kind_of(bad_magic) == static_cast<int>(BundleError::Kind::BadMagic));

    Bytes bad_version = good;
    bad_version[4] = 9;
    CHECK(kind_of(bad_version) == static_cast<int>(BundleError::Kind::VersionMismatch));

    Bytes truncated(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(good.size() / 2));
    CHECK(kind_of(truncated) == static_cast<int>(BundleError::Kind::Truncated));
    CHECK(kind_of(Bytes{}) == static_cast<int>(BundleError::Kind::Truncated));

    // Every single-byte flip past the header is caught by the checksum.
    for (std::size_t i = 8; i < good.size(); i += 7) {
        Bytes flipped = good;
        flipped[i] ^= 0x40;
        const int kind = kind_of(flipped);
        CHECK(kind != -1);
    }
    const auto seg = matrix_segment(good);
    Bytes matrix_flip = good;
    matrix_flip[seg.offset + 3] ^= 1;
    CHECK(kind_of(matrix_flip) == static_cast<int>(BundleError::Kind::ChecksumMismatch));

    Bytes trailing = good;
    trailing.push_back(0);
    CHECK(kind_of(trailing) != -1);
}

TEST_CASE("matrix segment size depends on N only", "[flowmodel]") {
    std::mt19937_64 rng(5);
    for (std::uint32_t n : {1U, 64U, 65U, 357U}) {
        const auto sparse = save_bundle(sfip::testing::random_bundle(rng, n, 0.01));
        const auto dense = save_bundle(sfip::testing::random_bundle(rng, n, 0.99));
        const auto expected = (n + 1) * words_for_bits(n) * 8;
        CHECK(matrix_segment(sparse).length == expected);
        CHECK(matrix_segment(dense).length == expected);
    }
}

TEST_CASE("fnv1a64 reference values", "[flowmodel]") {
    const std::string a = "a";
    CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64(std::span(reinterpret_cast<const std::uint8_t*>(a.data()), a.size())) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("mode parsing", "[flowmodel]") {
    CHECK(parse_mode("both") == EnforcementMode::both());
    CHECK(parse_mode("transitions") == EnforcementMode::transitions());
    CHECK(parse_mode("origins") == EnforcementMode::origins());
    CHECK_THROWS_AS(parse_mode("neither"), ParseError);
    CHECK(to_string(EnforcementMode::origins()) == "origins");
}

TEST_CASE("inconsistent bundle is rejected", "[flowmodel]") {
    Bundle b = branch_arg_bundle();
    b.origin_map = OriginMapAbsolute(10);
    CHECK_THROWS_AS(b.check_consistent(), ContractViolation);
}
