// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Linker-stage extraction: the syscall state machine and the syscall-origin
// map, plus an independent path-enumerating oracle for verification.

#pragma once

#include <cstdint>
#include <set>
#include <utility>

#include "sfip/diagnostics.hpp"
#include "sfip/ir.hpp"
#include "sfip/origins.hpp"
#include "sfip/state_machine.hpp"

namespace sfip {

struct ExtractionStats {
    std::size_t summaries = 0;        // distinct (function, argument context) summaries
    std::size_t function_visits = 0;  // intra-procedural analyses run, including re-runs
};

/// Builds the (N+1) x N transition matrix reachable from the program entry.
///
/// Each (function, argument context) pair gets a summary computed by a
/// worklist fixpoint over its CFG, with a symbolic ENTRY element standing
/// for the caller's live set:
///   - whether a syscall-free path runs from entry to exit,
///   - the syscalls that can come first, which receive transitions from
///     whatever live set the caller passes in,
///   - the syscalls that can come last, which form the exit live set.
/// Transitions between two concrete syscalls do not depend on the caller and
/// go straight into the global matrix.  Callers are re-analyzed whenever a
/// callee summary grows, until nothing changes; recursion therefore converges
/// to the least fixpoint.  Applying summaries is exact for the union-based
/// live-set join, so acyclic programs get exactly their path-adjacent pairs.
///
/// An UNKNOWN site performs the syscall number its function was called with
/// (`arg_number` on the call) and is transparent when there is none.
/// Unresolved indirect calls and calls to declarations are syscall-free and
/// reported as warnings.
SyscallStateMachine build_state_machine(const Program& program, const DiagnosticSink& sink = {},
                                        ExtractionStats* stats = nullptr);

/// Maps every syscall site of every function reachable from the entry to the
/// numbers it may issue.  UNKNOWN sites receive the union of the constant
/// `arg_number`s over all reachable calls into their function; with none,
/// the site maps to the empty set and an "unresolvable origin" warning is
/// emitted.
OriginMapRelative build_origin_map(const Program& program, const DiagnosticSink& sink = {});

/// (previous state, next syscall); previous == N means START.
using TransitionPair = std::pair<StateIndex, SyscallNumber>;

/// Brute-force reference: enumerates every complete execution path from the
/// entry, inlining calls, and collects adjacent syscall pairs.  Requires
/// acyclic CFGs and an acyclic call graph (OracleError otherwise) and gives
/// up with OracleError once more than `max_paths` paths were enumerated.
std::set<TransitionPair> oracle_transition_pairs(const Program& program, std::uint64_t max_paths);

} // namespace sfip
