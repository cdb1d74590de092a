// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Emulated kernel-side enforcement: an installed bundle, a current state per
// task, and an allow/kill decision for every syscall event.

#pragma once

#include <chrono>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "sfip/bundle.hpp"
#include "sfip/types.hpp"

namespace sfip {

struct SyscallEvent {
    TaskId task = 0;
    SyscallNumber number = 0;
    Address address = 0;
    /// The address is the instruction pointer after the syscall instruction.
    bool post_instruction = false;

    friend bool operator==(const SyscallEvent&, const SyscallEvent&) = default;
};

struct ForkEvent {
    TaskId task = 0;
    TaskId child = 0;

    friend bool operator==(const ForkEvent&, const ForkEvent&) = default;
};

struct ExitEvent {
    TaskId task = 0;

    friend bool operator==(const ExitEvent&, const ExitEvent&) = default;
};

using TraceEvent = std::variant<SyscallEvent, ForkEvent, ExitEvent>;

TaskId task_of(const TraceEvent& event);

enum class KillReason { BadTransition, BadOrigin, NotInstalled };

std::string to_string(KillReason reason);

struct Violation {
    TaskId task = 0;
    KillReason reason = KillReason::NotInstalled;
    StateIndex previous = 0;   // state before the offending syscall
    SyscallNumber number = 0;  // offending syscall
    Address address = 0;       // normalized syscall-instruction address

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct Decision {
    std::optional<Violation> violation;

    static Decision allow() { return {}; }
    static Decision kill(Violation v) { return {v}; }
    bool allowed() const noexcept { return !violation.has_value(); }

    friend bool operator==(const Decision&, const Decision&) = default;
};

/// `post ? address - insn_size : address`; throws AddressUnderflowError when
/// the subtraction would wrap and ContractViolation for insn_size == 0.
Address normalize_address(Address address, bool post, std::uint32_t insn_size);

struct EngineOptions {
    /// Bytes of the syscall instruction (x86-64 `0f 05`).
    std::uint32_t syscall_instruction_size = 2;
    /// Root task id; when unset the task of the first event becomes the root.
    std::optional<TaskId> root_task;
};

/// One installed policy plus per-task state.  Not thread-safe; drive each
/// engine from one consumer, or partition tasks across engines sharing the
/// same bundle.
class EnforcementEngine {
  public:
    explicit EnforcementEngine(EngineOptions options = {});

    /// Rejects a second install with AlreadyInstalledError and an empty mode
    /// with ContractViolation.  The bundle is shared, never copied or mutated.
    void install(std::shared_ptr<const Bundle> bundle, EnforcementMode mode);

    bool installed() const noexcept { return bundle_ != nullptr; }
    EnforcementMode mode() const noexcept { return mode_; }
    const EngineOptions& options() const noexcept { return options_; }

    /// Throws ProtocolError for events of unknown or killed tasks and for
    /// forks onto a live task id.
    Decision on_event(const TraceEvent& event);

    /// Current state of a live task, START == N.
    std::optional<StateIndex> current_state(TaskId task) const;
    bool is_live(TaskId task) const { return tasks_.contains(task); }
    bool is_killed(TaskId task) const { return killed_.contains(task); }
    std::size_t live_tasks() const noexcept { return tasks_.size(); }

  private:
    Decision on_syscall(const SyscallEvent& event);
    void on_fork(const ForkEvent& event);
    void on_exit(const ExitEvent& event);
    StateIndex& state_of(TaskId task);

    EngineOptions options_;
    std::shared_ptr<const Bundle> bundle_;
    EnforcementMode mode_;
    bool root_seen_ = false;
    std::unordered_map<TaskId, StateIndex> tasks_;
    std::unordered_set<TaskId> killed_;
};

struct FirstViolation {
    std::uint64_t index = 0; // 0-based position in the event stream
    Violation violation;

    friend bool operator==(const FirstViolation&, const FirstViolation&) = default;
};

struct TaskVerdict {
    std::uint64_t events = 0;
    std::optional<FirstViolation> first_violation;

    bool killed() const noexcept { return first_violation.has_value(); }
    friend bool operator==(const TaskVerdict&, const TaskVerdict&) = default;
};

struct StreamIssue {
    std::uint64_t position = 0; // line number for decode errors, event index otherwise
    std::string message;

    friend bool operator==(const StreamIssue&, const StreamIssue&) = default;
};

struct ReplayReport {
    std::uint64_t events_processed = 0;
    std::uint64_t events_skipped = 0; // events of already-killed tasks
    std::map<TaskId, TaskVerdict> tasks;
    std::vector<FirstViolation> violations; // in stream order
    std::vector<StreamIssue> decode_errors;
    std::vector<StreamIssue> protocol_errors;
    // Wall-clock measurement; excluded from equality and canonical output.
    double seconds = 0.0;

    double events_per_second() const noexcept { return seconds > 0 ? events_processed / seconds : 0.0; }
    bool has_violation() const noexcept { return !violations.empty(); }

    bool same_verdicts(const ReplayReport& other) const;
};

/// Incremental driver over an engine: feed events in order, then finish().
class Replayer {
  public:
    explicit Replayer(EnforcementEngine& engine);

    void feed(const TraceEvent& event);
    void decode_error(std::uint64_t line, std::string message);
    ReplayReport finish();

  private:
    EnforcementEngine& engine_;
    ReplayReport report_;
    std::uint64_t index_ = 0;
    std::chrono::steady_clock::time_point started_;
};

ReplayReport replay(EnforcementEngine& engine, std::span<const TraceEvent> events);

/// Replays canonical trace text line by line; malformed lines become decode
/// errors and processing continues.
ReplayReport replay_stream(EnforcementEngine& engine, std::istream& in);

// Canonical trace text: one event per line.
//   S <task> <number> <hex-address> <post:0|1>
//   F <task> <child>
//   X <task>
std::string format_event(const TraceEvent& event);

/// Throws ParseError (column 0) on malformed input; `line` is reported back.
TraceEvent parse_event(std::string_view text, std::size_t line = 0);

std::vector<TraceEvent> read_canonical_trace(std::istream& in);
void write_canonical_trace(std::ostream& out, std::span<const TraceEvent> events);

/// Structured replay report (JSON).  Wall-clock figures only when
/// `include_timing` is set, under a "non_canonical" key.
std::string report_to_json(const ReplayReport& report, bool include_timing);

} // namespace sfip
