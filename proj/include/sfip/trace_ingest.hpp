// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// strace-style tracer output (follow-children, instruction pointers) to the
// canonical event stream consumed by the enforcement engine.

#pragma once

#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sfip/diagnostics.hpp"
#include "sfip/enforcement.hpp"
#include "sfip/types.hpp"

namespace sfip {

/// Bijective syscall name <-> number map for one architecture profile.
class SyscallNameTable {
  public:
    /// CSV with a `number,name` header.  Numbers must be dense in [0, N).
    static SyscallNameTable from_csv(std::istream& in, std::string profile = "custom");
    static SyscallNameTable load(const std::string& path);
    /// x86-64 profile with N = 357, compiled into the library.
    static const SyscallNameTable& default_table();

    const std::string& profile() const noexcept { return profile_; }
    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(names_.size()); }
    std::optional<SyscallNumber> number(std::string_view name) const;
    /// Throws ContractViolation for numbers >= N.
    const std::string& name(SyscallNumber number) const;

  private:
    std::string profile_;
    std::vector<std::string> names_;
    std::map<std::string, SyscallNumber, std::less<>> numbers_;
};

struct IngestOptions {
    /// Task id for lines without a pid column (single-process traces).
    TaskId default_pid = 1;
};

struct IngestStats {
    std::uint64_t lines = 0;
    std::uint64_t syscall_events = 0;
    std::uint64_t fork_events = 0;
    std::uint64_t exit_events = 0;
    std::uint64_t unknown_names = 0;   // completed syscalls dropped
    std::uint64_t signals_skipped = 0;
    std::uint64_t orphan_resumed = 0;
    std::uint64_t malformed = 0;
    std::uint64_t missing_ip = 0;
    std::uint64_t ignored = 0;         // tracer notices such as "Process N attached"
    std::uint64_t never_resumed = 0;   // unfinished at task exit or end of input

    friend bool operator==(const IngestStats&, const IngestStats&) = default;
};

/// Streaming line-by-line converter.  Syscalls are emitted in completion
/// order.  Lines of a task that has not been announced by a fork yet are
/// held back until the parent's clone/fork returns, so the stream is always
/// attributable.  Memory is bounded by pending unfinished syscalls and
/// held-back lines.
class StraceParser {
  public:
    using EventSink = std::function<void(const TraceEvent&)>;

    StraceParser(const SyscallNameTable& table, EventSink events, DiagnosticSink diagnostics = {},
                 IngestOptions options = {});

    void feed_line(std::string_view line);
    /// Flushes pending state; call once at end of input.
    void finish();

    const IngestStats& stats() const noexcept { return stats_; }

  private:
    struct Pending {
        std::string name;
        std::optional<Address> ip;
        std::size_t line;
    };
    struct Held {
        std::string text;
        std::size_t line;
    };

    void process(TaskId pid, std::string_view rest, std::size_t line);
    void complete(TaskId pid, const std::string& name, std::optional<Address> ip, std::string_view result,
                  std::size_t line);
    void emit(const TraceEvent& event);
    void emit_exit(TaskId pid);
    void flush_pending(TaskId pid, const char* why);
    void announce(TaskId child);
    void warn(std::size_t line, std::string code, std::string entity, std::string message);

    const SyscallNameTable& table_;
    EventSink events_;
    DiagnosticSink diagnostics_;
    IngestOptions options_;
    IngestStats stats_;
    std::size_t line_ = 0;
    std::optional<TaskId> root_;
    std::unordered_map<TaskId, bool> known_; // task -> still live
    std::map<TaskId, Pending> pending_;
    std::map<TaskId, std::deque<Held>> held_;
};

struct ParsedTrace {
    std::vector<TraceEvent> events;
    std::vector<Diagnostic> diagnostics;
    IngestStats stats;
};

ParsedTrace parse_trace(std::istream& in, const SyscallNameTable& table, IngestOptions options = {});
ParsedTrace parse_trace_text(std::string_view text, const SyscallNameTable& table, IngestOptions options = {});

} // namespace sfip
