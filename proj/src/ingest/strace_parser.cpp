// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <charconv>
#include <istream>

#include "sfip/errors.hpp"
#include "sfip/trace_ingest.hpp"

namespace sfip {

namespace {

constexpr std::string_view kUnfinished = "<unfinished ...>";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::string_view next_token(std::string_view s) {
    std::size_t end = 0;
    while (end < s.size() && !is_space(s[end])) ++end;
    return s.substr(0, end);
}

template <typename T>
std::optional<T> to_number(std::string_view s, int base = 10) {
    T value{};
    if (s.empty()) return std::nullopt;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// -t/-tt/-ttt timestamps: digits with ':' or '.'.
bool is_timestamp(std::string_view s) {
    bool separator = false;
    for (char c : s) {
        if (c == ':' || c == '.') {
            separator = true;
        } else if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return separator && std::isdigit(static_cast<unsigned char>(s.front()));
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

bool creates_task(std::string_view name) {
    return name == "clone" || name == "clone3" || name == "fork" || name == "vfork";
}

bool ends_task(std::string_view name) { return name == "exit" || name == "exit_group"; }

bool is_exit_notice(std::string_view rest) {
    if (const auto token = next_token(rest); is_timestamp(token)) rest = trim(rest.substr(token.size()));
    if (rest.starts_with('[')) {
        const auto close = rest.find(']');
        if (close != std::string_view::npos) rest = trim(rest.substr(close + 1));
    }
    return rest.starts_with("+++");
}

} // namespace

StraceParser::StraceParser(const SyscallNameTable& table, EventSink events, DiagnosticSink diagnostics,
                           IngestOptions options)
    : table_(table), events_(std::move(events)), diagnostics_(std::move(diagnostics)), options_(options) {
    if (options_.default_pid == 0) throw ContractViolation("default pid must be positive");
}

void StraceParser::warn(std::size_t line, std::string code, std::string entity, std::string message) {
    if (!diagnostics_) return;
    diagnostics_({Severity::Warning, std::move(code), std::move(entity),
                  "line " + std::to_string(line) + ": " + std::move(message)});
}

void StraceParser::emit(const TraceEvent& event) {
    if (std::holds_alternative<SyscallEvent>(event)) ++stats_.syscall_events;
    if (std::holds_alternative<ForkEvent>(event)) ++stats_.fork_events;
    if (std::holds_alternative<ExitEvent>(event)) ++stats_.exit_events;
    events_(event);
}

void StraceParser::feed_line(std::string_view text) {
    const std::size_t line = ++line_;
    ++stats_.lines;
    std::string_view rest = trim(text);
    if (rest.empty()) return;
    if (rest.starts_with("strace:")) {
        ++stats_.ignored;
        return;
    }

    TaskId pid = options_.default_pid;
    if (rest.starts_with("[pid")) {
        const auto close = rest.find(']');
        const auto id = close == std::string_view::npos ? std::nullopt
                                                        : to_number<TaskId>(trim(rest.substr(4, close - 4)));
        if (!id || *id == 0) {
            ++stats_.malformed;
            warn(line, "malformed line", "", "bad [pid N] prefix");
            return;
        }
        pid = *id;
        rest = trim(rest.substr(close + 1));
    } else if (const auto token = next_token(rest); all_digits(token) && token.size() < rest.size()) {
        const auto id = to_number<TaskId>(token);
        if (!id || *id == 0) {
            ++stats_.malformed;
            warn(line, "malformed line", "", "bad pid column");
            return;
        }
        pid = *id;
        rest = trim(rest.substr(token.size()));
    }

    if (!root_) {
        root_ = pid;
        known_[pid] = true;
    }
    auto it = known_.find(pid);
    if (it != known_.end() && !it->second && is_exit_notice(rest)) {
        // Tracer notice for a task whose exit syscall already ended it.
        ++stats_.ignored;
        return;
    }
    if (it == known_.end() || !it->second) {
        // Its clone has not returned in the parent yet.
        held_[pid].push_back({std::string(rest), line});
        return;
    }
    process(pid, rest, line);
}

void StraceParser::process(TaskId pid, std::string_view rest, std::size_t line) {
    if (const auto token = next_token(rest); is_timestamp(token)) rest = trim(rest.substr(token.size()));

    std::optional<Address> ip;
    if (rest.starts_with('[')) {
        const auto close = rest.find(']');
        if (close == std::string_view::npos) {
            ++stats_.malformed;
            warn(line, "malformed line", "", "unterminated instruction pointer");
            return;
        }
        std::string_view digits = rest.substr(1, close - 1);
        if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
        ip = to_number<Address>(digits, 16);
        rest = trim(rest.substr(close + 1));
    }

    if (rest.starts_with("+++")) {
        flush_pending(pid, "task exited");
        emit_exit(pid);
        return;
    }
    if (rest.starts_with("---")) {
        ++stats_.signals_skipped;
        warn(line, "signal skipped", std::to_string(pid), std::string(rest));
        return;
    }

    if (rest.starts_with("<...")) {
        const std::string_view body = trim(rest.substr(4));
        const auto name_end = body.find(' ');
        const std::string_view name = body.substr(0, name_end);
        const auto marker = body.find("resumed>");
        auto pending = pending_.find(pid);
        if (marker == std::string_view::npos || !is_identifier(name)) {
            ++stats_.malformed;
            warn(line, "malformed line", "", "bad resumed marker");
            return;
        }
        if (pending == pending_.end() || pending->second.name != name) {
            ++stats_.orphan_resumed;
            warn(line, "orphan resumed line", std::string(name),
                 "no unfinished " + std::string(name) + " for task " + std::to_string(pid));
            return;
        }
        const std::string_view tail = body.substr(marker + 8);
        const auto eq = tail.rfind(" = ");
        if (eq == std::string_view::npos) {
            ++stats_.malformed;
            warn(line, "malformed line", std::string(name), "resumed line without return value");
            return;
        }
        Pending started = std::move(pending->second);
        pending_.erase(pending);
        complete(pid, started.name, started.ip ? started.ip : ip, tail.substr(eq + 3), line);
        return;
    }

    const auto paren = rest.find('(');
    const std::string_view name = paren == std::string_view::npos ? std::string_view{} : rest.substr(0, paren);
    if (!is_identifier(name)) {
        ++stats_.malformed;
        warn(line, "malformed line", "", "expected 'name(args) = result'");
        return;
    }
    if (rest.ends_with(kUnfinished)) {
        if (pending_.contains(pid)) flush_pending(pid, "superseded by a new syscall");
        pending_[pid] = Pending{std::string(name), ip, line};
        return;
    }
    const auto eq = rest.rfind(" = ");
    if (eq == std::string_view::npos) {
        ++stats_.malformed;
        warn(line, "malformed line", std::string(name), "missing return value");
        return;
    }
    complete(pid, std::string(name), ip, rest.substr(eq + 3), line);
}

void StraceParser::complete(TaskId pid, const std::string& name, std::optional<Address> ip,
                            std::string_view result, std::size_t line) {
    const auto number = table_.number(name);
    if (!number) {
        ++stats_.unknown_names;
        warn(line, "unknown syscall name", name, "event dropped");
        return;
    }
    if (!ip) {
        ++stats_.missing_ip;
        warn(line, "missing instruction pointer", name, "address recorded as 0");
    }
    emit(SyscallEvent{pid, *number, ip.value_or(0), true});

    if (creates_task(name)) {
        const auto child = to_number<TaskId>(next_token(trim(result)));
        if (child && *child > 0) {
            emit(ForkEvent{pid, *child});
            announce(*child);
        }
    } else if (ends_task(name)) {
        emit_exit(pid);
    }
}

void StraceParser::emit_exit(TaskId pid) {
    auto it = known_.find(pid);
    if (it == known_.end() || !it->second) return;
    it->second = false;
    emit(ExitEvent{pid});
}

void StraceParser::flush_pending(TaskId pid, const char* why) {
    auto it = pending_.find(pid);
    if (it == pending_.end()) return;
    Pending started = std::move(it->second);
    pending_.erase(it);
    ++stats_.never_resumed;
    warn(started.line, "syscall never resumed", started.name, why);
    complete(pid, started.name, started.ip, "?", started.line);
}

void StraceParser::announce(TaskId child) {
    known_[child] = true;
    auto it = held_.find(child);
    if (it == held_.end()) return;
    auto lines = std::move(it->second);
    held_.erase(it);
    while (!lines.empty()) {
        // A held line may itself end the child; later lines then wait for the next fork.
        if (!known_[child]) {
            auto& again = held_[child];
            again.insert(again.begin(), lines.begin(), lines.end());
            return;
        }
        const Held held = std::move(lines.front());
        lines.pop_front();
        process(child, held.text, held.line);
    }
}

void StraceParser::finish() {
    while (!pending_.empty()) flush_pending(pending_.begin()->first, "end of input");
    while (!held_.empty()) {
        const TaskId pid = held_.begin()->first;
        warn(held_.begin()->second.front().line, "unannounced task", std::to_string(pid),
             "no fork seen for task; its events are emitted as-is");
        announce(pid);
        while (!pending_.empty()) flush_pending(pending_.begin()->first, "end of input");
    }
}

ParsedTrace parse_trace(std::istream& in, const SyscallNameTable& table, IngestOptions options) {
    ParsedTrace out;
    StraceParser parser(
        table, [&](const TraceEvent& e) { out.events.push_back(e); }, collect_into(out.diagnostics), options);
    std::string line;
    while (std::getline(in, line)) parser.feed_line(line);
    parser.finish();
    out.stats = parser.stats();
    return out;
}

ParsedTrace parse_trace_text(std::string_view text, const SyscallNameTable& table, IngestOptions options) {
    ParsedTrace out;
    StraceParser parser(
        table, [&](const TraceEvent& e) { out.events.push_back(e); }, collect_into(out.diagnostics), options);
    while (!text.empty()) {
        const auto nl = text.find('\n');
        parser.feed_line(text.substr(0, nl));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    parser.finish();
    out.stats = parser.stats();
    return out;
}

} // namespace sfip
