// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sfip/enforcement.hpp"
#include "sfip/errors.hpp"

namespace sfip {

namespace {

std::vector<std::string_view> split_fields(std::string_view text) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t' && text[i] != '\r') ++i;
        if (i > start) fields.push_back(text.substr(start, i - start));
    }
    return fields;
}

template <typename T>
T parse_unsigned(std::string_view field, int base, std::size_t line, const char* what) {
    if (base == 16 && (field.starts_with("0x") || field.starts_with("0X"))) field.remove_prefix(2);
    T value{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value, base);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", line, 0);
    }
    return value;
}

std::string hex(Address address) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "0x%llx", static_cast<unsigned long long>(address));
    return buffer;
}

} // namespace

std::string format_event(const TraceEvent& event) {
    if (const auto* s = std::get_if<SyscallEvent>(&event)) {
        return "S " + std::to_string(s->task) + " " + std::to_string(s->number) + " " + hex(s->address) + " " +
               (s->post_instruction ? "1" : "0");
    }
    if (const auto* f = std::get_if<ForkEvent>(&event)) {
        return "F " + std::to_string(f->task) + " " + std::to_string(f->child);
    }
    return "X " + std::to_string(std::get<ExitEvent>(event).task);
}

TraceEvent parse_event(std::string_view text, std::size_t line) {
    const auto fields = split_fields(text);
    if (fields.empty()) throw ParseError("empty event line", line, 0);
    const std::string_view tag = fields[0];
    auto expect = [&](std::size_t count) {
        if (fields.size() != count) {
            throw ParseError("event '" + std::string(tag) + "' expects " + std::to_string(count - 1) + " fields", line, 0);
        }
    };
    auto task = [&](std::size_t i) {
        const auto id = parse_unsigned<TaskId>(fields[i], 10, line, "task id");
        if (id == 0) throw ParseError("task ids must be positive", line, 0);
        return id;
    };
    if (tag == "S") {
        expect(5);
        SyscallEvent e;
        e.task = task(1);
        e.number = parse_unsigned<SyscallNumber>(fields[2], 10, line, "syscall number");
        e.address = parse_unsigned<Address>(fields[3], 16, line, "address");
        const auto post = fields[4];
        if (post != "0" && post != "1") throw ParseError("post flag must be 0 or 1", line, 0);
        e.post_instruction = post == "1";
        return e;
    }
    if (tag == "F") {
        expect(3);
        return ForkEvent{task(1), task(2)};
    }
    if (tag == "X") {
        expect(2);
        return ExitEvent{task(1)};
    }
    throw ParseError("unknown event tag '" + std::string(tag) + "'", line, 0);
}

std::vector<TraceEvent> read_canonical_trace(std::istream& in) {
    std::vector<TraceEvent> events;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        events.push_back(parse_event(line, line_number));
    }
    return events;
}

void write_canonical_trace(std::ostream& out, std::span<const TraceEvent> events) {
    for (const auto& event : events) out << format_event(event) << '\n';
}

std::string report_to_json(const ReplayReport& report, bool include_timing) {
    using nlohmann::ordered_json;
    auto violation_json = [](const FirstViolation& fv) {
        ordered_json v;
        v["index"] = fv.index;
        v["task"] = fv.violation.task;
        v["reason"] = to_string(fv.violation.reason);
        v["previous"] = fv.violation.previous;
        v["number"] = fv.violation.number;
        v["address"] = hex(fv.violation.address);
        return v;
    };
    ordered_json doc;
    doc["format_version"] = kFormatVersion;
    doc["events_processed"] = report.events_processed;
    doc["events_skipped"] = report.events_skipped;
    doc["violation_count"] = report.violations.size();
    doc["violations"] = ordered_json::array();
    for (const auto& v : report.violations) doc["violations"].push_back(violation_json(v));
    doc["tasks"] = ordered_json::array();
    for (const auto& [task, verdict] : report.tasks) {
        ordered_json t;
        t["task"] = task;
        t["events"] = verdict.events;
        t["verdict"] = verdict.killed() ? "killed" : "allowed";
        if (verdict.first_violation) t["first_violation"] = violation_json(*verdict.first_violation);
        doc["tasks"].push_back(std::move(t));
    }
    auto issues = [](const std::vector<StreamIssue>& list, const char* key) {
        ordered_json out = ordered_json::array();
        for (const auto& issue : list) out.push_back({{key, issue.position}, {"message", issue.message}});
        return out;
    };
    doc["decode_errors"] = issues(report.decode_errors, "line");
    doc["protocol_errors"] = issues(report.protocol_errors, "index");
    if (include_timing) {
        doc["non_canonical"] = {{"seconds", report.seconds}, {"events_per_second", report.events_per_second()}};
    }
    return doc.dump(2) + "\n";
}

} // namespace sfip
