// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <istream>

#include "sfip/enforcement.hpp"
#include "sfip/errors.hpp"

namespace sfip {

bool ReplayReport::same_verdicts(const ReplayReport& other) const {
    return events_processed == other.events_processed && events_skipped == other.events_skipped &&
           tasks == other.tasks && violations == other.violations && decode_errors == other.decode_errors &&
           protocol_errors == other.protocol_errors;
}

Replayer::Replayer(EnforcementEngine& engine) : engine_(engine), started_(std::chrono::steady_clock::now()) {}

void Replayer::feed(const TraceEvent& event) {
    const std::uint64_t index = index_++;
    const TaskId task = task_of(event);
    if (engine_.is_killed(task)) {
        ++report_.events_skipped;
        return;
    }
    try {
        const Decision decision = engine_.on_event(event);
        ++report_.events_processed;
        auto& verdict = report_.tasks[task];
        ++verdict.events;
        if (const auto* fork = std::get_if<ForkEvent>(&event)) report_.tasks.try_emplace(fork->child);
        if (decision.violation) {
            const FirstViolation first{index, *decision.violation};
            if (!verdict.first_violation) verdict.first_violation = first;
            report_.violations.push_back(first);
        }
    } catch (const ProtocolError& e) {
        report_.protocol_errors.push_back({index, e.what()});
    }
}

void Replayer::decode_error(std::uint64_t line, std::string message) {
    report_.decode_errors.push_back({line, std::move(message)});
}

ReplayReport Replayer::finish() {
    report_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    return std::move(report_);
}

ReplayReport replay(EnforcementEngine& engine, std::span<const TraceEvent> events) {
    Replayer replayer(engine);
    for (const auto& event : events) replayer.feed(event);
    return replayer.finish();
}

ReplayReport replay_stream(EnforcementEngine& engine, std::istream& in) {
    Replayer replayer(engine);
    std::string line;
    std::uint64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        try {
            replayer.feed(parse_event(line, line_number));
        } catch (const ParseError& e) {
            replayer.decode_error(line_number, e.what());
        }
    }
    return replayer.finish();
}

} // namespace sfip
