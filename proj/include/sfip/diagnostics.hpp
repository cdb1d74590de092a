// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sfip {

enum class Severity { Warning, Error };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;    // stable short tag, e.g. "number out of range"
    std::string entity;  // offending function/block/symbol name
    std::string message; // human readable detail

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using DiagnosticSink = std::function<void(const Diagnostic&)>;

std::string to_string(const Diagnostic& d);

/// Sink that appends into a vector.
inline DiagnosticSink collect_into(std::vector<Diagnostic>& out) {
    return [&out](const Diagnostic& d) { out.push_back(d); };
}

} // namespace sfip
