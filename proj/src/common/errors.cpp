// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/errors.hpp"

#include <sstream>

namespace sfip {

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
    std::ostringstream out;
    for (std::size_t i = 0; i < diagnostics.size(); ++i) {
        if (i != 0) out << "; ";
        out << to_string(diagnostics[i]);
    }
    return out.str();
}

std::string with_position(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
}

} // namespace

std::string to_string(const Diagnostic& d) {
    std::string out = d.severity == Severity::Warning ? "warning: " : "error: ";
    out += d.code;
    if (!d.entity.empty()) out += " '" + d.entity + "'";
    if (!d.message.empty()) out += ": " + d.message;
    return out;
}

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(with_position(what, line, column)), line_(line), column_(column) {}

SemanticError::SemanticError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

MissingSymbolError::MissingSymbolError(std::string function)
    : Error("no load address for function '" + function + "'"), function_(std::move(function)) {}

BundleError::BundleError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

AlreadyInstalledError::AlreadyInstalledError()
    : Error("syscall-flow information already installed; updates are rejected") {}

OracleError::OracleError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

} // namespace sfip
