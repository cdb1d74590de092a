// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line workflows.  `run` is the whole program minus process setup,
// so it can be driven from tests with string streams.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sfip/analysis.hpp"
#include "sfip/bundle.hpp"
#include "sfip/diagnostics.hpp"
#include "sfip/ir.hpp"

namespace sfip::cli {

enum ExitStatus : int {
    kSuccess = 0,       // success, or a compliant trace
    kViolation = 1,     // at least one Kill
    kInputError = 2,    // unreadable, malformed or inconsistent input; bad usage
    kInternalError = 3,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Extraction pipeline behind `extract`: matrix, origin map and, when the
/// mode checks origins, finalization against the program's symbol table.
Bundle extract_bundle(const Program& program, EnforcementMode mode, std::string source,
                      const DiagnosticSink& sink = {});

/// Metrics derivable from a bundle alone.
AnalysisReport analyze_bundle(const Bundle& bundle);

/// Same as analyze_bundle(extract_bundle(program, both)), plus per-function
/// origin metrics when `functions` is set.
AnalysisReport analyze_program(const Program& program, bool functions, const DiagnosticSink& sink = {});

} // namespace sfip::cli
