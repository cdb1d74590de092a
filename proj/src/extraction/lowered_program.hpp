// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sfip/diagnostics.hpp"
#include "sfip/ir.hpp"

namespace sfip::detail {

struct LoweredSite {
    const SyscallSite* source;
};

struct LoweredCall {
    /// Resolved callee indices; empty for an unresolved indirect call.
    std::vector<std::uint32_t> targets;
    std::optional<SyscallNumber> arg_number;
    bool indirect = false;
    std::string description; // for diagnostics
};

using Step = std::variant<LoweredSite, LoweredCall>;

struct LoweredBlock {
    std::vector<Step> steps;
    std::vector<std::uint32_t> successors;
};

struct LoweredFunction {
    const Function* source = nullptr;
    std::vector<LoweredBlock> blocks;
    bool declaration() const noexcept { return blocks.empty(); }
};

/// Index-based view of a validated Program with calls resolved: aliases map
/// to their function, indirect calls to every address-taken function with an
/// identical signature.
class LoweredProgram {
  public:
    explicit LoweredProgram(const Program& program);

    std::uint32_t table_size() const noexcept { return n_; }
    std::uint32_t entry() const noexcept { return entry_; }
    const std::vector<LoweredFunction>& functions() const noexcept { return functions_; }

  private:
    std::uint32_t n_;
    std::uint32_t entry_ = 0;
    std::vector<LoweredFunction> functions_;
};

/// Emits each distinct warning once.
class WarningOnce {
  public:
    explicit WarningOnce(const DiagnosticSink& sink) : sink_(sink) {}
    void warn(const std::string& code, const std::string& entity, const std::string& message);

  private:
    const DiagnosticSink& sink_;
    std::set<std::pair<std::string, std::string>> seen_;
};

/// Warnings shared by both builders when a reachable call is processed.
void warn_about_call(WarningOnce& warnings, const LoweredProgram& lowered, const LoweredCall& call,
                     const std::string& caller);

} // namespace sfip::detail
