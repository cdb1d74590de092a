// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

// Program IR: the per-function facts a compiler front/backend and linker
// collect for syscall-flow extraction (syscall sites, calls, CFG edges,
// signatures, symbol addresses).

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sfip/diagnostics.hpp"
#include "sfip/types.hpp"

namespace sfip {

/// Canonical parameter/return encoding; equality is exact string match.
using Signature = std::string;

/// function name -> load address.
using SymbolTable = std::map<std::string, Address, std::less<>>;

struct SyscallSite {
    Offset offset = 0;
    /// Concrete numbers the instruction may issue. Empty iff `unknown`.
    std::vector<SyscallNumber> numbers;
    /// The number arrives as an argument (label value -1); resolved from call sites.
    bool unknown = false;
    /// Libc wrapper this site was emitted for, when known. Informational.
    std::optional<std::string> via_wrapper;

    friend bool operator==(const SyscallSite&, const SyscallSite&) = default;
};

struct DirectCall {
    std::string target;
    /// Constant syscall number passed to a number-parametric callee (`syscall(nr, ...)`).
    std::optional<SyscallNumber> arg_number;

    friend bool operator==(const DirectCall&, const DirectCall&) = default;
};

struct IndirectCall {
    Signature signature;
    std::optional<SyscallNumber> arg_number;

    friend bool operator==(const IndirectCall&, const IndirectCall&) = default;
};

struct PlainInstruction {
    friend bool operator==(const PlainInstruction&, const PlainInstruction&) = default;
};

using Instruction = std::variant<SyscallSite, DirectCall, IndirectCall, PlainInstruction>;

struct BasicBlock {
    std::string id;
    std::vector<Instruction> instructions;
    std::vector<std::string> successors;

    friend bool operator==(const BasicBlock&, const BasicBlock&) = default;
};

struct Function {
    std::string name;
    std::vector<std::string> aliases;
    Signature signature = "void()";
    bool address_taken = false;
    bool is_wrapper = false;
    std::optional<Address> load_address;
    /// First block is the entry. No blocks means an external declaration.
    std::vector<BasicBlock> blocks;

    bool is_declaration() const noexcept { return blocks.empty(); }
    bool has_unknown_sites() const;

    friend bool operator==(const Function&, const Function&) = default;
};

struct TranslationUnit {
    std::string name;
    std::vector<Function> functions;

    friend bool operator==(const TranslationUnit&, const TranslationUnit&) = default;
};

struct Program {
    std::string entry = "main";
    std::uint32_t syscall_table_size = 0;
    std::vector<TranslationUnit> units;
    SymbolTable symbols;

    /// Symbols merged with per-function load addresses, keyed by canonical name.
    SymbolTable symbol_table() const;

    friend bool operator==(const Program&, const Program&) = default;
};

/// Name and alias lookup over a Program.  Holds pointers into the program,
/// which must outlive the index.
class FunctionIndex {
  public:
    explicit FunctionIndex(const Program& program);

    /// Resolves aliases. nullptr when the name is unknown.
    const Function* find(std::string_view name) const;

    /// Every function in unit order.
    const std::vector<const Function*>& functions() const noexcept { return functions_; }

    /// Address-taken defined or declared functions whose signature equals `sig`,
    /// in unit order.
    std::vector<const Function*> signature_matches(std::string_view sig) const;

  private:
    std::vector<const Function*> functions_;
    std::unordered_map<std::string, const Function*> by_name_;
};

/// Parses and validates an IR document. Throws ParseError for malformed JSON
/// or schema violations and SemanticError when invariants fail.
Program parse_program(std::string_view text);

/// Reads a file and parses it.
Program load_program(const std::string& path);

/// Canonical JSON rendering; parse_program(serialize_program(p)) == p.
std::string serialize_program(const Program& program);

/// One diagnostic per violated invariant; empty when the program is valid.
std::vector<Diagnostic> validate_program(const Program& program);

} // namespace sfip
