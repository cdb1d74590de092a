// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfip/diagnostics.hpp"

namespace sfip {

/// Base of every recoverable error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (bad index, empty mode, ...).
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Malformed input text. Line and column are 1-based; 0 when unknown.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed input that violates program invariants.
class SemanticError : public Error {
  public:
    explicit SemanticError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

  private:
    std::vector<Diagnostic> diagnostics_;
};

class MissingSymbolError : public Error {
  public:
    explicit MissingSymbolError(std::string function);
    const std::string& function() const noexcept { return function_; }

  private:
    std::string function_;
};

class BundleError : public Error {
  public:
    enum class Kind { BadMagic, VersionMismatch, Truncated, ChecksumMismatch, Malformed };
    BundleError(Kind kind, const std::string& what);
    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

class AlreadyInstalledError : public Error {
  public:
    AlreadyInstalledError();
};

/// Event stream inconsistent with engine state (unknown task, live fork child, ...).
class ProtocolError : public Error {
  public:
    using Error::Error;
};

class OracleError : public Error {
  public:
    enum class Kind { CfgCycle, CallCycle, PathExplosion };
    OracleError(Kind kind, const std::string& what);
    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

class AddressUnderflowError : public Error {
  public:
    using Error::Error;
};

} // namespace sfip
