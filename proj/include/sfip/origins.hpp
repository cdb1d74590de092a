// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sfip/ir.hpp"
#include "sfip/types.hpp"

namespace sfip {

/// A syscall instruction located relative to its enclosing function.
struct OriginSite {
    std::string function;
    Offset offset = 0;

    friend auto operator<=>(const OriginSite&, const OriginSite&) = default;
    friend bool operator==(const OriginSite&, const OriginSite&) = default;
};

/// (function, offset) -> sorted syscall numbers the instruction may issue.
struct OriginMapRelative {
    std::uint32_t n = 0;
    std::map<OriginSite, std::vector<SyscallNumber>> entries;

    bool empty() const noexcept { return entries.empty(); }
    friend bool operator==(const OriginMapRelative&, const OriginMapRelative&) = default;
};

/// Per syscall number, the sorted duplicate-free addresses it may be issued from.
class OriginMapAbsolute {
  public:
    OriginMapAbsolute() = default;
    explicit OriginMapAbsolute(std::uint32_t n) : addresses_(n) {}

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(addresses_.size()); }

    /// Binary search; false for numbers >= N.
    bool contains(SyscallNumber number, Address address) const noexcept;

    std::span<const Address> addresses(SyscallNumber number) const;

    /// Total number of (syscall, address) pairs.
    std::size_t total_entries() const noexcept;

    bool empty() const noexcept { return total_entries() == 0; }

    /// Inserts keeping order; used by finalization and decoding.
    void insert(SyscallNumber number, Address address);

    friend bool operator==(const OriginMapAbsolute&, const OriginMapAbsolute&) = default;

  private:
    std::vector<std::vector<Address>> addresses_;
};

/// Adds each function's load address to its site offsets and inverts to the
/// number -> addresses form.  All-or-nothing: throws MissingSymbolError
/// naming the first function without an address.
OriginMapAbsolute finalize_origins(const OriginMapRelative& relative, const SymbolTable& symbols);

} // namespace sfip
