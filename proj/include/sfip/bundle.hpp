// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfip/origins.hpp"
#include "sfip/state_machine.hpp"

namespace sfip {

/// Which checks the enforcement applies.  At least one flag must be set.
struct EnforcementMode {
    bool check_transitions = true;
    bool check_origins = true;

    static constexpr EnforcementMode transitions() { return {true, false}; }
    static constexpr EnforcementMode origins() { return {false, true}; }
    static constexpr EnforcementMode both() { return {true, true}; }

    bool valid() const noexcept { return check_transitions || check_origins; }
    friend bool operator==(const EnforcementMode&, const EnforcementMode&) = default;
};

/// Parses "transitions" | "origins" | "both".
EnforcementMode parse_mode(std::string_view text);
std::string to_string(EnforcementMode mode);

struct Provenance {
    std::string source;
    std::uint16_t format_version = kFormatVersion;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Installable syscall-flow information for one program.
struct Bundle {
    SyscallStateMachine state_machine;
    OriginMapAbsolute origin_map;
    EnforcementMode mode_hint;
    Provenance provenance;

    /// Throws ContractViolation when the matrix and origin map disagree on N.
    void check_consistent() const;

    friend bool operator==(const Bundle&, const Bundle&) = default;
};

using Bytes = std::vector<std::uint8_t>;

/// Deterministic little-endian encoding; see docs/bundle-format.md.
Bytes save_bundle(const Bundle& bundle);

/// Throws BundleError with a distinguishable kind.
Bundle load_bundle(std::span<const std::uint8_t> bytes);

/// Byte offset and length of the matrix segment in an encoded bundle.
struct SegmentExtent {
    std::size_t offset;
    std::size_t length;
};
SegmentExtent matrix_segment(std::span<const std::uint8_t> bytes);

Bundle read_bundle_file(const std::string& path);
void write_bundle_file(const std::string& path, const Bundle& bundle);

/// 64-bit FNV-1a, the bundle trailer checksum.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

} // namespace sfip
