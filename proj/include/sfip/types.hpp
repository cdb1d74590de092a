// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace sfip {

/// Index into the platform syscall table, always in [0, N).
using SyscallNumber = std::uint32_t;

/// Row index of the state machine: a syscall number, or N for the START sentinel.
using StateIndex = std::uint32_t;

/// Virtual address in bytes.
using Address = std::uint64_t;

/// Byte offset relative to the start of a function.
using Offset = std::uint64_t;

using TaskId = std::uint64_t;

/// Version shared by the bundle container and all structured outputs.
inline constexpr std::uint16_t kFormatVersion = 1;

} // namespace sfip
