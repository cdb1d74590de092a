// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sfip/types.hpp"

namespace sfip {

/// Syscall digraph stored as a packed (N+1) x N bit matrix.  Row r is the
/// previous state (r == N is START), column c the next syscall.  Each row
/// occupies ceil(N/64) little-endian words; bit c of a row lives in word
/// c/64 at position c%64.  Immutable once built.
class SyscallStateMachine {
  public:
    using Word = std::uint64_t;
    using Transition = std::pair<StateIndex, SyscallNumber>;

    class Builder;

    SyscallStateMachine() = default;

    std::uint32_t size() const noexcept { return n_; }
    StateIndex start_state() const noexcept { return n_; }
    std::size_t words_per_row() const noexcept { return words_per_row_; }

    /// Bounds-checked lookup; throws ContractViolation on out-of-range indices.
    bool allows_transition(StateIndex previous, SyscallNumber next) const;

    /// Unchecked lookup for hot paths. previous <= N, next < N.
    bool test(StateIndex previous, SyscallNumber next) const noexcept {
        return (bits_[previous * words_per_row_ + (next >> 6)] >> (next & 63U)) & 1U;
    }

    std::span<const Word> row(StateIndex previous) const;
    std::span<const Word> words() const noexcept { return bits_; }

    std::size_t row_popcount(StateIndex previous) const;

    /// All true cells in row-major order (START row last).
    std::vector<Transition> transitions() const;

    static SyscallStateMachine from_transitions(std::uint32_t n, std::span<const Transition> transitions);

    /// Takes ownership of packed words; the vector must hold (N+1)*ceil(N/64)
    /// words with no bits set past column N-1.
    static SyscallStateMachine from_words(std::uint32_t n, std::vector<Word> words);

    friend bool operator==(const SyscallStateMachine&, const SyscallStateMachine&) = default;

  private:
    std::uint32_t n_ = 0;
    std::size_t words_per_row_ = 0;
    std::vector<Word> bits_;
};

/// Mutable accumulator used during extraction.
class SyscallStateMachine::Builder {
  public:
    explicit Builder(std::uint32_t n);

    std::uint32_t size() const noexcept { return n_; }
    void add(StateIndex previous, SyscallNumber next);
    /// ORs a packed row of N bits into row `previous`.
    void add_row(StateIndex previous, std::span<const Word> columns);
    bool test(StateIndex previous, SyscallNumber next) const;

    SyscallStateMachine build() &&;

  private:
    std::uint32_t n_;
    std::size_t words_per_row_;
    std::vector<Word> bits_;
};

inline std::size_t words_for_bits(std::size_t bits) { return (bits + 63) / 64; }

} // namespace sfip
