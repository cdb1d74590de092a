// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/state_machine.hpp"

#include <bit>
#include <string>

#include "sfip/errors.hpp"

namespace sfip {

namespace {

void check_indices(std::uint32_t n, StateIndex previous, SyscallNumber next) {
    if (previous > n || next >= n) {
        throw ContractViolation("transition (" + std::to_string(previous) + ", " + std::to_string(next) +
                                ") outside a machine of size " + std::to_string(n));
    }
}

} // namespace

bool SyscallStateMachine::allows_transition(StateIndex previous, SyscallNumber next) const {
    check_indices(n_, previous, next);
    return test(previous, next);
}

std::span<const SyscallStateMachine::Word> SyscallStateMachine::row(StateIndex previous) const {
    if (previous > n_) throw ContractViolation("row " + std::to_string(previous) + " out of range");
    return std::span<const Word>(bits_).subspan(previous * words_per_row_, words_per_row_);
}

std::size_t SyscallStateMachine::row_popcount(StateIndex previous) const {
    std::size_t count = 0;
    for (Word w : row(previous)) count += static_cast<std::size_t>(std::popcount(w));
    return count;
}

std::vector<SyscallStateMachine::Transition> SyscallStateMachine::transitions() const {
    std::vector<Transition> out;
    for (StateIndex r = 0; r <= n_; ++r) {
        const auto words = row(r);
        for (std::size_t w = 0; w < words.size(); ++w) {
            for (Word bits = words[w]; bits != 0; bits &= bits - 1) {
                out.emplace_back(r, static_cast<SyscallNumber>(w * 64 + std::countr_zero(bits)));
            }
        }
    }
    return out;
}

SyscallStateMachine SyscallStateMachine::from_transitions(std::uint32_t n, std::span<const Transition> transitions) {
    Builder builder(n);
    for (const auto& [previous, next] : transitions) builder.add(previous, next);
    return std::move(builder).build();
}

SyscallStateMachine SyscallStateMachine::from_words(std::uint32_t n, std::vector<Word> words) {
    const std::size_t wpr = words_for_bits(n);
    if (words.size() != (static_cast<std::size_t>(n) + 1) * wpr) {
        throw ContractViolation("packed matrix has wrong word count");
    }
    if (n % 64 != 0) {
        const Word mask = ~((Word{1} << (n % 64)) - 1);
        for (std::size_t r = 0; r <= n; ++r) {
            if (words[r * wpr + wpr - 1] & mask) throw ContractViolation("packed matrix has bits past column N-1");
        }
    }
    SyscallStateMachine sm;
    sm.n_ = n;
    sm.words_per_row_ = wpr;
    sm.bits_ = std::move(words);
    return sm;
}

SyscallStateMachine::Builder::Builder(std::uint32_t n)
    : n_(n), words_per_row_(words_for_bits(n)), bits_((static_cast<std::size_t>(n) + 1) * words_per_row_, 0) {}

void SyscallStateMachine::Builder::add(StateIndex previous, SyscallNumber next) {
    check_indices(n_, previous, next);
    bits_[previous * words_per_row_ + (next >> 6)] |= Word{1} << (next & 63U);
}

void SyscallStateMachine::Builder::add_row(StateIndex previous, std::span<const Word> columns) {
    if (previous > n_ || columns.size() != words_per_row_) throw ContractViolation("add_row: bad row or width");
    for (std::size_t w = 0; w < words_per_row_; ++w) bits_[previous * words_per_row_ + w] |= columns[w];
}

bool SyscallStateMachine::Builder::test(StateIndex previous, SyscallNumber next) const {
    check_indices(n_, previous, next);
    return (bits_[previous * words_per_row_ + (next >> 6)] >> (next & 63U)) & 1U;
}

SyscallStateMachine SyscallStateMachine::Builder::build() && { return from_words(n_, std::move(bits_)); }

} // namespace sfip
