// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace sfip::detail {

/// Fixed-width bit set with word access, so rows can be OR-ed straight
/// into the packed transition matrix.
class LiveSet {
  public:
    using Word = std::uint64_t;

    LiveSet() = default;
    explicit LiveSet(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::size_t bits() const noexcept { return bits_; }
    void set(std::size_t i) { words_[i >> 6] |= Word{1} << (i & 63U); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(Word{1} << (i & 63U)); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63U)) & 1U; }

    bool any() const noexcept {
        for (Word w : words_) {
            if (w != 0) return true;
        }
        return false;
    }
    bool none() const noexcept { return !any(); }

    /// ORs `other` in (bits past our width are ignored); returns true if anything changed.
    bool merge(const LiveSet& other) { return merge_words(other.words_); }

    bool merge_words(std::span<const Word> other) {
        bool changed = false;
        const std::size_t count = std::min(other.size(), words_.size());
        for (std::size_t i = 0; i < count; ++i) {
            const Word before = words_[i];
            words_[i] |= other[i];
            changed |= words_[i] != before;
        }
        trim();
        return changed;
    }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            for (Word bits = words_[w]; bits != 0; bits &= bits - 1) {
                fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            }
        }
    }

    std::span<const Word> words() const noexcept { return words_; }

    friend bool operator==(const LiveSet&, const LiveSet&) = default;

  private:
    void trim() {
        if (bits_ % 64 != 0 && !words_.empty()) words_.back() &= (Word{1} << (bits_ % 64)) - 1;
    }

    std::size_t bits_ = 0;
    std::vector<Word> words_;
};

} // namespace sfip::detail
