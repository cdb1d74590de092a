// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/origins.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "sfip/errors.hpp"

namespace sfip {

bool OriginMapAbsolute::contains(SyscallNumber number, Address address) const noexcept {
    if (number >= addresses_.size()) return false;
    const auto& set = addresses_[number];
    return std::binary_search(set.begin(), set.end(), address);
}

std::span<const Address> OriginMapAbsolute::addresses(SyscallNumber number) const {
    if (number >= addresses_.size()) throw ContractViolation("origin lookup for syscall " + std::to_string(number));
    return addresses_[number];
}

std::size_t OriginMapAbsolute::total_entries() const noexcept {
    return std::accumulate(addresses_.begin(), addresses_.end(), std::size_t{0},
                           [](std::size_t acc, const auto& set) { return acc + set.size(); });
}

void OriginMapAbsolute::insert(SyscallNumber number, Address address) {
    if (number >= addresses_.size()) throw ContractViolation("origin insert for syscall " + std::to_string(number));
    auto& set = addresses_[number];
    auto it = std::lower_bound(set.begin(), set.end(), address);
    if (it == set.end() || *it != address) set.insert(it, address);
}

OriginMapAbsolute finalize_origins(const OriginMapRelative& relative, const SymbolTable& symbols) {
    OriginMapAbsolute absolute(relative.n);
    for (const auto& [site, numbers] : relative.entries) {
        auto it = symbols.find(site.function);
        if (it == symbols.end()) throw MissingSymbolError(site.function);
        if (site.offset > std::numeric_limits<Address>::max() - it->second) {
            throw ContractViolation("address overflow for " + site.function);
        }
        const Address address = it->second + site.offset;
        for (SyscallNumber number : numbers) absolute.insert(number, address);
    }
    return absolute;
}

} // namespace sfip
