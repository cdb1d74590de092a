// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <sstream>

#include "sfip/errors.hpp"
#include "sfip/trace_ingest.hpp"

namespace sfip {

namespace detail {
extern const std::string_view kDefaultNameTableCsv;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

SyscallNameTable SyscallNameTable::from_csv(std::istream& in, std::string profile) {
    SyscallNameTable table;
    table.profile_ = std::move(profile);
    std::map<SyscallNumber, std::string> rows;
    std::string text;
    std::size_t line = 0;
    bool header = true;
    while (std::getline(in, text)) {
        ++line;
        const std::string_view row = trim(text);
        if (row.empty() || row.front() == '#') continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos) throw ParseError("expected 'number,name'", line, 1);
        const std::string_view first = trim(row.substr(0, comma));
        const std::string_view second = trim(row.substr(comma + 1));
        if (header) {
            header = false;
            if (first != "number" || second != "name") throw ParseError("missing 'number,name' header", line, 1);
            continue;
        }
        SyscallNumber number = 0;
        const auto [ptr, ec] = std::from_chars(first.data(), first.data() + first.size(), number);
        if (ec != std::errc{} || ptr != first.data() + first.size()) {
            throw ParseError("invalid syscall number '" + std::string(first) + "'", line, 1);
        }
        if (second.empty() || second.find(',') != std::string_view::npos) {
            throw ParseError("invalid syscall name", line, comma + 2);
        }
        if (!rows.emplace(number, std::string(second)).second) {
            throw ParseError("duplicate syscall number " + std::to_string(number), line, 1);
        }
        if (!table.numbers_.emplace(std::string(second), number).second) {
            throw ParseError("duplicate syscall name '" + std::string(second) + "'", line, comma + 2);
        }
    }
    if (header) throw ParseError("empty name table", line, 0);
    SyscallNumber expected = 0;
    for (auto& [number, name] : rows) {
        if (number != expected) throw ParseError("syscall numbers must be dense; missing " + std::to_string(expected), 0, 0);
        table.names_.push_back(std::move(name));
        ++expected;
    }
    if (table.names_.empty()) throw ParseError("name table has no entries", 0, 0);
    return table;
}

SyscallNameTable SyscallNameTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open name table '" + path + "'");
    return from_csv(in, path);
}

const SyscallNameTable& SyscallNameTable::default_table() {
    static const SyscallNameTable table = [] {
        std::istringstream in{std::string(detail::kDefaultNameTableCsv)};
        return from_csv(in, "x86_64");
    }();
    return table;
}

std::optional<SyscallNumber> SyscallNameTable::number(std::string_view name) const {
    auto it = numbers_.find(name);
    if (it == numbers_.end()) return std::nullopt;
    return it->second;
}

const std::string& SyscallNameTable::name(SyscallNumber number) const {
    if (number >= names_.size()) {
        throw ContractViolation("syscall number " + std::to_string(number) + " outside name table");
    }
    return names_[number];
}

} // namespace sfip
