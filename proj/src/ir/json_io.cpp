// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sfip/errors.hpp"
#include "sfip/ir.hpp"

namespace sfip {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

// Schema violations carry the JSON path instead of a line/column, since the
// DOM keeps no source positions.
[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0, 0);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing key '") + key + "'");
    return *it;
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_error(path, "expected string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) schema_error(path, "expected boolean");
    return v.get<bool>();
}

// Addresses and offsets may be written as integers or "0x..." strings.
std::uint64_t as_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        if (v.get<std::int64_t>() < 0) schema_error(path, "expected non-negative integer");
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        try {
            std::size_t used = 0;
            const auto value = std::stoull(s, &used, 0);
            if (used == s.size() && !s.empty() && s[0] != '-') return value;
        } catch (const std::exception&) {
        }
        schema_error(path, "invalid integer literal '" + s + "'");
    }
    schema_error(path, "expected non-negative integer");
}

SyscallNumber as_number(const json& v, const std::string& path) {
    const auto value = as_u64(v, path);
    if (value > 0xffffffffULL) schema_error(path, "syscall number too large");
    return static_cast<SyscallNumber>(value);
}

std::vector<std::string> as_string_list(const json& v, const std::string& path) {
    if (!v.is_array()) schema_error(path, "expected array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::optional<SyscallNumber> optional_number(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as_number(*it, path + "." + key);
}

Instruction read_instruction(const json& v, const std::string& path) {
    if (!v.is_object()) schema_error(path, "expected object");
    const auto kind = as_string(require(v, "kind", path), path + ".kind");
    if (kind == "syscall") {
        SyscallSite site;
        site.offset = as_u64(require(v, "offset", path), path + ".offset");
        const auto& numbers = require(v, "numbers", path);
        if (numbers.is_string()) {
            if (numbers.get<std::string>() != "unknown") schema_error(path + ".numbers", "expected list or \"unknown\"");
            site.unknown = true;
        } else if (numbers.is_array()) {
            for (std::size_t i = 0; i < numbers.size(); ++i) {
                site.numbers.push_back(as_number(numbers[i], path + ".numbers[" + std::to_string(i) + "]"));
            }
        } else {
            schema_error(path + ".numbers", "expected list or \"unknown\"");
        }
        if (auto it = v.find("via_wrapper"); it != v.end() && !it->is_null()) {
            site.via_wrapper = as_string(*it, path + ".via_wrapper");
        }
        return site;
    }
    if (kind == "call") {
        return DirectCall{as_string(require(v, "target", path), path + ".target"), optional_number(v, "arg_number", path)};
    }
    if (kind == "icall") {
        return IndirectCall{as_string(require(v, "signature", path), path + ".signature"),
                            optional_number(v, "arg_number", path)};
    }
    if (kind == "plain") return PlainInstruction{};
    schema_error(path + ".kind", "unknown instruction kind '" + kind + "'");
}

BasicBlock read_block(const json& v, const std::string& path) {
    if (!v.is_object()) schema_error(path, "expected object");
    BasicBlock block;
    block.id = as_string(require(v, "id", path), path + ".id");
    if (auto it = v.find("instructions"); it != v.end()) {
        if (!it->is_array()) schema_error(path + ".instructions", "expected array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            block.instructions.push_back(read_instruction((*it)[i], path + ".instructions[" + std::to_string(i) + "]"));
        }
    }
    if (auto it = v.find("successors"); it != v.end()) block.successors = as_string_list(*it, path + ".successors");
    return block;
}

Function read_function(const json& v, const std::string& path) {
    if (!v.is_object()) schema_error(path, "expected object");
    Function fn;
    fn.name = as_string(require(v, "name", path), path + ".name");
    if (auto it = v.find("aliases"); it != v.end()) fn.aliases = as_string_list(*it, path + ".aliases");
    if (auto it = v.find("signature"); it != v.end()) fn.signature = as_string(*it, path + ".signature");
    if (auto it = v.find("address_taken"); it != v.end()) fn.address_taken = as_bool(*it, path + ".address_taken");
    if (auto it = v.find("is_wrapper"); it != v.end()) fn.is_wrapper = as_bool(*it, path + ".is_wrapper");
    if (auto it = v.find("load_address"); it != v.end() && !it->is_null()) {
        fn.load_address = as_u64(*it, path + ".load_address");
    }
    const auto& blocks = require(v, "blocks", path);
    if (!blocks.is_array()) schema_error(path + ".blocks", "expected array");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        fn.blocks.push_back(read_block(blocks[i], path + ".blocks[" + std::to_string(i) + "]"));
    }
    return fn;
}

Program read_program(const json& doc) {
    if (!doc.is_object()) schema_error("$", "expected object");
    Program p;
    if (auto it = doc.find("entry"); it != doc.end()) p.entry = as_string(*it, "$.entry");
    const auto size = as_u64(require(doc, "syscall_table_size", "$"), "$.syscall_table_size");
    if (size > 0xffffffffULL) schema_error("$.syscall_table_size", "too large");
    p.syscall_table_size = static_cast<std::uint32_t>(size);
    const auto& units = require(doc, "units", "$");
    if (!units.is_array()) schema_error("$.units", "expected array");
    for (std::size_t u = 0; u < units.size(); ++u) {
        const std::string upath = "$.units[" + std::to_string(u) + "]";
        if (!units[u].is_object()) schema_error(upath, "expected object");
        TranslationUnit unit;
        unit.name = as_string(require(units[u], "name", upath), upath + ".name");
        const auto& fns = require(units[u], "functions", upath);
        if (!fns.is_array()) schema_error(upath + ".functions", "expected array");
        for (std::size_t f = 0; f < fns.size(); ++f) {
            unit.functions.push_back(read_function(fns[f], upath + ".functions[" + std::to_string(f) + "]"));
        }
        p.units.push_back(std::move(unit));
    }
    if (auto it = doc.find("symbols"); it != doc.end()) {
        if (!it->is_object()) schema_error("$.symbols", "expected object");
        for (const auto& [name, address] : it->items()) p.symbols[name] = as_u64(address, "$.symbols." + name);
    }
    return p;
}

ordered_json write_instruction(const Instruction& insn) {
    ordered_json out;
    std::visit(
        [&](const auto& i) {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, SyscallSite>) {
                out["kind"] = "syscall";
                out["offset"] = i.offset;
                if (i.unknown) {
                    out["numbers"] = "unknown";
                } else {
                    out["numbers"] = i.numbers;
                }
                if (i.via_wrapper) out["via_wrapper"] = *i.via_wrapper;
            } else if constexpr (std::is_same_v<T, DirectCall>) {
                out["kind"] = "call";
                out["target"] = i.target;
                if (i.arg_number) out["arg_number"] = *i.arg_number;
            } else if constexpr (std::is_same_v<T, IndirectCall>) {
                out["kind"] = "icall";
                out["signature"] = i.signature;
                if (i.arg_number) out["arg_number"] = *i.arg_number;
            } else {
                out["kind"] = "plain";
            }
        },
        insn);
    return out;
}

} // namespace

Program parse_program(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto byte = e.byte == 0 ? 0 : e.byte - 1;
        const auto [line, column] = line_column(text, byte);
        throw ParseError("syntax error: " + std::string(e.what()), line, column);
    }
    Program program = read_program(doc);
    auto diagnostics = validate_program(program);
    if (!diagnostics.empty()) throw SemanticError(std::move(diagnostics));
    return program;
}

Program load_program(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open IR file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_program(buffer.str());
}

std::string serialize_program(const Program& program) {
    ordered_json doc;
    doc["entry"] = program.entry;
    doc["syscall_table_size"] = program.syscall_table_size;
    doc["units"] = ordered_json::array();
    for (const auto& unit : program.units) {
        ordered_json u;
        u["name"] = unit.name;
        u["functions"] = ordered_json::array();
        for (const auto& fn : unit.functions) {
            ordered_json f;
            f["name"] = fn.name;
            f["aliases"] = fn.aliases;
            f["signature"] = fn.signature;
            f["address_taken"] = fn.address_taken;
            f["is_wrapper"] = fn.is_wrapper;
            if (fn.load_address) f["load_address"] = *fn.load_address;
            f["blocks"] = ordered_json::array();
            for (const auto& block : fn.blocks) {
                ordered_json b;
                b["id"] = block.id;
                b["instructions"] = ordered_json::array();
                for (const auto& insn : block.instructions) b["instructions"].push_back(write_instruction(insn));
                b["successors"] = block.successors;
                f["blocks"].push_back(std::move(b));
            }
            u["functions"].push_back(std::move(f));
        }
        doc["units"].push_back(std::move(u));
    }
    doc["symbols"] = ordered_json::object();
    for (const auto& [name, address] : program.symbols) doc["symbols"][name] = address;
    return doc.dump(2) + "\n";
}

} // namespace sfip
