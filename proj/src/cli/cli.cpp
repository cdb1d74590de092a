// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sfip/cli.hpp"
#include "sfip/enforcement.hpp"
#include "sfip/errors.hpp"
#include "sfip/extraction.hpp"
#include "sfip/trace_ingest.hpp"

namespace sfip::cli {

Bundle extract_bundle(const Program& program, EnforcementMode mode, std::string source, const DiagnosticSink& sink) {
    if (!mode.valid()) throw ContractViolation("enforcement mode must enable at least one check");
    Bundle bundle;
    bundle.state_machine = build_state_machine(program, sink);
    const OriginMapRelative relative = build_origin_map(program, sink);
    bundle.origin_map = mode.check_origins ? finalize_origins(relative, program.symbol_table())
                                           : OriginMapAbsolute(program.syscall_table_size);
    bundle.mode_hint = mode;
    bundle.provenance.source = std::move(source);
    return bundle;
}

AnalysisReport analyze_bundle(const Bundle& bundle) {
    AnalysisReport report;
    report.state_machine = state_machine_metrics(bundle.state_machine);
    report.baseline = baseline_comparison(bundle.state_machine);
    report.addresses = address_metrics(bundle.origin_map);
    return report;
}

AnalysisReport analyze_program(const Program& program, bool functions, const DiagnosticSink& sink) {
    AnalysisReport report = analyze_bundle(extract_bundle(program, EnforcementMode::both(), "", sink));
    if (functions) report.origins = origin_metrics(build_origin_map(program), program);
    return report;
}

namespace {

class UsageError : public Error {
  public:
    using Error::Error;
};

// Names for diagnostics output; numeric fallback when the table does not fit.
class Namer {
  public:
    Namer(const SyscallNameTable* table, std::uint32_t n) : table_(table && table->size() == n ? table : nullptr), n_(n) {}

    std::string state(StateIndex s) const { return s == n_ ? "START" : syscall(s); }
    std::string syscall(SyscallNumber nr) const {
        if (table_ != nullptr && nr < table_->size()) return table_->name(nr);
        return "#" + std::to_string(nr);
    }

  private:
    const SyscallNameTable* table_;
    std::uint32_t n_;
};

std::string hex(Address address) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "0x%llx", static_cast<unsigned long long>(address));
    return buffer;
}

bool is_bundle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && std::string_view(magic, 4) == "SFIP";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    std::optional<std::string> name_table_path;

    std::unique_ptr<SyscallNameTable> owned_table;

    const SyscallNameTable& table() {
        if (!name_table_path) return SyscallNameTable::default_table();
        if (!owned_table) owned_table = std::make_unique<SyscallNameTable>(SyscallNameTable::load(*name_table_path));
        return *owned_table;
    }

    DiagnosticSink warnings(std::size_t& count) {
        return [this, &count](const Diagnostic& d) {
            ++count;
            err << to_string(d) << '\n';
        };
    }
};

// One input as either a bundle or an IR program.
struct LoadedInput {
    Bundle bundle;
    std::optional<Program> program;
};

LoadedInput load_input(Context& ctx, const std::string& path) {
    LoadedInput input;
    if (is_bundle_file(path)) {
        input.bundle = read_bundle_file(path);
    } else {
        input.program = load_program(path);
        std::size_t warnings = 0;
        input.bundle = extract_bundle(*input.program, EnforcementMode::both(), path, ctx.warnings(warnings));
    }
    return input;
}

std::string describe(const Violation& v, const Namer& names) {
    switch (v.reason) {
    case KillReason::BadTransition:
        return "BadTransition(" + names.state(v.previous) + ", " + names.syscall(v.number) + ")";
    case KillReason::BadOrigin:
        return "BadOrigin(" + names.syscall(v.number) + ", " + hex(v.address) + ")";
    case KillReason::NotInstalled: return "NotInstalled";
    }
    return "unknown";
}

int cmd_extract(Context& ctx, const std::string& ir_path, const std::string& out_path, const std::string& mode) {
    const Program program = load_program(ir_path);
    std::size_t warnings = 0;
    const Bundle bundle = extract_bundle(program, parse_mode(mode), ir_path, ctx.warnings(warnings));
    write_bundle_file(out_path, bundle);

    std::size_t sites = 0;
    for (const auto& unit : program.units) {
        for (const auto& fn : unit.functions) {
            for (const auto& block : fn.blocks) {
                sites += static_cast<std::size_t>(std::count_if(
                    block.instructions.begin(), block.instructions.end(),
                    [](const Instruction& i) { return std::holds_alternative<SyscallSite>(i); }));
            }
        }
    }
    const auto metrics = state_machine_metrics(bundle.state_machine);
    ctx.out << "wrote " << out_path << "\n"
            << "syscall sites: " << sites << "\n"
            << "states: " << metrics.state_count << "\n"
            << "transitions: " << metrics.total_transitions << " (+" << metrics.first_syscalls << " first syscalls)\n"
            << "origin addresses: " << bundle.origin_map.total_entries() << "\n"
            << "mode: " << to_string(bundle.mode_hint) << "\n"
            << "warnings: " << warnings << "\n";
    return kSuccess;
}

struct CheckOptions {
    std::string bundle;
    std::string trace = "-";
    std::optional<std::string> mode;
    std::uint32_t insn_size = 2;
    std::optional<std::string> report;
    bool timing = false;
};

int cmd_check(Context& ctx, const CheckOptions& o) {
    auto bundle = std::make_shared<const Bundle>(read_bundle_file(o.bundle));
    const EnforcementMode mode = o.mode ? parse_mode(*o.mode) : bundle->mode_hint;
    if (o.insn_size == 0) throw UsageError("--insn-size must be positive");

    EnforcementEngine engine(EngineOptions{o.insn_size, std::nullopt});
    engine.install(bundle, mode);

    ReplayReport report;
    if (o.trace == "-") {
        report = replay_stream(engine, ctx.in);
    } else {
        std::ifstream trace(o.trace);
        if (!trace) throw Error("cannot open trace '" + o.trace + "'");
        report = replay_stream(engine, trace);
    }

    const Namer names(&ctx.table(), bundle->state_machine.size());
    std::size_t killed = 0;
    for (const auto& [task, verdict] : report.tasks) killed += verdict.killed() ? 1 : 0;
    ctx.out << "mode: " << to_string(mode) << "\n"
            << "events processed: " << report.events_processed << "\n"
            << "events skipped: " << report.events_skipped << "\n"
            << "tasks: " << report.tasks.size() << " (" << killed << " killed)\n"
            << "violations: " << report.violations.size() << "\n";
    for (const auto& v : report.violations) {
        ctx.out << "  event " << v.index << ": task " << v.violation.task << " killed, "
                << describe(v.violation, names) << "\n";
    }
    ctx.out << "decode errors: " << report.decode_errors.size() << "\n"
            << "protocol errors: " << report.protocol_errors.size() << "\n";
    for (const auto& e : report.decode_errors) ctx.err << "line " << e.position << ": " << e.message << "\n";
    for (const auto& e : report.protocol_errors) ctx.err << "event " << e.position << ": " << e.message << "\n";
    if (o.timing) {
        char line[128];
        std::snprintf(line, sizeof line, "throughput: %.0f events/s (%.3f s, non-canonical)\n",
                      report.events_per_second(), report.seconds);
        ctx.out << line;
    }
    if (o.report) write_text_file(*o.report, report_to_json(report, o.timing));

    if (report.has_violation()) return kViolation;
    if (!report.decode_errors.empty() || !report.protocol_errors.empty()) return kInputError;
    return kSuccess;
}

int cmd_analyze(Context& ctx, const std::string& path, bool functions, const std::optional<std::string>& report_path) {
    const LoadedInput input = load_input(ctx, path);
    AnalysisReport report = analyze_bundle(input.bundle);
    if (functions) {
        if (!input.program) throw UsageError("--functions needs an IR file (bundles carry no function names)");
        report.origins = origin_metrics(build_origin_map(*input.program), *input.program);
    }
    ctx.out << format_report_text(report);
    if (report_path) write_text_file(*report_path, report_to_json(report));
    return kSuccess;
}

int cmd_reach(Context& ctx, const std::string& path, const std::string& from, const std::string& to) {
    const LoadedInput input = load_input(ctx, path);
    const auto& machine = input.bundle.state_machine;
    const auto& table = ctx.table();
    if (table.size() != machine.size()) {
        throw UsageError("name table has " + std::to_string(table.size()) + " entries but the machine has N = " +
                         std::to_string(machine.size()));
    }
    auto resolve = [&](const std::string& name) {
        const auto nr = table.number(name);
        if (!nr) throw UsageError("unknown syscall name '" + name + "'");
        return *nr;
    };
    const StateIndex start = from == "START" ? machine.start_state() : resolve(from);
    const SyscallNumber target = resolve(to);
    const Namer names(&table, machine.size());
    const auto chain = reachable(machine, start, target);
    if (!chain) {
        ctx.out << "unreachable\n";
        return kSuccess;
    }
    for (std::size_t i = 0; i < chain->size(); ++i) ctx.out << (i ? " -> " : "") << names.state((*chain)[i]);
    ctx.out << "\n";
    return kSuccess;
}

int cmd_parse_trace(Context& ctx, const std::string& input, const std::string& output, TaskId default_pid) {
    std::ifstream file;
    if (input != "-") {
        file.open(input);
        if (!file) throw Error("cannot open trace '" + input + "'");
    }
    std::istream& src = input == "-" ? ctx.in : file;

    std::ofstream out_file;
    if (output != "-") {
        out_file.open(output, std::ios::binary | std::ios::trunc);
        if (!out_file) throw Error("cannot write '" + output + "'");
    }
    std::ostream& dst = output == "-" ? ctx.out : out_file;

    std::size_t diagnostics = 0;
    StraceParser parser(
        ctx.table(), [&](const TraceEvent& e) { dst << format_event(e) << '\n'; }, ctx.warnings(diagnostics),
        IngestOptions{default_pid});
    std::string line;
    while (std::getline(src, line)) parser.feed_line(line);
    parser.finish();
    dst.flush();

    const auto& s = parser.stats();
    ctx.err << "lines: " << s.lines << ", syscalls: " << s.syscall_events << ", forks: " << s.fork_events
            << ", exits: " << s.exit_events << "\n"
            << "dropped unknown names: " << s.unknown_names << ", signals skipped: " << s.signals_skipped
            << ", orphan resumed: " << s.orphan_resumed << ", malformed: " << s.malformed
            << ", missing ip: " << s.missing_ip << ", never resumed: " << s.never_resumed << "\n"
            << "diagnostics: " << diagnostics << "\n";
    return kSuccess;
}

int cmd_oracle(Context& ctx, const std::string& path, std::uint64_t max_paths) {
    const Program program = load_program(path);
    std::set<TransitionPair> oracle;
    try {
        oracle = oracle_transition_pairs(program, max_paths);
    } catch (const OracleError& e) {
        ctx.err << "oracle: " << e.what() << "\n";
        return kInputError;
    }
    const auto machine = build_state_machine(program);
    const auto cells = machine.transitions();
    const std::set<TransitionPair> built(cells.begin(), cells.end());
    const Namer names(&ctx.table(), machine.size());
    std::size_t missing = 0, extra = 0;
    for (const auto& p : oracle) {
        if (!built.contains(p)) {
            ++missing;
            ctx.out << "missing: " << names.state(p.first) << " -> " << names.syscall(p.second) << "\n";
        }
    }
    for (const auto& p : built) {
        if (!oracle.contains(p)) {
            ++extra;
            ctx.out << "extra: " << names.state(p.first) << " -> " << names.syscall(p.second) << "\n";
        }
    }
    ctx.out << "oracle pairs: " << oracle.size() << "\n"
            << "machine transitions: " << built.size() << "\n"
            << "equal: " << (missing == 0 && extra == 0 ? "yes" : "no") << "\n";
    return missing == 0 && extra == 0 ? kSuccess : kViolation;
}

int cmd_dump(Context& ctx, const std::string& path) {
    const LoadedInput input = load_input(ctx, path);
    const Bundle& b = input.bundle;
    const Namer names(&ctx.table(), b.state_machine.size());
    ctx.out << "# non-canonical debug rendering\n"
            << "source: " << b.provenance.source << "\n"
            << "format version: " << b.provenance.format_version << "\n"
            << "n: " << b.state_machine.size() << "\n"
            << "mode hint: " << to_string(b.mode_hint) << "\n"
            << "transitions:\n";
    for (const auto& [prev, next] : b.state_machine.transitions()) {
        ctx.out << "  " << names.state(prev) << " -> " << names.syscall(next) << "\n";
    }
    ctx.out << "origins:\n";
    for (SyscallNumber nr = 0; nr < b.origin_map.size(); ++nr) {
        const auto addresses = b.origin_map.addresses(nr);
        if (addresses.empty()) continue;
        ctx.out << "  " << names.syscall(nr) << ":";
        for (Address a : addresses) ctx.out << " " << hex(a);
        ctx.out << "\n";
    }
    return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Syscall-flow integrity toolkit: extract, enforce and analyze syscall state machines", "sfip"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx{in, out, err, std::nullopt, nullptr};
    app.add_option("--name-table", ctx.name_table_path, "Syscall name table CSV (number,name)")
        ->check(CLI::ExistingFile);

    std::string ir_path, out_path, mode = "both";
    auto* extract = app.add_subcommand("extract", "Build a .sfip bundle from an IR file");
    extract->add_option("ir", ir_path, "IR file")->required();
    extract->add_option("-o,--output", out_path, "Bundle to write")->required();
    extract->add_option("--mode", mode, "Mode hint stored in the bundle: transitions|origins|both")
        ->check(CLI::IsMember({"transitions", "origins", "both"}));

    CheckOptions check_opts;
    auto* check = app.add_subcommand("check", "Replay a canonical trace against a bundle");
    check->add_option("bundle", check_opts.bundle, "Bundle file")->required();
    check->add_option("trace", check_opts.trace, "Canonical trace file, '-' for stdin");
    check->add_option("--mode", check_opts.mode, "transitions|origins|both (default: the bundle's mode hint)")
        ->check(CLI::IsMember({"transitions", "origins", "both"}));
    check->add_option("--insn-size", check_opts.insn_size, "Syscall instruction size in bytes");
    check->add_option("--report", check_opts.report, "Write the structured report (JSON) here");
    check->add_flag("--timing", check_opts.timing, "Print throughput (non-canonical)");

    std::string analyze_path;
    bool functions = false;
    std::optional<std::string> analyze_report;
    auto* analyze = app.add_subcommand("analyze", "Print state-machine, baseline and origin metrics");
    analyze->add_option("input", analyze_path, "Bundle or IR file")->required();
    analyze->add_flag("--functions", functions, "Add per-function origin metrics (IR input only)");
    analyze->add_option("--report", analyze_report, "Write the structured report (JSON) here");

    std::string reach_path, reach_from, reach_to;
    auto* reach = app.add_subcommand("reach", "Shortest transition chain between two syscalls");
    reach->add_option("input", reach_path, "Bundle or IR file")->required();
    reach->add_option("from", reach_from, "Syscall name or START")->required();
    reach->add_option("to", reach_to, "Syscall name")->required();

    std::string raw_path = "-", canonical_path = "-";
    TaskId default_pid = 1;
    auto* parse_trace_cmd = app.add_subcommand("parse-trace", "Convert strace output to canonical trace lines");
    parse_trace_cmd->add_option("input", raw_path, "strace output, '-' for stdin");
    parse_trace_cmd->add_option("-o,--output", canonical_path, "Canonical trace, '-' for stdout");
    parse_trace_cmd->add_option("--default-pid", default_pid, "Task id for lines without a pid")
        ->check(CLI::PositiveNumber);

    std::string oracle_path;
    std::uint64_t max_paths = 100000;
    auto* oracle = app.add_subcommand("oracle", "Compare the extracted matrix with brute-force path enumeration");
    oracle->add_option("ir", oracle_path, "Acyclic IR file")->required();
    oracle->add_option("--max-paths", max_paths, "Give up after this many paths");

    std::string dump_path;
    auto* dump = app.add_subcommand("dump", "Human-readable bundle contents (non-canonical)");
    dump->add_option("input", dump_path, "Bundle or IR file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    try {
        if (extract->parsed()) return cmd_extract(ctx, ir_path, out_path, mode);
        if (check->parsed()) return cmd_check(ctx, check_opts);
        if (analyze->parsed()) return cmd_analyze(ctx, analyze_path, functions, analyze_report);
        if (reach->parsed()) return cmd_reach(ctx, reach_path, reach_from, reach_to);
        if (parse_trace_cmd->parsed()) return cmd_parse_trace(ctx, raw_path, canonical_path, default_pid);
        if (oracle->parsed()) return cmd_oracle(ctx, oracle_path, max_paths);
        if (dump->parsed()) return cmd_dump(ctx, dump_path);
    } catch (const SemanticError& e) {
        for (const auto& d : e.diagnostics()) err << to_string(d) << "\n";
        return kInputError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

} // namespace sfip::cli
