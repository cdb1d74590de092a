// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/enforcement.hpp"
#include "sfip/errors.hpp"

namespace sfip {

TaskId task_of(const TraceEvent& event) {
    return std::visit([](const auto& e) { return e.task; }, event);
}

std::string to_string(KillReason reason) {
    switch (reason) {
    case KillReason::BadTransition: return "BadTransition";
    case KillReason::BadOrigin: return "BadOrigin";
    case KillReason::NotInstalled: return "NotInstalled";
    }
    return "unknown";
}

Address normalize_address(Address address, bool post, std::uint32_t insn_size) {
    if (insn_size == 0) throw ContractViolation("syscall instruction size must be positive");
    if (!post) return address;
    if (address < insn_size) {
        throw AddressUnderflowError("address " + std::to_string(address) + " smaller than instruction size " +
                                    std::to_string(insn_size));
    }
    return address - insn_size;
}

EnforcementEngine::EnforcementEngine(EngineOptions options) : options_(options) {
    if (options_.syscall_instruction_size == 0) throw ContractViolation("syscall instruction size must be positive");
}

void EnforcementEngine::install(std::shared_ptr<const Bundle> bundle, EnforcementMode mode) {
    if (bundle_) throw AlreadyInstalledError();
    if (!mode.valid()) throw ContractViolation("enforcement mode must enable at least one check");
    if (!bundle) throw ContractViolation("cannot install a null bundle");
    bundle->check_consistent();
    bundle_ = std::move(bundle);
    mode_ = mode;
    if (options_.root_task) {
        tasks_[*options_.root_task] = bundle_->state_machine.start_state();
        root_seen_ = true;
    }
}

std::optional<StateIndex> EnforcementEngine::current_state(TaskId task) const {
    auto it = tasks_.find(task);
    if (it == tasks_.end()) return std::nullopt;
    return it->second;
}

StateIndex& EnforcementEngine::state_of(TaskId task) {
    if (!root_seen_) {
        root_seen_ = true;
        return tasks_[task] = bundle_->state_machine.start_state();
    }
    auto it = tasks_.find(task);
    if (it != tasks_.end()) return it->second;
    if (killed_.contains(task)) throw ProtocolError("event for killed task " + std::to_string(task));
    throw ProtocolError("event for unknown task " + std::to_string(task));
}

Decision EnforcementEngine::on_event(const TraceEvent& event) {
    if (!bundle_) {
        return Decision::kill({task_of(event), KillReason::NotInstalled, 0, 0, 0});
    }
    if (const auto* sys = std::get_if<SyscallEvent>(&event)) return on_syscall(*sys);
    if (const auto* fork = std::get_if<ForkEvent>(&event)) {
        on_fork(*fork);
    } else {
        on_exit(std::get<ExitEvent>(event));
    }
    return Decision::allow();
}

Decision EnforcementEngine::on_syscall(const SyscallEvent& event) {
    StateIndex& state = state_of(event.task);
    const auto& machine = bundle_->state_machine;

    // Same arithmetic as normalize_address, without throwing on the hot path.
    const std::uint32_t insn_size = options_.syscall_instruction_size;
    const bool address_valid = !event.post_instruction || event.address >= insn_size;
    const Address address = event.post_instruction && address_valid ? event.address - insn_size : event.address;

    std::optional<KillReason> reason;
    if (event.number >= machine.size()) {
        // Unknown numbers fail closed regardless of mode.
        reason = KillReason::BadTransition;
    } else if (mode_.check_transitions && !machine.test(state, event.number)) {
        reason = KillReason::BadTransition;
    } else if (mode_.check_origins && (!address_valid || !bundle_->origin_map.contains(event.number, address))) {
        reason = KillReason::BadOrigin;
    }

    if (reason) {
        const Violation v{event.task, *reason, state, event.number, address};
        tasks_.erase(event.task);
        killed_.insert(event.task);
        return Decision::kill(v);
    }
    state = event.number;
    return Decision::allow();
}

void EnforcementEngine::on_fork(const ForkEvent& event) {
    const StateIndex parent = state_of(event.task);
    if (event.child == 0) throw ProtocolError("fork with child id 0");
    if (tasks_.contains(event.child)) {
        throw ProtocolError("fork onto live task " + std::to_string(event.child));
    }
    killed_.erase(event.child);
    tasks_[event.child] = parent;
}

void EnforcementEngine::on_exit(const ExitEvent& event) {
    state_of(event.task);
    tasks_.erase(event.task);
}

} // namespace sfip
