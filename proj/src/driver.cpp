#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>

#include "audala/canonical.hpp"
#include "audala/engine.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace audala {

namespace {

// Commands that touch only the executing instance's own stack and frames.
// These commute across instances, so a round of them can run in parallel and
// still equal some sequential interleaving.
bool is_local_command(const Command& c, const std::vector<Value>& stack) {
    switch (c.kind) {
        case CmdKind::Push:
        case CmdKind::PushThis:
        case CmdKind::Not:
        case CmdKind::If: return true;
        case CmdKind::Op:
            if (c.op == BinOp::Div || c.op == BinOp::Mod) {
                // keep a faulting division for the serial phase
                if (stack.empty() || !is_int(stack.back())) return true;
                return std::get<int64_t>(stack.back()) != 0;
            }
            return true;
        default: return false;
    }
}

}  // namespace

struct Driver {
    const Engine& eng;
    ExecState st;
    RunOptions opt;
    RunResult res;

    std::vector<uint32_t> active;  // busy labels
    std::vector<int32_t> posOf;    // label -> index into active, or -1
    std::mt19937_64 rng;
    std::vector<uint32_t> roundQueue;  // lockstep
    std::vector<int64_t> iterCount;    // per stability depth
    std::vector<uint64_t> blocksDone;  // per label (iterator bookkeeping)
    std::unordered_map<Sym, int> windowOrdinals;
    bool windowOpen = false;

    Driver(const Engine& e, ExecState start, RunOptions o)
        : eng(e), st(std::move(start)), opt(std::move(o)) {
        rng.seed(opt.policy.seed);
    }

    void rebuildActive() {
        active.clear();
        posOf.assign(st.env.size(), -1);
        for (uint32_t id = 0; id < st.env.size(); ++id) {
            const auto* si = std::get_if<StructInstance>(&st.env[id]);
            if (si && si->busy()) {
                posOf[id] = static_cast<int32_t>(active.size());
                active.push_back(id);
            }
        }
    }

    void deactivate(uint32_t id) {
        int32_t pos = posOf[id];
        if (pos < 0) return;
        uint32_t last = active.back();
        active[pos] = last;
        posOf[last] = pos;
        active.pop_back();
        posOf[id] = -1;
    }

    bool finish(RunStatus status) {
        res.status = status;
        return false;
    }

    void closeWindow() { windowOpen = false; }

    void openWindow(Sym step, int structIdx) {
        if (!opt.recordAccesses) return;
        StepWindow w;
        w.stepSym = step;
        w.structIdx = structIdx;
        w.ordinal = ++windowOrdinals[step];
        res.windows.push_back(std::move(w));
        windowOpen = true;
    }

    // Iterator bookkeeping: count completed blocks per label and look for an
    // asynchrony witness (one instance two or more full blocks ahead of
    // another participant).
    void noteBlocks(uint32_t label, int completed) {
        if (completed <= 0) return;
        if (st.schedule.empty() || st.schedule.front().kind != RtItem::Kind::AIter)
            return;
        if (blocksDone.size() < st.env.size()) blocksDone.resize(st.env.size(), 0);
        blocksDone[label] += static_cast<uint64_t>(completed);
        const IterInfo& info = *st.schedule.front().iter;
        for (uint32_t id = 0; id < st.env.size(); ++id) {
            if (id == label) continue;
            const auto* si = std::get_if<StructInstance>(&st.env[id]);
            if (!si || info.blockByStruct[si->structIdx]->empty()) continue;
            if (blocksDone[label] >= blocksDone[id] + 2) {
                res.iter.asyncWitnessed = true;
                break;
            }
        }
    }

    // Applies one command transition for `label` and refreshes bookkeeping.
    void execCommand(uint32_t label) {
        int boundaries = eng.applyCommand(st, Label{label}, &opt, &res);
        ++res.transitions;
        noteBlocks(label, boundaries);
        const auto* si = std::get_if<StructInstance>(&st.env[label]);
        if (si && !si->busy()) deactivate(label);
    }

    bool applyScheduleTd(const TransitionDescriptor& td) {
        if (opt.beforeSchedule &&
            opt.beforeSchedule(td, st) == ObserverAction::Stop) {
            res.stoppedByObserver = true;
            return finish(RunStatus::Completed);
        }
        switch (td.rule) {
            case Rule::FixInit:
            case Rule::IterInit: iterCount.push_back(0); break;
            case Rule::FixIter:
            case Rule::IterIter: {
                if (iterCount.empty()) iterCount.push_back(0);
                if (++iterCount.back() > opt.limits.maxFixpointIterations) {
                    res.divergenceMarker = marker_text();
                    return finish(RunStatus::DivergenceSuspected);
                }
                break;
            }
            case Rule::FixTerm:
            case Rule::IterTerm:
                if (!iterCount.empty()) iterCount.pop_back();
                break;
            default: break;
        }
        eng.applySchedule(st, td, &opt, &res);
        ++res.transitions;
        switch (td.rule) {
            case Rule::InitG: openWindow(td_step_, td_struct_); rebuildActive(); break;
            case Rule::InitL: openWindow(td_step_, td_struct_); rebuildActive(); break;
            case Rule::IterInit:
                blocksDone.assign(st.env.size(), 0);
                rebuildActive();
                break;
            case Rule::IterIter: rebuildActive(); break;
            default: break;
        }
        return true;
    }

    // The step name of the head item, captured before applying Init rules.
    Sym td_step_ = 0;
    int td_struct_ = -1;

    std::string marker_text() const {
        if (st.schedule.empty()) return "";
        const RtItem& head = st.schedule.front();
        if (head.kind == RtItem::Kind::AFix) return "Fix";
        if (head.kind == RtItem::Kind::AIter) {
            std::string s = "Iter(";
            for (size_t i = 0; i < head.iter->steps.size(); ++i) {
                if (i) s += "; ";
                s += eng.program().syms->name(head.iter->steps[i]);
            }
            return s + ")";
        }
        return "";
    }

    bool scheduleMove() {
        closeWindow();
        if (st.schedule.empty()) return finish(RunStatus::Completed);
        auto td = eng.schedule_transition(st);
        if (!td) return finish(RunStatus::Stuck);
        if (!st.schedule.empty()) {
            td_step_ = st.schedule.front().stepSym;
            td_struct_ = st.schedule.front().structIdx;
        }
        return applyScheduleTd(*td);
    }

    bool limitHit() {
        if (res.transitions >= static_cast<uint64_t>(opt.limits.maxTotalTransitions)) {
            res.divergenceMarker = "transition limit";
            finish(RunStatus::DivergenceSuspected);
            return true;
        }
        return false;
    }

    // ---- policies ---------------------------------------------------------

    bool stepLockstep() {
        if (active.empty()) return scheduleMove();
        if (roundQueue.empty()) {
            roundQueue.assign(active.begin(), active.end());
            std::sort(roundQueue.begin(), roundQueue.end());
        }
        while (!roundQueue.empty()) {
            uint32_t id = roundQueue.front();
            roundQueue.erase(roundQueue.begin());
            if (posOf.size() > id && posOf[id] >= 0) {
                execCommand(id);
                return true;
            }
        }
        return true;  // round exhausted; next call refills or goes to schedule
    }

    bool stepSequential() {
        if (active.empty()) return scheduleMove();
        uint32_t lowest = *std::min_element(active.begin(), active.end());
        execCommand(lowest);
        return true;
    }

    bool stepRandom() {
        bool iterTopUp = false;
        if (!st.schedule.empty() &&
            st.schedule.front().kind == RtItem::Kind::AIter &&
            !st.stability.empty() && !st.stability.back()) {
            auto td = eng.schedule_transition(st);
            iterTopUp = td && td->rule == Rule::IterIter;
        }
        size_t choices = active.size() + (iterTopUp ? 1 : 0);
        if (choices == 0) return scheduleMove();
        size_t pick = std::uniform_int_distribution<size_t>(0, choices - 1)(rng);
        if (pick == active.size()) {
            TransitionDescriptor td{Rule::IterIter, Label{}};
            return applyScheduleTd(td);
        }
        execCommand(active[pick]);
        return true;
    }

    // One parallel round: every busy instance runs its maximal prefix of
    // instance-local commands (concurrently), then each still-busy instance
    // runs exactly one command serially in label order. Local commands of
    // distinct instances commute, so the round equals some sequential
    // interleaving of command transitions.
    bool stepParallelRound() {
        if (active.empty()) return scheduleMove();
        std::vector<uint32_t> labels(active.begin(), active.end());
        std::sort(labels.begin(), labels.end());
        ptrdiff_t n = static_cast<ptrdiff_t>(labels.size());

        std::vector<uint64_t> counts(labels.size(), 0);
        std::vector<int> bounds(labels.size(), 0);
        if (opt.recordTrace) {
            // serial fallback keeps the trace ordered; same interleaving
            for (ptrdiff_t i = 0; i < n; ++i)
                counts[i] = runLocalPrefix(labels[i], true, &bounds[i]);
        } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
            for (ptrdiff_t i = 0; i < n; ++i)
                counts[i] = runLocalPrefix(labels[i], false, &bounds[i]);
        }
        uint64_t localApplied = 0;
        for (ptrdiff_t i = 0; i < n; ++i) {
            localApplied += counts[i];
            noteBlocks(labels[i], bounds[i]);
        }
        res.transitions += localApplied;

        uint64_t serialApplied = 0;
        for (uint32_t id : labels) {
            auto* si = std::get_if<StructInstance>(&st.env[id]);
            if (!si || !si->busy()) {
                deactivate(id);
                continue;
            }
            execCommand(id);
            ++serialApplied;
            if (limitHit()) return false;
        }
        if (localApplied + serialApplied == 0) return scheduleMove();
        return true;
    }

    // Runs the maximal local prefix for one instance. Only touches that
    // instance's stack and frames. Returns the number of commands applied.
    uint64_t runLocalPrefix(uint32_t id, bool trace, int* boundaries) {
        auto* si = std::get_if<StructInstance>(&st.env[id]);
        uint64_t applied = 0;
        while (si->busy()) {
            const Command* head = si->headCommand();
            if (!is_local_command(*head, si->stack)) break;
            Rule rule;
            if (!eng.commandEnabled(st, *si, *head, &rule)) break;
            // local rules never touch stability, memory or other instances
            RunOptions* o = trace ? &opt : nullptr;
            RunResult* s = trace ? &res : nullptr;
            *boundaries += eng.applyCommand(st, Label{id}, o, s);
            ++applied;
        }
        return applied;
    }

    RunResult run() {
        rebuildActive();
        try {
            for (;;) {
                if (limitHit()) break;
                bool cont = true;
                switch (opt.policy.kind) {
                    case PolicyConfig::Kind::Lockstep: cont = stepLockstep(); break;
                    case PolicyConfig::Kind::Sequential: cont = stepSequential(); break;
                    case PolicyConfig::Kind::Random: cont = stepRandom(); break;
                    case PolicyConfig::Kind::Parallel:
                        cont = stepParallelRound();
                        break;
                }
                if (!cont) break;
            }
        } catch (const EngineFault& f) {
            res.status = RunStatus::RuntimeFault;
            res.fault = f.kind;
            res.faultDetail = f.detail;
        }
        collectIterStats();
        res.finalState = std::move(st);
        return std::move(res);
    }

    // Runs a single step-execution window: the head Init transition plus all
    // command transitions until Done.
    RunResult runWindow() {
        rebuildActive();
        try {
            auto td = eng.schedule_transition(st);
            if (!td || (td->rule != Rule::InitG && td->rule != Rule::InitL))
                throw std::logic_error("runWindow: head transition is not an Init");
            td_step_ = st.schedule.front().stepSym;
            td_struct_ = st.schedule.front().structIdx;
            if (!applyScheduleTd(*td)) {
                res.finalState = std::move(st);
                return std::move(res);
            }
            while (!active.empty()) {
                if (limitHit()) break;
                bool cont = true;
                switch (opt.policy.kind) {
                    case PolicyConfig::Kind::Lockstep: cont = stepLockstep(); break;
                    case PolicyConfig::Kind::Sequential: cont = stepSequential(); break;
                    case PolicyConfig::Kind::Random: {
                        if (active.empty()) break;
                        size_t pick = std::uniform_int_distribution<size_t>(
                            0, active.size() - 1)(rng);
                        execCommand(active[pick]);
                        break;
                    }
                    case PolicyConfig::Kind::Parallel:
                        cont = stepParallelRound();
                        break;
                }
                if (!cont) break;
            }
            closeWindow();
        } catch (const EngineFault& f) {
            res.status = RunStatus::RuntimeFault;
            res.fault = f.kind;
            res.faultDetail = f.detail;
        }
        res.finalState = std::move(st);
        return std::move(res);
    }

    void collectIterStats() {
        for (uint32_t id = 0; id < blocksDone.size(); ++id)
            if (blocksDone[id] > 0) res.iter.completedBlocks.emplace_back(id, blocksDone[id]);
    }
};

RunResult Engine::run(RunOptions opt) const { return run_from(initial_state(), std::move(opt)); }

RunResult Engine::run_from(ExecState start, RunOptions opt) const {
    Driver d(*this, std::move(start), std::move(opt));
    return d.run();
}

RunResult Engine::run_window(ExecState start, RunOptions opt) const {
    Driver d(*this, std::move(start), std::move(opt));
    return d.runWindow();
}

std::string Engine::final_report(const ExecState& st) const {
    return render_final_values(st, *program_);
}

}  // namespace audala
