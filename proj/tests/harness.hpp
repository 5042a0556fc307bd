#pragma once

#include <set>
#include <string>
#include <vector>

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "audala/race.hpp"

namespace audala::test {

// Snapshots of every idle state from which an InitG/InitL transition fires
// during a lockstep baseline run.
struct WindowStart {
    Sym stepSym;
    int ordinal;
    ExecState state;
};

inline std::vector<WindowStart> collect_window_starts(const Engine& eng,
                                                      Limits limits = {},
                                                      size_t maxWindows = 100000) {
    std::vector<WindowStart> out;
    std::map<Sym, int> ordinals;
    RunOptions opt;
    opt.policy = PolicyConfig::lockstep();
    opt.limits = limits;
    opt.beforeSchedule = [&](const TransitionDescriptor& td,
                             const ExecState& st) -> ObserverAction {
        if (td.rule == Rule::InitG || td.rule == Rule::InitL) {
            Sym step = st.schedule.front().stepSym;
            out.push_back({step, ++ordinals[step], st});
            if (out.size() >= maxWindows) return ObserverAction::Stop;
        }
        return ObserverAction::Continue;
    };
    eng.run(std::move(opt));
    return out;
}

struct DeterminismOutcome {
    int windowsChecked = 0;
    int windowsSkippedRacy = 0;
    int violations = 0;
    std::string firstViolation;
};

// Lemma 4.4 as a test: for every step execution whose race report is empty,
// the canonicalized post-step state is identical across seeded-random
// interleavings.
inline DeterminismOutcome check_step_determinism(const Engine& eng, int seeds,
                                                 Limits limits = {},
                                                 size_t maxWindows = 100000) {
    DeterminismOutcome out;
    std::vector<WindowStart> starts = collect_window_starts(eng, limits, maxWindows);
    for (const WindowStart& ws : starts) {
        bool racy = false;
        std::string firstCanonical;
        bool mismatch = false;
        for (int seed = 0; seed < seeds && !racy; ++seed) {
            RunOptions opt;
            opt.policy = PolicyConfig::random(static_cast<uint64_t>(seed) * 7919 + 1);
            opt.limits = limits;
            opt.recordAccesses = true;
            RunResult rr = eng.run_window(ws.state, std::move(opt));
            if (!detect_races(rr.windows).empty()) {
                racy = true;
                break;
            }
            std::string canon = render_canonical(rr.finalState, eng.program());
            if (seed == 0)
                firstCanonical = std::move(canon);
            else if (canon != firstCanonical)
                mismatch = true;
        }
        if (racy) {
            ++out.windowsSkippedRacy;
            continue;
        }
        ++out.windowsChecked;
        if (mismatch) {
            ++out.violations;
            if (out.firstViolation.empty())
                out.firstViolation = eng.program().syms->name(ws.stepSym) +
                                     " execution " + std::to_string(ws.ordinal);
        }
    }
    return out;
}

// Reads one Bool parameter of every non-null instance of a struct, in
// canonical creation order.
inline std::vector<bool> param_bools(const ExecState& st, const ValidatedProgram& vp,
                                     const char* structName, const char* param) {
    ExecState canon = canonicalize(st, vp);
    int si = vp.structIndex(vp.syms->intern(structName));
    int pi = vp.structs[si].paramIndex(vp.syms->intern(param));
    std::vector<bool> out;
    for (uint32_t id = vp.firstFreshLabelId(); id < canon.env.size(); ++id) {
        const auto* inst = std::get_if<StructInstance>(&canon.env[id]);
        if (inst && inst->structIdx == si)
            out.push_back(std::get<bool>(inst->params[pi]));
    }
    return out;
}

// Independent reachability oracle: plain BFS over an edge list.
inline std::vector<bool> bfs_reach(int nodes, const std::vector<std::pair<int, int>>& edges,
                                   int root) {
    std::vector<bool> reach(nodes + 1, false);
    reach[root] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto [a, b] : edges) {
            if (reach[a] && !reach[b]) {
                reach[b] = true;
                changed = true;
            }
        }
    }
    return std::vector<bool>(reach.begin() + 1, reach.end());
}

}  // namespace audala::test
