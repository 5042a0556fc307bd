#include "audala/tm_diff.hpp"

#include "audala/canonical.hpp"
#include "audala/desugar.hpp"
#include "audala/tm_compile.hpp"

namespace audala {

namespace {

struct TmSyms {
    int controlIdx = -1, tapeCellIdx = -1;
    int headPi = -1, statePi = -1, acceptingPi = -1;
    int leftPi = -1, rightPi = -1, symbolPi = -1;

    explicit TmSyms(const ValidatedProgram& vp) {
        Sym control = vp.syms->intern("Control");
        Sym tapeCell = vp.syms->intern("TapeCell");
        controlIdx = vp.structIndex(control);
        tapeCellIdx = vp.structIndex(tapeCell);
        if (controlIdx < 0 || tapeCellIdx < 0) return;
        const StructInfo& c = vp.structs[controlIdx];
        headPi = c.paramIndex(vp.syms->intern("head"));
        statePi = c.paramIndex(vp.syms->intern("state"));
        acceptingPi = c.paramIndex(vp.syms->intern("accepting"));
        const StructInfo& t = vp.structs[tapeCellIdx];
        leftPi = t.paramIndex(vp.syms->intern("left"));
        rightPi = t.paramIndex(vp.syms->intern("right"));
        symbolPi = t.paramIndex(vp.syms->intern("symbol"));
    }

    bool ok() const {
        return controlIdx >= 0 && tapeCellIdx >= 0 && headPi >= 0 && statePi >= 0 &&
               acceptingPi >= 0 && leftPi >= 0 && rightPi >= 0 && symbolPi >= 0;
    }
};

int count_controls(const ExecState& st, const ValidatedProgram& vp, int controlIdx) {
    int n = 0;
    for (uint32_t id = vp.firstFreshLabelId(); id < st.env.size(); ++id) {
        const auto* si = std::get_if<StructInstance>(&st.env[id]);
        if (si && si->structIdx == controlIdx) ++n;
    }
    return n;
}

}  // namespace

ExtractedConfig extract_configuration(const ExecState& st, const Engine& eng) {
    const ValidatedProgram& vp = eng.program();
    ExtractedConfig out;
    TmSyms s(vp);
    if (!s.ok()) {
        out.status = ExtractedConfig::Status::MalformedWorld;
        out.detail = "program lacks the Control/TapeCell structure";
        return out;
    }
    if (!eng.done(st)) {
        out.status = ExtractedConfig::Status::NotIdle;
        return out;
    }
    const StructInstance* control = nullptr;
    int count = 0;
    for (uint32_t id = vp.firstFreshLabelId(); id < st.env.size(); ++id) {
        const auto* si = std::get_if<StructInstance>(&st.env[id]);
        if (si && si->structIdx == s.controlIdx) {
            ++count;
            control = si;
        }
    }
    if (count != 1) {
        out.status = ExtractedConfig::Status::MalformedWorld;
        out.detail = "expected exactly one non-null Control, found " +
                     std::to_string(count);
        return out;
    }

    out.config.state = std::get<int64_t>(control->params[s.statePi]);

    auto isNull = [&](Label l) { return vp.isNullLabel(l); };
    auto cellAt = [&](Label l) { return st.instance(l); };

    Label head = std::get<Label>(control->params[s.headPi]);
    if (!isNull(head)) {
        const StructInstance* cell = cellAt(head);
        out.config.set(0, std::get<int64_t>(cell->params[s.symbolPi]));
        // walk left then right; stop at null cells (their symbol is 0)
        size_t guard = st.env.size() + 1;
        Label cur = std::get<Label>(cell->params[s.leftPi]);
        for (int64_t i = -1; !isNull(cur); --i) {
            if (guard-- == 0) {
                out.status = ExtractedConfig::Status::MalformedWorld;
                out.detail = "tape links form a cycle";
                return out;
            }
            const StructInstance* c = cellAt(cur);
            out.config.set(i, std::get<int64_t>(c->params[s.symbolPi]));
            cur = std::get<Label>(c->params[s.leftPi]);
        }
        guard = st.env.size() + 1;
        cur = std::get<Label>(cell->params[s.rightPi]);
        for (int64_t i = 1; !isNull(cur); ++i) {
            if (guard-- == 0) {
                out.status = ExtractedConfig::Status::MalformedWorld;
                out.detail = "tape links form a cycle";
                return out;
            }
            const StructInstance* c = cellAt(cur);
            out.config.set(i, std::get<int64_t>(c->params[s.symbolPi]));
            cur = std::get<Label>(c->params[s.rightPi]);
        }
    }
    return out;
}

DiffVerdict differential_check(const TuringMachine& tm,
                               const std::vector<int64_t>& input, int64_t stepBound,
                               PolicyConfig policy) {
    DiffVerdict v;
    std::shared_ptr<ValidatedProgram> vp;
    try {
        Program p = compile_tm(tm, input);
        ValidateResult vr = check_well_formed(desugar(std::move(p)), Extensions{});
        if (!vr.program) {
            v.kind = DiffVerdict::Kind::EngineError;
            v.detail = "compiled program failed validation: " +
                       render_diagnostics(vr.errors);
            return v;
        }
        vp = vr.program;
    } catch (const CompileError& e) {
        v.kind = DiffVerdict::Kind::EngineError;
        v.detail = "compile error: " + e.message;
        return v;
    }

    Engine eng(vp, Extensions{});
    TmSyms syms(*vp);

    TMConfiguration oracle = tm_initial_configuration(input);
    bool divergence = false;

    auto compareHere = [&](const ExecState& st, const char* where) -> bool {
        ExtractedConfig ec = extract_configuration(st, eng);
        v.controlCounts.push_back(count_controls(st, *vp, syms.controlIdx));
        if (ec.status != ExtractedConfig::Status::Ok) {
            v.kind = DiffVerdict::Kind::Divergence;
            v.detail = std::string(where) + ": " + ec.detail;
            return false;
        }
        if (!(ec.config == oracle)) {
            v.kind = DiffVerdict::Kind::Divergence;
            v.detail = std::string(where) + ": implementation " +
                       render_configuration(ec.config) + " != oracle " +
                       render_configuration(oracle);
            return false;
        }
        return true;
    };

    RunOptions opt;
    opt.policy = policy;
    opt.limits.maxFixpointIterations = stepBound + 2;
    opt.recordAccesses = true;
    opt.beforeSchedule = [&](const TransitionDescriptor& td,
                             const ExecState& st) -> ObserverAction {
        switch (td.rule) {
            case Rule::FixInit: {
                // post-init idle state: must equal the initial configuration
                if (!compareHere(st, "after init")) {
                    divergence = true;
                    return ObserverAction::Stop;
                }
                v.postInitCanonical = render_canonical(st, *vp);
                return ObserverAction::Continue;
            }
            case Rule::FixIter: {
                // the iteration changed something: the oracle must step too
                auto next = tm_step(oracle, tm);
                if (!next) {
                    v.kind = DiffVerdict::Kind::Divergence;
                    v.detail = "program iterated after oracle halt at step " +
                               std::to_string(v.steps);
                    divergence = true;
                    return ObserverAction::Stop;
                }
                oracle = *next;
                ++v.steps;
                if (!compareHere(st, ("after step " + std::to_string(v.steps)).c_str())) {
                    divergence = true;
                    return ObserverAction::Stop;
                }
                if (v.steps >= stepBound) return ObserverAction::Stop;  // bound hit
                return ObserverAction::Continue;
            }
            case Rule::FixTerm: {
                // stable: the oracle must be halted and configurations equal
                if (tm_step(oracle, tm)) {
                    v.kind = DiffVerdict::Kind::Divergence;
                    v.detail = "program stabilized but oracle can still step after " +
                               std::to_string(v.steps) + " steps";
                    divergence = true;
                    return ObserverAction::Stop;
                }
                if (!compareHere(st, "at termination")) {
                    divergence = true;
                    return ObserverAction::Stop;
                }
                v.halted = true;
                v.accepting = tm.isAccepting(oracle.state);
                return ObserverAction::Continue;
            }
            default: return ObserverAction::Continue;
        }
    };

    RunResult rr = eng.run(std::move(opt));
    v.runStatus = rr.status;
    v.windows = std::move(rr.windows);
    if (divergence) return v;
    if (rr.status == RunStatus::RuntimeFault || rr.status == RunStatus::Stuck) {
        v.kind = DiffVerdict::Kind::EngineError;
        v.detail = "engine status " + std::to_string(static_cast<int>(rr.status)) +
                   " " + rr.faultDetail;
        return v;
    }
    if (v.halted) {
        // cross-check the accepting flag stored in the Control instance
        ExtractedConfig ec = extract_configuration(rr.finalState, eng);
        if (ec.status == ExtractedConfig::Status::Ok) {
            for (uint32_t id = vp->firstFreshLabelId(); id < rr.finalState.env.size();
                 ++id) {
                const auto* si =
                    std::get_if<StructInstance>(&rr.finalState.env[id]);
                if (si && si->structIdx == syms.controlIdx) {
                    bool flag = std::get<bool>(si->params[syms.acceptingPi]);
                    if (flag != v.accepting) {
                        v.kind = DiffVerdict::Kind::Divergence;
                        v.detail = "accepting flag mismatch";
                    }
                }
            }
        }
    }
    return v;
}

}  // namespace audala
