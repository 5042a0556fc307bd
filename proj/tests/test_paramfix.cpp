#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "harness.hpp"
#include "test_common.hpp"

using namespace audala;
using namespace audala::test;

namespace {

Extensions paramFixExt() {
    Extensions e;
    e.paramFix = true;
    return e;
}

int countRule(const std::vector<TraceEvent>& trace, Rule r) {
    int n = 0;
    for (const TraceEvent& ev : trace)
        if (ev.rule == r) ++n;
    return n;
}

RunResult runTraced(const Engine& eng, PolicyConfig policy = PolicyConfig::lockstep(),
                    int64_t cap = 10000) {
    RunOptions opt;
    opt.policy = policy;
    opt.recordTrace = true;
    opt.limits.maxFixpointIterations = cap;
    return eng.run(std::move(opt));
}

// Rewrites every Fix in a schedule into a FixOn listing all of the program's
// parameter names (the conservativity transform).
void fixOnEverything(Schedule& s, const std::vector<Sym>& allParams) {
    for (ScheduleItem& item : s.items) {
        if (item.kind == ScheduleItem::Kind::Fix) {
            item.kind = ScheduleItem::Kind::FixOn;
            item.fixParams = allParams;
        }
        if (item.kind == ScheduleItem::Kind::Fix ||
            item.kind == ScheduleItem::Kind::FixOn)
            fixOnEverything(item.body, allParams);
    }
}

}  // namespace

TEST_CASE("changes to irrelevant parameters do not reset stability") {
    const char* src = R"(
struct A (rel: Int, irr: Int) {
    s { if (this != null && irr == 0) then { irr := 1; } }
    init { A(0, 0); }
}
init < Fix(s, rel)
)";
    auto vp = mustValidate(src, paramFixExt());
    Engine eng(vp, paramFixExt());
    RunResult rr = runTraced(eng);
    REQUIRE(rr.status == RunStatus::Completed);
    // irr changed in iteration 1 but is irrelevant: the fixpoint is stable
    // after a single iteration (no FixIter fired)
    CHECK(countRule(rr.trace, Rule::FixIter) == 0);
    uint32_t a = vp->firstFreshLabelId();
    const StructInstance* si = rr.finalState.instance(Label{a});
    CHECK(std::get<int64_t>(si->params[1]) == 1);
}

TEST_CASE("changes to relevant parameters reset the entry") {
    const char* src = R"(
struct A (rel: Int, irr: Int) {
    s { if (this != null && rel == 0) then { rel := 1; } }
    init { A(0, 0); }
}
init < Fix(s, rel)
)";
    auto vp = mustValidate(src, paramFixExt());
    Engine eng(vp, paramFixExt());
    RunResult rr = runTraced(eng);
    REQUIRE(rr.status == RunStatus::Completed);
    CHECK(countRule(rr.trace, Rule::FixIter) == 1);  // one extra round
}

TEST_CASE("overwriting a relevant parameter with its value keeps stability") {
    const char* src = R"(
struct A (rel: Int) {
    s { rel := 0; }
    init { A(0); }
}
init < Fix(s, rel)
)";
    auto vp = mustValidate(src, paramFixExt());
    Engine eng(vp, paramFixExt());
    RunResult rr = runTraced(eng);
    REQUIRE(rr.status == RunStatus::Completed);
    CHECK(countRule(rr.trace, Rule::FixIter) == 0);
}

TEST_CASE("fixpoint initialization shapes the stability function") {
    const char* src = R"(
struct A (rel: Int, irr: Int) {
    s { rel := 0; }
    init { A(0, 0); }
}
init < Fix(Fix(s) < s, rel)
)";
    auto vp = mustValidate(src, paramFixExt());
    Engine eng(vp, paramFixExt());
    ExecState st = eng.initial_state();
    auto stepSched = [&](Rule r) {
        auto td = eng.schedule_transition(st);
        REQUIRE(td.has_value());
        REQUIRE(td->rule == r);
        eng.apply(st, *td);
    };
    auto drain = [&] {
        for (;;) {
            auto ts = eng.enabled_transitions(st);
            const TransitionDescriptor* cmd = nullptr;
            for (auto& td : ts)
                if (!td.isSchedule()) cmd = &td;
            if (!cmd) break;
            eng.apply(st, *cmd);
        }
    };
    stepSched(Rule::InitG);  // init
    drain();
    stepSched(Rule::FixInit);  // outer FixOn(.., rel)
    REQUIRE(st.sf.size() == 1);
    CHECK(!st.sf[0].allTrue);
    Sym rel = vp->syms->intern("rel");
    Sym irr = vp->syms->intern("irr");
    int relKey = vp->keysByName.at(rel)[0];
    int irrKey = vp->keysByName.at(irr)[0];
    CHECK(st.sf[0].relevant(relKey));
    CHECK(!st.sf[0].relevant(irrKey));

    stepSched(Rule::FixInit);  // inner plain Fix: all-true level above it
    REQUIRE(st.sf.size() == 2);
    CHECK(st.sf[1].allTrue);
    CHECK(!st.sf[0].allTrue);  // outer level untouched
    CHECK(st.stability.size() == 2);
}

TEST_CASE("instance creation resets stability even under FixOn") {
    const char* src = R"(
struct S (made: Bool, other: Int) {
    g { if (this != null && !made) then { made := true; S(true, 0); } }
    init { S(false, 0); }
}
init < Fix(g, other)
)";
    auto vp = mustValidate(src, paramFixExt());
    Engine eng(vp, paramFixExt());
    RunResult rr = runTraced(eng);
    REQUIRE(rr.status == RunStatus::Completed);
    // made is irrelevant, but the ComCons forces one more iteration
    CHECK(countRule(rr.trace, Rule::FixIter) == 1);
}

TEST_CASE("listing 9 schedule terminates where listing 8 diverges") {
    auto vp = mustValidateCorpus("listing9_graph.adl", paramFixExt());
    Engine eng(vp, paramFixExt());
    RunResult rr = runTraced(eng, PolicyConfig::lockstep(), 1000);
    REQUIRE(rr.status == RunStatus::Completed);

    // the final iteration's trace contains no relevant-parameter change
    size_t termIdx = 0;
    for (size_t i = 0; i < rr.trace.size(); ++i)
        if (rr.trace[i].rule == Rule::FixTerm) termIdx = i;
    REQUIRE(termIdx > 0);
    size_t lastIter = 0;
    for (size_t i = 0; i < termIdx; ++i)
        if (rr.trace[i].rule == Rule::FixIter || rr.trace[i].rule == Rule::FixInit)
            lastIter = i;
    Sym val = vp->syms->intern("val");
    Sym stab = vp->syms->intern("stab");
    for (size_t i = lastIter + 1; i < termIdx; ++i) {
        const TraceEvent& ev = rr.trace[i];
        if (ev.changedParam)
            CHECK_MESSAGE((ev.targetVar != val && ev.targetVar != stab),
                          "relevant parameter changed in the final iteration");
        CHECK(ev.rule != Rule::ComCons);
    }
}

TEST_CASE("conservativity: FixOn over all parameters equals the plain engine") {
    struct Case {
        const char* name;
        Extensions baseExt;
        int64_t cap;
    };
    Extensions arrays;
    arrays.arrays = true;
    std::vector<Case> cases = {{"listing1.adl", {}, 10000},
                               {"listing6.adl", {}, 10000},
                               {"listing10.adl", arrays, 10000},
                               {"listing8_graph.adl", {}, 60}};
    for (const Case& c : cases) {
        CAPTURE(c.name);
        // base engine, no param-fix machinery
        auto vpBase = mustValidateCorpus(c.name, c.baseExt);
        Engine base(vpBase, c.baseExt);
        RunOptions baseOpt;
        baseOpt.limits.maxFixpointIterations = c.cap;
        RunResult baseRr = base.run(std::move(baseOpt));

        // rewritten program under the param-fix engine
        ParseResult pr = parse_program(corpus(c.name));
        REQUIRE(pr.program.has_value());
        std::vector<Sym> allParams;
        for (const StructDef& sd : pr.program->structs)
            for (const ParamDef& p : sd.params) allParams.push_back(p.name);
        fixOnEverything(pr.program->schedule, allParams);
        Extensions ext = c.baseExt;
        ext.paramFix = true;
        ValidateResult vr = check_well_formed(desugar(std::move(*pr.program)), ext);
        REQUIRE_MESSAGE(vr.program, render_diagnostics(vr.errors));
        Engine rewritten(vr.program, ext);
        RunOptions rwOpt;
        rwOpt.limits.maxFixpointIterations = c.cap;
        RunResult rwRr = rewritten.run(std::move(rwOpt));

        CHECK(baseRr.status == rwRr.status);
        // compare the semantics' 3-tuple projection; sf is the extension's own
        // bookkeeping and absent from the base engine's states
        auto stripSf = [](std::string s) {
            size_t pos = s.find("\nsf:");
            if (pos == std::string::npos) return s;
            size_t end = s.find('\n', pos + 1);
            return s.substr(0, pos) + s.substr(end);
        };
        CHECK(stripSf(render_canonical(baseRr.finalState, *vpBase)) ==
              stripSf(render_canonical(rwRr.finalState, *vr.program)));
    }
}
