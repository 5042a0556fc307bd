#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "harness.hpp"
#include "test_common.hpp"

using namespace audala;
using namespace audala::test;

namespace {

Extensions iterExt() {
    Extensions e;
    e.iter = true;
    return e;
}

void stepSched(const Engine& eng, ExecState& st, Rule expected) {
    auto td = eng.schedule_transition(st);
    REQUIRE(td.has_value());
    REQUIRE_MESSAGE(td->rule == expected,
                    "expected rule " << static_cast<int>(expected) << " got "
                                     << static_cast<int>(td->rule));
    eng.apply(st, *td);
}

void drainLabel(const Engine& eng, ExecState& st, uint32_t label) {
    for (;;) {
        const StructInstance* si = st.instance(Label{label});
        if (!si || !si->busy()) return;
        eng.apply(st, TransitionDescriptor{Rule::ComPush, Label{label}});
    }
}

}  // namespace

TEST_CASE("endsWithBlock is a structural suffix check") {
    CmdList block = {cmd_push_this(), cmd_rd(1), cmd_wr(2)};
    CmdBlock shared = std::make_shared<const CmdList>(block);
    CmdBlock other = std::make_shared<const CmdList>(CmdList{cmd_push(int64_t{4})});

    StructInstance si;
    si.frames.push_back(Frame{shared, 0, true});
    CHECK(si.endsWithBlock(block));

    si.frames.front().idx = 1;  // partially consumed
    CHECK(!si.endsWithBlock(block));

    si.frames.clear();
    si.frames.push_back(Frame{other, 0, false});
    si.frames.push_back(Frame{shared, 0, true});
    CHECK(si.endsWithBlock(block));  // ends with the block despite a prefix

    CHECK(si.endsWithBlock(CmdList{}));  // L = L;eps

    StructInstance empty;
    CHECK(!empty.endsWithBlock(block));
    CHECK(empty.endsWithBlock(CmdList{}));
}

TEST_CASE("IterInit loads blocks, clears stacks, and pushes one level") {
    auto vp = mustValidateCorpus("listing11.adl", iterExt());
    Engine eng(vp, iterExt());
    ExecState st = eng.initial_state();
    stepSched(eng, st, Rule::InitG);  // init
    while (!eng.done(st)) {
        for (auto& td : eng.enabled_transitions(st))
            if (!td.isSchedule()) {
                eng.apply(st, td);
                break;
            }
    }
    stepSched(eng, st, Rule::IterInit);
    CHECK(st.stability == std::vector<uint8_t>{1});
    // every Edge instance (incl. the null instance) holds its block; Nodes
    // hold nothing (they do not define reachability)
    int busyEdges = 0;
    for (uint32_t id = 0; id < st.env.size(); ++id) {
        const StructInstance* si = st.instance(Label{id});
        if (!si) continue;
        CHECK(si->stack.empty());
        if (si->structIdx == 1)
            busyEdges += si->busy() ? 1 : 0;
        else
            CHECK(!si->busy());
    }
    CHECK(busyEdges == 5);
}

TEST_CASE("Iter over steps with empty bodies terminates immediately") {
    auto vp = mustValidate("struct A (x: Int) { e {} }\nIter(e)", iterExt());
    Engine eng(vp, iterExt());
    RunResult rr = eng.run(RunOptions{});
    CHECK(rr.status == RunStatus::Completed);
    CHECK(rr.transitions == 2);  // IterInit then IterTerm
}

TEST_CASE("IterIter tops up finished instances and mid-block stragglers") {
    const char* src = R"(
struct C (v: Bool) {
    flip { if (this != null && !v) then { v := true; } }
    init { C(false); }
}
init < Iter(flip)
)";
    auto vp = mustValidate(src, iterExt());
    Engine eng(vp, iterExt());
    ExecState st = eng.initial_state();
    stepSched(eng, st, Rule::InitG);
    drainLabel(eng, st, 0);  // null C runs init, creating the instance
    uint32_t a = vp->firstFreshLabelId();

    stepSched(eng, st, Rule::IterInit);
    size_t blockLen = st.instance(Label{a})->pendingCount();
    REQUIRE(blockLen > 0);
    // an untouched instance's pending list IS its block, so it already ends
    // with one full block and must not be topped up
    CHECK(st.instance(Label{0})->endsWithBlock(
        vp->stepCommands(0, vp->syms->intern("flip"))));

    // advance the null instance one command: now a genuine mid-block straggler
    eng.apply(st, TransitionDescriptor{Rule::ComPush, Label{0}});
    size_t nullPending = st.instance(Label{0})->pendingCount();
    CHECK(nullPending == blockLen - 1);

    // run only the real instance; its write flips v -> stability resets
    drainLabel(eng, st, a);
    CHECK(st.stability == std::vector<uint8_t>{0});
    CHECK(!st.instance(Label{a})->busy());

    // premise holds: an idle instance with a nonempty block exists
    stepSched(eng, st, Rule::IterIter);
    CHECK(st.stability == std::vector<uint8_t>{1});
    // the finished instance got exactly one block; the straggler got one
    // appended after its remainder
    CHECK(st.instance(Label{a})->pendingCount() == blockLen);
    CHECK(st.instance(Label{0})->pendingCount() == nullPending + blockLen);

    // an instance whose list already ends with its full block is skipped:
    // a second IterIter is not even enabled (top is true again)
    auto td = eng.schedule_transition(st);
    CHECK(!td.has_value());

    // finish: second rounds change nothing, so the loop exits
    drainLabel(eng, st, a);
    drainLabel(eng, st, 0);
    CHECK(st.stability == std::vector<uint8_t>{1});
    stepSched(eng, st, Rule::IterTerm);
    CHECK(st.stability.empty());
    CHECK(st.schedule.empty());
}

TEST_CASE("listing 11 agrees with the Fix schedule across seeds") {
    auto vpFix = mustValidateCorpus("listing1.adl");
    Engine engFix(vpFix, {});
    RunResult fixRr = engFix.run(RunOptions{});
    REQUIRE(fixRr.status == RunStatus::Completed);
    std::vector<bool> expected = param_bools(fixRr.finalState, *vpFix, "Node", "reach");
    CHECK(expected == bfs_reach(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}}, 1));

    auto vp = mustValidateCorpus("listing11.adl", iterExt());
    Engine eng(vp, iterExt());
    for (int seed = 0; seed < 25; ++seed) {
        RunOptions opt;
        opt.policy = PolicyConfig::random(seed * 31 + 5);
        RunResult rr = eng.run(std::move(opt));
        REQUIRE(rr.status == RunStatus::Completed);
        CHECK(param_bools(rr.finalState, *vp, "Node", "reach") == expected);
    }
}

TEST_CASE("random scheduling witnesses asynchronous iteration counts") {
    auto vp = mustValidateCorpus("listing11.adl", iterExt());
    Engine eng(vp, iterExt());
    bool witnessed = false;
    for (int seed = 0; seed < 100 && !witnessed; ++seed) {
        RunOptions opt;
        opt.policy = PolicyConfig::random(seed);
        RunResult rr = eng.run(std::move(opt));
        REQUIRE(rr.status == RunStatus::Completed);
        witnessed = rr.iter.asyncWitnessed;
    }
    CHECK_MESSAGE(witnessed,
                  "no seed drove one instance two blocks ahead of another");
}

TEST_CASE("the final round changes no parameter and creates no instance") {
    auto vp = mustValidateCorpus("listing11.adl", iterExt());
    Engine eng(vp, iterExt());
    for (int seed = 0; seed < 10; ++seed) {
        RunOptions opt;
        opt.policy = PolicyConfig::random(seed * 13 + 1);
        opt.recordTrace = true;
        RunResult rr = eng.run(std::move(opt));
        REQUIRE(rr.status == RunStatus::Completed);
        size_t term = 0;
        for (size_t i = 0; i < rr.trace.size(); ++i)
            if (rr.trace[i].rule == Rule::IterTerm) term = i;
        size_t lastTopUp = 0;
        for (size_t i = 0; i < term; ++i)
            if (rr.trace[i].rule == Rule::IterIter ||
                rr.trace[i].rule == Rule::IterInit)
                lastTopUp = i;
        for (size_t i = lastTopUp + 1; i < term; ++i) {
            CHECK(!rr.trace[i].changedParam);
            CHECK(rr.trace[i].rule != Rule::ComCons);
        }
    }
}

TEST_CASE("instances created mid-loop receive blocks and participate") {
    const char* src = R"(
struct Spawner (count: Nat, tag: Int) {
    seed { if (count == 0 && tag == 0) then { Spawner(1, 1); } }
    grow { if (this != null && count < 3 && count > 0) then {
               Spawner(count + 1, 1);
               count := count + 10;
           } }
}
seed < Iter(grow)
)";
    auto vp = mustValidate(src, iterExt());
    Engine eng(vp, iterExt());
    RunOptions opt;
    opt.policy = PolicyConfig::random(11);
    RunResult rr = eng.run(std::move(opt));
    REQUIRE(rr.status == RunStatus::Completed);

    // seed makes one instance; the loop grows it to three
    int instances = 0;
    for (uint32_t id = vp->firstFreshLabelId(); id < rr.finalState.env.size(); ++id)
        if (rr.finalState.instance(Label{id})) ++instances;
    CHECK(instances == 3);

    // every instance created during the loop completed at least one block
    std::set<uint32_t> completed;
    for (auto [label, count] : rr.iter.completedBlocks)
        if (count > 0) completed.insert(label);
    for (uint32_t id = vp->firstFreshLabelId() + 1;
         id < vp->firstFreshLabelId() + 3; ++id)
        CHECK(completed.count(id) == 1);
}
