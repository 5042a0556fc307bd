#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "harness.hpp"
#include "test_common.hpp"

using namespace audala;
using namespace audala::test;

namespace {

Extensions arraysExt() {
    Extensions e;
    e.arrays = true;
    return e;
}

RunResult runProgram(const std::string& src, RunOptions opt = {}) {
    auto vp = mustValidate(src, arraysExt());
    Engine eng(vp, arraysExt());
    return eng.run(std::move(opt));
}

}  // namespace

TEST_CASE("allocation initializes cells to the element default") {
    const char* src = R"(
struct A (ints: Array(Int), nodes: Array(A), probeInt: Int, probeLabel: A) {
    alloc { ints := array(2); nodes := array(2); }
    read { if (this != null) then { probeInt := ints[1]; probeLabel := nodes[0]; } }
    init { A(null, null, 99, null); }
}
init < alloc < read
)";
    auto vp = mustValidate(src, arraysExt());
    Engine eng(vp, arraysExt());
    RunResult rr = eng.run(RunOptions{});
    REQUIRE(rr.status == RunStatus::Completed);
    uint32_t a = vp->firstFreshLabelId();
    const StructInstance* si = rr.finalState.instance(Label{a});
    CHECK(std::get<int64_t>(si->params[2]) == 0);                 // fresh Int cell
    CHECK(std::get<Label>(si->params[3]) == Label{0});            // null_A
}

TEST_CASE("allocations use disjoint address ranges covering all of memory") {
    auto vp = mustValidateCorpus("listing10.adl", arraysExt());
    Engine eng(vp, arraysExt());
    RunResult rr = eng.run(RunOptions{});
    REQUIRE(rr.status == RunStatus::Completed);
    const ExecState& st = rr.finalState;
    std::vector<std::pair<uint64_t, int64_t>> ranges;
    int64_t total = 0;
    for (uint32_t id = vp->firstFreshLabelId(); id < st.env.size(); ++id) {
        if (const auto* arr = std::get_if<ArrayInstance>(&st.env[id])) {
            ranges.emplace_back(arr->addr, arr->size);
            total += arr->size;
        }
    }
    REQUIRE(ranges.size() == 3);  // array(2), array(1), array(1)
    std::sort(ranges.begin(), ranges.end());
    CHECK(ranges[0].first == 1);  // address 0 is reserved
    for (size_t i = 1; i < ranges.size(); ++i)
        CHECK(ranges[i].first >=
              ranges[i - 1].first + static_cast<uint64_t>(ranges[i - 1].second));
    // M's domain equals the union of live ranges
    CHECK(static_cast<int64_t>(st.memory.size()) == total + 1);
}

TEST_CASE("array size queries, including the null array") {
    const char* src = R"(
struct A (xs: Array(Int), n: Nat, nullN: Nat, guard: Bool) {
    s { if (this != null) then {
            xs := array(2);
            n := xs.s;
        } }
    t { if (this != null) then { guard := nullN < xs.s; } }
    init { A(null, 7, 7, true); }
}
init < s
)";
    auto vp = mustValidate(src, arraysExt());
    Engine eng(vp, arraysExt());
    RunResult rr = eng.run(RunOptions{});
    REQUIRE(rr.status == RunStatus::Completed);
    uint32_t a = vp->firstFreshLabelId();
    CHECK(std::get<int64_t>(rr.finalState.instance(Label{a})->params[1]) == 2);

    // size of the null array is 0, so `done < succ.s` is false for done >= 0
    const char* nullSize = R"(
struct B (xs: Array(Int), n: Nat, guard: Bool) {
    s { if (this != null) then { n := xs.s; guard := 0 < xs.s; } }
    init { B(null, 7, true); }
}
init < s
)";
    auto vp2 = mustValidate(nullSize, arraysExt());
    Engine eng2(vp2, arraysExt());
    RunResult rr2 = eng2.run(RunOptions{});
    REQUIRE(rr2.status == RunStatus::Completed);
    uint32_t b = vp2->firstFreshLabelId();
    CHECK(std::get<int64_t>(rr2.finalState.instance(Label{b})->params[1]) == 0);
    CHECK(std::get<bool>(rr2.finalState.instance(Label{b})->params[2]) == false);
}

TEST_CASE("array(0) faults with BadArraySize") {
    RunResult rr = runProgram(
        "struct A (x: Int) { s { Array(Int) a := array(0); } }\nA.s");
    CHECK(rr.status == RunStatus::RuntimeFault);
    CHECK(rr.fault == FaultKind::BadArraySize);
}

TEST_CASE("out-of-bounds access faults with IndexOutOfBounds") {
    RunResult rr = runProgram(R"(
struct A (xs: Array(Int), n: Int) {
    s { if (this != null) then { xs := array(2); n := xs[2]; } }
    init { A(null, 0); }
}
init < s
)");
    CHECK(rr.status == RunStatus::RuntimeFault);
    CHECK(rr.fault == FaultKind::IndexOutOfBounds);

    rr = runProgram(R"(
struct A (xs: Array(Int)) {
    s { if (this != null) then { xs := array(2); xs[5] := 1; } }
    init { A(null); }
}
init < s
)");
    CHECK(rr.status == RunStatus::RuntimeFault);
    CHECK(rr.fault == FaultKind::IndexOutOfBounds);
}

TEST_CASE("reading through the null array faults") {
    RunResult rr = runProgram(R"(
struct A (xs: Array(Int), n: Int) {
    s { if (this != null) then { n := xs[0]; } }
    init { A(null, 0); }
}
init < s
)");
    CHECK(rr.status == RunStatus::RuntimeFault);
    CHECK(rr.fault == FaultKind::NullArrayAccess);
}

TEST_CASE("writes through the null array are skipped, or fault in strict mode") {
    const char* src = R"(
struct A (xs: Array(Int), probe: Int) {
    s { if (this != null) then { xs[0] := 1; probe := 42; } }
    init { A(null, 0); }
}
init < s
)";
    RunResult rr = runProgram(src);
    REQUIRE(rr.status == RunStatus::Completed);
    CHECK(!rr.warnings.empty());

    auto vp = mustValidate(src, arraysExt());
    Engine eng(vp, arraysExt());
    // the write was dropped but execution continued
    uint32_t a = vp->firstFreshLabelId();
    CHECK(std::get<int64_t>(rr.finalState.instance(Label{a})->params[1]) == 42);

    RunOptions strict;
    strict.strictNullArray = true;
    RunResult rs = runProgram(src, std::move(strict));
    CHECK(rs.status == RunStatus::RuntimeFault);
    CHECK(rs.fault == FaultKind::NullArrayWrite);
}

TEST_CASE("cell writes drive fixpoint stability like parameters") {
    // overwriting a cell with its current value leaves the stack untouched;
    // a genuine change resets the active entry and forces another iteration
    const char* changing = R"(
struct A (xs: Array(Int)) {
    s { if (this != null && xs[0] == 0) then { xs[0] := 1; } }
    init { A(array(1)); }
}
init < Fix(s)
)";
    auto vp = mustValidate(changing, arraysExt());
    Engine eng(vp, arraysExt());
    RunOptions opt;
    opt.recordTrace = true;
    RunResult rr = eng.run(std::move(opt));
    REQUIRE(rr.status == RunStatus::Completed);
    int fixIters = 0;
    bool sawCellReset = false;
    for (const TraceEvent& ev : rr.trace) {
        if (ev.rule == Rule::FixIter) ++fixIters;
        if (ev.rule == Rule::ComWrA && ev.changedParam) {
            bool topFalse = !ev.stabilityAfter.empty() && !ev.stabilityAfter.back();
            sawCellReset = topFalse;
        }
    }
    CHECK(fixIters == 1);  // the change forced exactly one extra iteration
    CHECK(sawCellReset);

    const char* same = R"(
struct A (xs: Array(Int)) {
    s { if (this != null) then { xs[0] := 0; } }
    init { A(array(1)); }
}
init < Fix(s)
)";
    auto vp2 = mustValidate(same, arraysExt());
    Engine eng2(vp2, arraysExt());
    RunOptions opt2;
    opt2.recordTrace = true;
    RunResult rr2 = eng2.run(std::move(opt2));
    REQUIRE(rr2.status == RunStatus::Completed);
    for (const TraceEvent& ev : rr2.trace)
        if (ev.rule == Rule::FixIter) CHECK(false);  // no extra iteration
}

TEST_CASE("listing 10 computes reachability (BFS oracle), all policies") {
    auto vp = mustValidateCorpus("listing10.adl", arraysExt());
    Engine eng(vp, arraysExt());
    std::vector<bool> oracle = bfs_reach(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}}, 1);
    for (PolicyConfig policy :
         {PolicyConfig::lockstep(), PolicyConfig::sequential(),
          PolicyConfig::random(21), PolicyConfig::parallel()}) {
        RunOptions opt;
        opt.policy = policy;
        RunResult rr = eng.run(std::move(opt));
        REQUIRE(rr.status == RunStatus::Completed);
        CHECK(param_bools(rr.finalState, *vp, "Node", "reach") == oracle);
    }
}

TEST_CASE("listing 10 and listing 1 agree on final reach values") {
    auto vp1 = mustValidateCorpus("listing1.adl");
    Engine eng1(vp1, {});
    RunResult r1 = eng1.run(RunOptions{});
    REQUIRE(r1.status == RunStatus::Completed);

    auto vp10 = mustValidateCorpus("listing10.adl", arraysExt());
    Engine eng10(vp10, arraysExt());
    RunResult r10 = eng10.run(RunOptions{});
    REQUIRE(r10.status == RunStatus::Completed);

    CHECK(param_bools(r1.finalState, *vp1, "Node", "reach") ==
          param_bools(r10.finalState, *vp10, "Node", "reach"));
}

TEST_CASE("array cells participate in race detection") {
    // two instances write different values into the same cell of a shared array
    const char* src = R"(
struct W (xs: Array(Int), v: Int) {
    w { if (this != null) then { xs[0] := v; } }
    init {
        Array(Int) shared := array(1);
        W(shared, 1);
        W(shared, 2);
    }
}
init < w
)";
    auto vp = mustValidate(src, arraysExt());
    Engine eng(vp, arraysExt());
    RunOptions opt;
    opt.recordAccesses = true;
    RunResult rr = eng.run(std::move(opt));
    REQUIRE(rr.status == RunStatus::Completed);
    std::vector<RaceReport> races = detect_races(rr.windows);
    REQUIRE(races.size() == 1);
    CHECK(races[0].isArrayCell);
    CHECK(races[0].index == 0);
    CHECK(races[0].writeWrite);
}
