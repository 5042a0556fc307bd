#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "audala/lower.hpp"
#include "test_common.hpp"

using namespace audala;
using namespace audala::test;

namespace {

// The command sequence for the reachability step as printed in the
// semantics' worked interpretation.
const char* kReachabilityGolden =
    "Push(this)\n"
    "Rd(in)\n"
    "Rd(reach)\n"
    "Push(true)\n"
    "Op(=)\n"
    "If(\n"
    "  Push(true)\n"
    "  Push(this)\n"
    "  Rd(out)\n"
    "  Wr(reach)\n"
    ")\n";

const CmdList& stepOf(const ValidatedProgram& vp, const char* structName,
                      const char* stepName) {
    int si = vp.structIndex(vp.syms->intern(structName));
    REQUIRE(si >= 0);
    return vp.stepCommands(si, vp.syms->intern(stepName));
}

}  // namespace

TEST_CASE("listing 1 reachability lowers to the published nine commands") {
    auto vp = mustValidateCorpus("listing1.adl");
    const CmdList& cmds = stepOf(*vp, "Edge", "reachability");
    CHECK(render_commands(cmds, *vp->syms, vp->nullLabelNames()) ==
          kReachabilityGolden);
}

TEST_CASE("Def 2.2 clause examples") {
    auto vp = mustValidate(
        "struct A (p: Int, q: Bool, other: A) {\n"
        "  s1 { Int x := 1 + 2; }\n"
        "  s2 { if (!true) then { q := false; } }\n"
        "  s3 { A(5, true, null); }\n"
        "  s4 { p := other.other.p; }\n"
        "  empty {}\n"
        "}\nA.s1");

    // x := 1 + 2 with x a local: Push(1);Push(2);Op(+);Push(this);Wr(x)
    CHECK(render_commands(stepOf(*vp, "A", "s1"), *vp->syms) ==
          "Push(1)\nPush(2)\nOp(+)\nPush(this)\nWr(x)\n");

    // !E lowers to E;Not, and the condition precedes the If body
    CHECK(render_commands(stepOf(*vp, "A", "s2"), *vp->syms) ==
          "Push(true)\nNot\nIf(\n  Push(false)\n  Push(this)\n  Wr(q)\n)\n");

    // constructor: args then Cons; null annotated with the parameter type
    CHECK(render_commands(stepOf(*vp, "A", "s3"), *vp->syms,
                          vp->nullLabelNames()) ==
          "Push(5)\nPush(true)\nPush(null_A)\nCons(A)\n");

    // variable chain: Push(this) then one Rd per segment
    CHECK(render_commands(stepOf(*vp, "A", "s4"), *vp->syms) ==
          "Push(this)\nRd(other)\nRd(other)\nRd(p)\nPush(this)\nWr(p)\n");

    // empty statement list -> empty command list
    CHECK(stepOf(*vp, "A", "empty").empty());
}

TEST_CASE("array extension clauses") {
    Extensions ext;
    ext.arrays = true;
    auto vp = mustValidate(
        "struct A (xs: Array(Nat), n: Nat) {\n"
        "  alloc { Array(Int) a := array(3); }\n"
        "  rd { n := xs[2]; }\n"
        "  wr { xs[n] := 7; }\n"
        "  size { n := xs.s; }\n"
        "}\nA.alloc",
        ext);

    CHECK(render_commands(stepOf(*vp, "A", "alloc"), *vp->syms) ==
          "Push(3)\nArr(Int)\nPush(this)\nWr(a)\n");
    CHECK(render_commands(stepOf(*vp, "A", "rd"), *vp->syms) ==
          "Push(this)\nRd(xs)\nPush(2)\nRdA\nPush(this)\nWr(n)\n");
    // X[E] := E' lowers to E'; X; E; WrA
    CHECK(render_commands(stepOf(*vp, "A", "wr"), *vp->syms) ==
          "Push(7)\nPush(this)\nRd(xs)\nPush(this)\nRd(n)\nWrA\n");
    CHECK(render_commands(stepOf(*vp, "A", "size"), *vp->syms) ==
          "Push(this)\nRd(xs)\nAsize\nPush(this)\nWr(n)\n");
}

TEST_CASE("lowering is a homomorphism over statement concatenation") {
    auto vp = mustValidate(
        "struct A (p: Int) {\n"
        "  both { p := 1; p := p + 2; }\n"
        "  first { p := 1; }\n"
        "  second { p := p + 2; }\n"
        "}\nA.both");
    CmdList expected = stepOf(*vp, "A", "first");
    const CmdList& second = stepOf(*vp, "A", "second");
    expected.insert(expected.end(), second.begin(), second.end());
    CHECK(stepOf(*vp, "A", "both") == expected);
}

TEST_CASE("lowering is deterministic") {
    auto vp1 = mustValidateCorpus("listing6.adl");
    auto vp2 = mustValidateCorpus("listing6.adl");
    for (const char* step : {"transition", "init"}) {
        CHECK(render_commands(stepOf(*vp1, "Control", step), *vp1->syms,
                              vp1->nullLabelNames()) ==
              render_commands(stepOf(*vp2, "Control", step), *vp2->syms,
                              vp2->nullLabelNames()));
    }
}

TEST_CASE("If nesting depth does not exceed syntactic nesting") {
    auto vp = mustValidate(
        "struct A (p: Bool) {\n"
        "  s { if (p) then { if (p) then { p := false; } } }\n"
        "}\nA.s");
    const CmdList& cmds = stepOf(*vp, "A", "s");
    std::function<int(const CmdList&)> depth = [&](const CmdList& list) -> int {
        int d = 0;
        for (const Command& c : list)
            if (c.kind == CmdKind::If && c.body) d = std::max(d, 1 + depth(*c.body));
        return d;
    };
    CHECK(depth(cmds) == 2);
}
