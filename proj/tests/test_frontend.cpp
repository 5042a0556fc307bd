#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "test_common.hpp"

using namespace audala;
using namespace audala::test;

namespace {

bool hasRule(const std::vector<Diagnostic>& diags, int rule) {
    for (const auto& d : diags)
        if (d.rule == rule) return true;
    return false;
}

std::vector<Diagnostic> expectReject(const std::string& source, Extensions ext = {}) {
    ValidateResult vr = frontend(source, ext);
    REQUIRE(vr.program == nullptr);
    REQUIRE(!vr.errors.empty());
    return vr.errors;
}

}  // namespace

TEST_CASE("listing 1 parses into the expected shape") {
    ParseResult pr = parse_program(corpus("listing1.adl"));
    REQUIRE(pr.program.has_value());
    const Program& p = *pr.program;
    REQUIRE(p.structs.size() == 2);
    CHECK(p.syms->name(p.structs[0].name) == "Node");
    CHECK(p.syms->name(p.structs[1].name) == "Edge");
    CHECK(p.structs[0].params.size() == 1);
    CHECK(p.structs[1].steps.size() == 2);
    REQUIRE(p.schedule.items.size() == 2);
    CHECK(p.schedule.items[0].kind == ScheduleItem::Kind::GlobalCall);
    REQUIRE(p.schedule.items[1].kind == ScheduleItem::Kind::Fix);
    REQUIRE(p.schedule.items[1].body.items.size() == 1);
    CHECK(p.syms->name(p.schedule.items[1].body.items[0].stepSym) == "reachability");
}

TEST_CASE("empty step body yields an empty statement list") {
    ParseResult pr = parse_program("struct A (x: Int) { foo {} }\nA.foo");
    REQUIRE(pr.program.has_value());
    CHECK(pr.program->structs[0].steps[0].body.empty());
}

TEST_CASE("keywords are rejected as identifiers (rule 1)") {
    ParseResult pr = parse_program("struct struct (x: Int){}\nfoo");
    REQUIRE(!pr.program.has_value());
    REQUIRE(!pr.errors.empty());
    CHECK(hasRule(pr.errors, 1));

    pr = parse_program("struct A (if: Int){} \nfoo");
    REQUIRE(!pr.program.has_value());
    CHECK(hasRule(pr.errors, 1));

    // "array" is a protected word even without the arrays extension
    pr = parse_program("struct A (x: Int){ s { Int array := 1; } }\nA.s");
    REQUIRE(!pr.program.has_value());
    CHECK(hasRule(pr.errors, 1));
}

TEST_CASE("parse errors carry positions") {
    ParseResult pr = parse_program("struct A (x: Int) {\n  s { x := ; }\n}\nA.s");
    REQUIRE(!pr.program.has_value());
    REQUIRE(!pr.errors.empty());
    CHECK(pr.errors[0].loc.line == 2);
    CHECK(pr.errors[0].loc.column > 0);
    CHECK(!render_diagnostics_json(pr.errors).empty());
}

TEST_CASE("corpus listings are well-formed") {
    mustValidateCorpus("listing1.adl");
    mustValidateCorpus("listing6.adl");
    mustValidateCorpus("listing8.adl");
    mustValidateCorpus("listing8_graph.adl");
    Extensions pf;
    pf.paramFix = true;
    mustValidateCorpus("listing9_graph.adl", pf);
    Extensions arr;
    arr.arrays = true;
    mustValidateCorpus("listing10.adl", arr);
    Extensions it;
    it.iter = true;
    mustValidateCorpus("listing11.adl", it);
}

TEST_CASE("single-token mutations violating rules 1-6 are rejected") {
    // rule 2: duplicate step declaration
    auto errs = expectReject(
        "struct Edge (x: Int) { init { x := 1; } init { x := 2; } }\ninit");
    CHECK(hasRule(errs, 2));

    // rule 3: duplicate parameter name
    errs = expectReject("struct Node (reach: Bool, reach: Bool) {}\nstruct E (a: Int) "
                        "{ s { a := 1; } }\ns");
    CHECK(hasRule(errs, 3));

    // rule 4: local overlaps parameter
    errs = expectReject(
        "struct Node (reach: Bool) { s { Bool reach := true; } }\ns");
    CHECK(hasRule(errs, 4));

    // rule 5: redeclaration of a local
    errs = expectReject(
        "struct Node (x: Int) { s { Int a := 1; Int a := 2; } }\ns");
    CHECK(hasRule(errs, 5));

    // rule 6: use before declaration
    errs = expectReject(
        "struct Node (x: Int) { s { x := a; Int a := 1; } }\ns");
    CHECK(hasRule(errs, 6));
}

TEST_CASE("type errors are reported") {
    // if condition must be Boolean
    expectReject("struct A (x: Int) { s { if (x) then { x := 1; } } }\nA.s");
    // update target type must match
    expectReject("struct A (x: Int) { s { x := true; } }\nA.s");
    // constructor arity
    expectReject("struct A (x: Int) { s { A(); } }\nA.s");
    // unknown step in schedule
    expectReject("struct A (x: Int) { s { x := 1; } }\nnope");
    // local call on a struct without the step
    expectReject("struct A (x: Int) { s { x := 1; } }\nstruct B (y: Int) {}\nB.s");
    // comparing unrelated struct types
    expectReject(
        "struct A (x: Int) {}\nstruct B (a: A, b: B) { s { if (a == b) then { x := "
        "1; } } }\nB.s");
}

TEST_CASE("extension syntax requires the matching flag") {
    auto errs =
        expectReject("struct A (x: Array(Int)) { s { x := x; } }\nA.s", Extensions{});
    bool mentions = false;
    for (const auto& d : errs)
        if (d.message.find("arrays") != std::string::npos) mentions = true;
    CHECK(mentions);

    errs = expectReject("struct A (x: Int) { s { x := 1; } }\nFix(s, x)", Extensions{});
    mentions = false;
    for (const auto& d : errs)
        if (d.message.find("param-fix") != std::string::npos) mentions = true;
    CHECK(mentions);

    errs = expectReject("struct A (x: Int) { s { x := 1; } }\nIter(s)", Extensions{});
    mentions = false;
    for (const auto& d : errs)
        if (d.message.find("iter") != std::string::npos) mentions = true;
    CHECK(mentions);
}

TEST_CASE("FixOn parameters must resolve to declared parameters") {
    Extensions pf;
    pf.paramFix = true;
    expectReject("struct A (x: Int) { s { x := 1; } }\nFix(s, nosuch)", pf);
    ValidateResult ok = frontend("struct A (x: Int) { s { x := 1; } }\nFix(s, x)", pf);
    CHECK(ok.program != nullptr);
}

TEST_CASE("iterators reject nested loops and unknown steps") {
    Extensions it;
    it.iter = true;
    // grammar: Iter takes step names only
    ParseResult pr =
        parse_program("struct A (x: Int) { s { x := 1; } }\nIter(Fix(s))");
    CHECK(!pr.program.has_value());
    expectReject("struct A (x: Int) { s { x := 1; } }\nIter(nosuch)", it);
}

TEST_CASE("parse-pretty-parse is a fixpoint on ASTs") {
    for (const char* name :
         {"listing1.adl", "listing6.adl", "listing8.adl", "listing8_graph.adl",
          "listing9_graph.adl", "listing10.adl", "listing11.adl"}) {
        CAPTURE(name);
        ParseResult first = parse_program(corpus(name));
        REQUIRE(first.program.has_value());
        std::string printed = pretty(*first.program);
        ParseResult second = parse_program(printed);
        REQUIRE_MESSAGE(second.program.has_value(),
                        name << ": " << render_diagnostics(second.errors));
        std::string reprinted = pretty(*second.program);
        CHECK_MESSAGE(printed == reprinted, name);
        CHECK(equal(*first.program, *second.program));
    }
}

TEST_CASE("desugaring removes else and preserves step names") {
    ParseResult pr = parse_program(corpus("listing6.adl"));
    REQUIRE(pr.program.has_value());
    Program p = desugar(std::move(*pr.program));
    // no else constructs remain
    std::function<void(const StmtList&)> scan = [&](const StmtList& list) {
        for (const Stmt& s : list) {
            if (const auto* ifs = std::get_if<IfStmt>(&s.node)) {
                CHECK(!ifs->hasElse);
                CHECK(ifs->elseBody.empty());
                scan(ifs->thenBody);
            }
        }
    };
    for (const StructDef& sd : p.structs) {
        for (const StepDef& st : sd.steps) scan(st.body);
    }
    REQUIRE(p.structs.size() == 2);
    CHECK(p.structs[1].steps.size() == 2);
    CHECK(p.syms->name(p.structs[1].steps[0].name) == "transition");
}

TEST_CASE("desugared else-if chains execute like their expansion") {
    // if(a) A else if(b) B  ==  Bool t := a; if(t){A}; if(!t && b){B}
    const char* sugared = R"(
struct P (a: Bool, b: Bool, x: Int, y: Int) {
    pick {
        if (a) then { x := 1; }
        else if (b) then { y := 2; }
    }
    init { P(true, true, 0, 0); P(false, true, 0, 0); P(false, false, 0, 0); }
}
init < pick
)";
    const char* expanded = R"(
struct P (a: Bool, b: Bool, x: Int, y: Int) {
    pick {
        Bool t := a;
        if (t) then { x := 1; }
        if (!t && b) then { y := 2; }
    }
    init { P(true, true, 0, 0); P(false, true, 0, 0); P(false, false, 0, 0); }
}
init < pick
)";
    auto runCanonical = [](const std::string& src) {
        auto vp = mustValidate(src);
        Engine eng(vp, Extensions{});
        RunResult rr = eng.run(RunOptions{});
        REQUIRE(rr.status == RunStatus::Completed);
        // compare parameter values only; guard locals differ by name
        return render_final_values(rr.finalState, *vp);
    };
    CHECK(runCanonical(sugared) == runCanonical(expanded));
}

TEST_CASE("three-clause chains with a final else stay mutually exclusive") {
    const char* sugared = R"(
struct P (k: Int, x: Int) {
    pick {
        if (k == 0) then { x := 10; k := 1; }
        else if (k == 1) then { x := 20; }
        else if (k == 2) then { x := 30; }
        else { x := 40; }
    }
    init { P(0, 0); P(1, 0); P(2, 0); P(7, 0); }
}
init < pick
)";
    auto vp = mustValidate(sugared);
    Engine eng(vp, Extensions{});
    RunResult rr = eng.run(RunOptions{});
    REQUIRE(rr.status == RunStatus::Completed);
    std::string report = render_final_values(rr.finalState, *vp);
    // the k==0 instance sets k:=1 inside its clause; later clauses must not fire
    CHECK(report.find("k = 1, x = 10") != std::string::npos);
    CHECK(report.find("x = 20") != std::string::npos);
    CHECK(report.find("x = 30") != std::string::npos);
    CHECK(report.find("x = 40") != std::string::npos);
}
