// Command-line entry point: run AuDaLa programs, dump command IR, compile
// Turing machines and differentially test them against the step oracle.
//
// Exit codes for `run`: 0 completed, 2 divergence suspected, 3 stuck,
// 4 runtime fault. Frontend and I/O errors exit 1.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "audala/canonical.hpp"
#include "audala/desugar.hpp"
#include "audala/engine.hpp"
#include "audala/lower.hpp"
#include "audala/parser.hpp"
#include "audala/race.hpp"
#include "audala/tm.hpp"
#include "audala/tm_compile.hpp"
#include "audala/tm_diff.hpp"
#include "audala/wellformed.hpp"

namespace {

using namespace audala;

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

struct FrontendArgs {
    std::string program;
    std::vector<std::string> exts;
    bool jsonErrors = false;

    Extensions extensions() const {
        Extensions e;
        for (const std::string& x : exts) {
            if (x == "param-fix")
                e.paramFix = true;
            else if (x == "iter")
                e.iter = true;
            else if (x == "arrays")
                e.arrays = true;
            else
                throw CLI::ValidationError("--ext", "unknown extension '" + x +
                                                        "' (param-fix, iter, arrays)");
        }
        return e;
    }
};

void addFrontendArgs(CLI::App* cmd, FrontendArgs& fa) {
    cmd->add_option("program", fa.program, "AuDaLa source file (.adl)")->required();
    cmd->add_option("--ext", fa.exts, "extensions to enable (param-fix, iter, arrays)")
        ->delimiter(',');
    cmd->add_flag("--json-errors", fa.jsonErrors, "print diagnostics as JSON");
}

std::shared_ptr<ValidatedProgram> loadProgram(const FrontendArgs& fa) {
    ValidateResult vr = frontend(readFile(fa.program), fa.extensions());
    if (!vr.program) {
        if (fa.jsonErrors)
            std::cerr << render_diagnostics_json(vr.errors) << "\n";
        else
            std::cerr << render_diagnostics(vr.errors);
        return nullptr;
    }
    return vr.program;
}

int statusCode(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return 0;
        case RunStatus::DivergenceSuspected: return 2;
        case RunStatus::Stuck: return 3;
        case RunStatus::RuntimeFault: return 4;
    }
    return 1;
}

PolicyConfig parsePolicy(const std::string& name, uint64_t seed) {
    if (name == "lockstep") return PolicyConfig::lockstep();
    if (name == "random") return PolicyConfig::random(seed);
    if (name == "sequential") return PolicyConfig::sequential();
    if (name == "parallel") return PolicyConfig::parallel();
    throw CLI::ValidationError("--policy", "unknown policy '" + name + "'");
}

int cmdRun(const FrontendArgs& fa, const std::string& policyName, uint64_t seed,
           int64_t maxFix, int64_t maxTrans, const std::string& tracePath,
           bool raceCheck, bool strictNullArray) {
    auto vp = loadProgram(fa);
    if (!vp) return 1;
    Engine eng(vp, fa.extensions());
    RunOptions opt;
    opt.policy = parsePolicy(policyName, seed);
    opt.limits.maxFixpointIterations = maxFix;
    opt.limits.maxTotalTransitions = maxTrans;
    opt.recordTrace = !tracePath.empty();
    opt.recordAccesses = raceCheck;
    opt.strictNullArray = strictNullArray;
    RunResult rr = eng.run(std::move(opt));

    std::cout << eng.final_report(rr.finalState);
    switch (rr.status) {
        case RunStatus::Completed: break;
        case RunStatus::DivergenceSuspected:
            std::cerr << "divergence suspected in " << rr.divergenceMarker << " after "
                      << rr.transitions << " transitions\n";
            break;
        case RunStatus::Stuck: std::cerr << "stuck: no transition enabled\n"; break;
        case RunStatus::RuntimeFault:
            std::cerr << "runtime fault: " << rr.faultDetail << "\n";
            break;
    }
    for (const std::string& w : rr.warnings) std::cerr << "warning: " << w << "\n";
    if (!tracePath.empty())
        writeFile(tracePath, trace_to_jsonl(rr.trace, eng.extensions().paramFix,
                                            *vp->syms));
    if (raceCheck) {
        std::vector<RaceReport> races = detect_races(rr.windows);
        CanonicalMap map = canonical_map(rr.finalState, *vp);
        std::cout << races_to_json(races, *vp, map) << "\n";
    }
    return statusCode(rr.status);
}

int cmdDumpIr(const FrontendArgs& fa, const std::string& stepSel) {
    auto vp = loadProgram(fa);
    if (!vp) return 1;
    std::vector<std::string> nullNames = vp->nullLabelNames();
    auto dumpOne = [&](int si, Sym step) {
        std::cout << vp->syms->name(vp->structs[si].name) << "."
                  << vp->syms->name(step) << ":\n";
        std::cout << render_commands(vp->stepCommands(si, step), *vp->syms, nullNames)
                  << "\n";
    };
    if (!stepSel.empty()) {
        size_t dot = stepSel.find('.');
        if (dot == std::string::npos) {
            std::cerr << "--step expects Struct.step\n";
            return 1;
        }
        int si = vp->structIndex(vp->syms->intern(stepSel.substr(0, dot)));
        if (si < 0) {
            std::cerr << "unknown struct '" << stepSel.substr(0, dot) << "'\n";
            return 1;
        }
        Sym step = vp->syms->intern(stepSel.substr(dot + 1));
        if (!vp->structs[si].stepIndex.count(step)) {
            std::cerr << "struct has no step '" << stepSel.substr(dot + 1) << "'\n";
            return 1;
        }
        dumpOne(si, step);
        return 0;
    }
    for (size_t si = 0; si < vp->structs.size(); ++si) {
        for (const StepDef& st : vp->ast.structs[si].steps)
            dumpOne(static_cast<int>(si), st.name);
    }
    return 0;
}

int cmdRaceCheck(const FrontendArgs& fa, const std::string& policyName, uint64_t seed,
                 int64_t maxFix) {
    auto vp = loadProgram(fa);
    if (!vp) return 1;
    Engine eng(vp, fa.extensions());
    RunOptions opt;
    opt.policy = parsePolicy(policyName, seed);
    opt.limits.maxFixpointIterations = maxFix;
    opt.recordAccesses = true;
    RunResult rr = eng.run(std::move(opt));
    std::vector<RaceReport> races = detect_races(rr.windows);
    CanonicalMap map = canonical_map(rr.finalState, *vp);
    std::cout << races_to_json(races, *vp, map) << "\n";
    return statusCode(rr.status);
}

int cmdCompileTm(const std::string& tmPath, const std::string& outPath) {
    std::vector<int64_t> input;
    TuringMachine tm = tm_from_json(readFile(tmPath), input);
    std::string source = compile_tm_source(tm, input);
    if (outPath.empty())
        std::cout << source;
    else
        writeFile(outPath, source);
    return 0;
}

int cmdDiffCheck(const std::string& tmPath, int64_t steps,
                 const std::string& policyName, uint64_t seed) {
    std::vector<int64_t> input;
    TuringMachine tm = tm_from_json(readFile(tmPath), input);
    DiffVerdict v = differential_check(tm, input, steps, parsePolicy(policyName, seed));
    switch (v.kind) {
        case DiffVerdict::Kind::Agreement:
            std::cout << "Agreement: " << v.steps << " transitions";
            if (v.halted)
                std::cout << ", halted, accepting = "
                          << (v.accepting ? "true" : "false");
            else
                std::cout << ", step bound reached";
            std::cout << "\n";
            return 0;
        case DiffVerdict::Kind::Divergence:
            std::cout << "Divergence: " << v.detail << "\n";
            return 2;
        case DiffVerdict::Kind::EngineError:
            std::cout << "EngineError: " << v.detail << "\n";
            return 4;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AuDaLa reference interpreter"};
    app.require_subcommand(1);

    FrontendArgs runFa;
    std::string runPolicy = "lockstep";
    uint64_t runSeed = 0;
    int64_t maxFix = 10000;
    int64_t maxTrans = 50'000'000;
    std::string tracePath;
    bool raceCheck = false;
    bool strictNullArray = false;
    CLI::App* run = app.add_subcommand("run", "execute a program");
    addFrontendArgs(run, runFa);
    run->add_option("--policy", runPolicy, "lockstep|random|sequential|parallel");
    run->add_option("--seed", runSeed, "seed for the random policy");
    run->add_option("--max-fixpoint-iterations", maxFix);
    run->add_option("--max-transitions", maxTrans);
    run->add_option("--trace", tracePath, "write a JSONL trace");
    run->add_flag("--race-check", raceCheck, "report races per step execution");
    run->add_flag("--strict-null-array", strictNullArray,
                  "writes through the null array fault instead of skipping");

    FrontendArgs irFa;
    std::string stepSel;
    CLI::App* dump = app.add_subcommand("dump-ir", "print command lists");
    addFrontendArgs(dump, irFa);
    dump->add_option("--step", stepSel, "only this step, as Struct.step");

    FrontendArgs raceFa;
    std::string racePolicy = "lockstep";
    uint64_t raceSeed = 0;
    int64_t raceMaxFix = 10000;
    CLI::App* race = app.add_subcommand("race-check", "run and report races");
    addFrontendArgs(race, raceFa);
    race->add_option("--policy", racePolicy);
    race->add_option("--seed", raceSeed);
    race->add_option("--max-fixpoint-iterations", raceMaxFix);

    std::string tmPath, outPath;
    CLI::App* compile = app.add_subcommand("compile-tm", "Turing machine to AuDaLa");
    compile->add_option("tm", tmPath, "TM spec (JSON)")->required();
    compile->add_option("-o,--output", outPath, "output .adl file");

    std::string diffTmPath, diffPolicy = "lockstep";
    int64_t diffSteps = 50;
    uint64_t diffSeed = 0;
    CLI::App* diff = app.add_subcommand(
        "diff-check", "compile a TM and test it against the step oracle");
    diff->add_option("tm", diffTmPath, "TM spec (JSON)")->required();
    diff->add_option("--steps", diffSteps, "TM transition bound");
    diff->add_option("--policy", diffPolicy);
    diff->add_option("--seed", diffSeed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmdRun(runFa, runPolicy, runSeed, maxFix, maxTrans, tracePath,
                          raceCheck, strictNullArray);
        if (dump->parsed()) return cmdDumpIr(irFa, stepSel);
        if (race->parsed()) return cmdRaceCheck(raceFa, racePolicy, raceSeed, raceMaxFix);
        if (compile->parsed()) return cmdCompileTm(tmPath, outPath);
        if (diff->parsed()) return cmdDiffCheck(diffTmPath, diffSteps, diffPolicy, diffSeed);
    } catch (const TMParseError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const CompileError& e) {
        std::cerr << "error: " << e.message << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
