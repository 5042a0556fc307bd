#pragma once

#include "audala/engine.hpp"
#include "audala/tm.hpp"

namespace audala {

// Implementation configuration extraction (the (state, tape) pair read from
// the single non-null Control instance and its linked TapeCells).
struct ExtractedConfig {
    enum class Status : uint8_t { Ok, NotIdle, MalformedWorld };
    Status status = Status::Ok;
    TMConfiguration config;
    std::string detail;
};

ExtractedConfig extract_configuration(const ExecState& st, const Engine& eng);

struct DiffVerdict {
    enum class Kind : uint8_t { Agreement, Divergence, EngineError };
    Kind kind = Kind::Agreement;
    bool halted = false;     // the machine halted within the step bound
    bool accepting = false;  // valid when halted
    int64_t steps = 0;       // TM transitions mirrored
    std::string detail;

    // evidence for the lemma suite, collected from the same run
    std::vector<StepWindow> windows;  // every step execution, accesses recorded
    std::vector<int> controlCounts;   // non-null Controls at each idle checkpoint
    std::string postInitCanonical;
    RunStatus runStatus = RunStatus::Completed;
};

// Runs the compiled program under `policy`, extracting the implementation
// configuration after init and after every fixpoint iteration, and compares
// each against the tm_step oracle. Reports the first divergence, or
// Agreement with the halt state within `stepBound` transitions.
DiffVerdict differential_check(const TuringMachine& tm,
                               const std::vector<int64_t>& input, int64_t stepBound,
                               PolicyConfig policy);

}  // namespace audala
