#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>

#include "audala/state.hpp"

namespace audala {

enum class Rule : uint8_t {
    ComPush,
    ComPushThis,
    ComRd,
    ComWr,
    ComWrNSkip,
    ComNot,
    ComOp,
    ComCons,
    ComIfT,
    ComIfF,
    ComRdA,
    ComWrA,
    ComWrASkip,
    ComAsize,
    ComArr,
    InitG,
    InitL,
    FixInit,
    FixIter,
    FixTerm,
    IterInit,
    IterIter,
    IterTerm,
};

// Rule names as printed in traces. With the param-fix extension enabled the
// write and fixpoint rules carry their N-variant names.
const char* rule_name(Rule r, bool paramFix);

inline bool is_schedule_rule(Rule r) { return r >= Rule::InitG; }

enum class RunStatus : uint8_t { Completed, DivergenceSuspected, Stuck, RuntimeFault };

enum class FaultKind : uint8_t {
    None,
    DivisionByZero,
    BadArraySize,
    IndexOutOfBounds,
    NullArrayAccess,
    NullArrayWrite,  // strict mode only
};

struct EngineFault {
    FaultKind kind;
    std::string detail;
};

struct TransitionDescriptor {
    Rule rule = Rule::ComPush;
    Label actor;  // command rules only
    bool isSchedule() const { return is_schedule_rule(rule); }
};

struct PolicyConfig {
    enum class Kind : uint8_t { Lockstep, Random, Sequential, Parallel };
    Kind kind = Kind::Lockstep;
    uint64_t seed = 0;

    static PolicyConfig lockstep() { return {}; }
    static PolicyConfig random(uint64_t seed) {
        return {Kind::Random, seed};
    }
    static PolicyConfig sequential() { return {Kind::Sequential, 0}; }
    static PolicyConfig parallel() { return {Kind::Parallel, 0}; }
};

struct Limits {
    int64_t maxFixpointIterations = 10000;
    int64_t maxTotalTransitions = 50'000'000;
};

struct TraceEvent {
    Rule rule;
    bool hasActor = false;
    Label actor;
    std::string command;  // rendered head command (command rules)
    bool hasTarget = false;
    Label target;
    Sym targetVar = 0;
    int64_t targetIndex = -1;  // array writes/reads
    bool changedParam = false;
    std::vector<uint8_t> stabilityAfter;
};

// One parameter (or array cell) access during a step-execution window.
struct AccessRecord {
    Label accessor;
    Label target;
    bool isArrayCell = false;
    Sym var = 0;         // parameter accesses
    int64_t index = 0;   // array cell accesses
    bool isWrite = false;
};

// The execution of one step: from its Init transition to the first Done
// state. Window ordinals count executions of the same step name.
struct StepWindow {
    Sym stepSym = 0;
    int structIdx = -1;  // InitL only
    int ordinal = 0;     // 1-based, per step name
    std::vector<AccessRecord> accesses;
};

struct IterStats {
    bool asyncWitnessed = false;  // some instance got 2+ blocks ahead of another
    std::vector<std::pair<uint32_t, uint64_t>> completedBlocks;  // label -> count
};

struct RunResult {
    RunStatus status = RunStatus::Completed;
    FaultKind fault = FaultKind::None;
    std::string faultDetail;
    std::string divergenceMarker;
    ExecState finalState;
    uint64_t transitions = 0;
    std::vector<TraceEvent> trace;
    std::vector<StepWindow> windows;
    std::vector<std::string> warnings;
    IterStats iter;
    bool stoppedByObserver = false;
};

enum class ObserverAction : uint8_t { Continue, Stop };

struct RunOptions {
    PolicyConfig policy;
    Limits limits;
    bool recordTrace = false;
    bool recordAccesses = false;
    bool strictNullArray = false;
    // Called when Done holds and a schedule transition is about to be
    // applied; Stop ends the run before applying it.
    std::function<ObserverAction(const TransitionDescriptor&, const ExecState&)>
        beforeSchedule;
};

class Engine {
public:
    Engine(std::shared_ptr<const ValidatedProgram> program, Extensions ext);

    const ValidatedProgram& program() const { return *program_; }
    const Extensions& extensions() const { return ext_; }

    ExecState initial_state() const;
    bool done(const ExecState& st) const;

    // All transitions enabled in `st`: one per busy instance whose head
    // command's premises hold, plus at most one schedule transition.
    std::vector<TransitionDescriptor> enabled_transitions(const ExecState& st) const;

    // Applies one transition. Throws EngineFault on runtime faults and
    // std::logic_error if the descriptor is not enabled.
    void apply(ExecState& st, const TransitionDescriptor& td,
               RunOptions* opt = nullptr, RunResult* sink = nullptr) const;

    RunResult run(RunOptions opt) const;
    RunResult run_from(ExecState start, RunOptions opt) const;

    // Applies the head schedule transition (which must be InitG/InitL) and
    // runs command transitions until Done. Used by the per-step determinism
    // and race harnesses.
    RunResult run_window(ExecState start, RunOptions opt) const;

    std::optional<TransitionDescriptor> schedule_transition(const ExecState& st) const;

    // Rendered form of `run`'s report: final parameter values of all
    // non-null instances in canonical label order.
    std::string final_report(const ExecState& st) const;

private:
    std::shared_ptr<const ValidatedProgram> program_;
    Extensions ext_;
    std::vector<std::vector<Value>> defaultParams_;  // per struct
    std::vector<RtItem> rtSchedule_;
    std::vector<std::string> nullNames_;

    std::vector<RtItem> compileSchedule(const Schedule& s) const;

    friend struct Driver;
    struct CommandCtx;
    bool commandEnabled(const ExecState& st, const StructInstance& si,
                        const Command& c, Rule* ruleOut) const;
    // Returns the number of block-boundary frames the instance finished.
    int applyCommand(ExecState& st, Label actor, RunOptions* opt,
                     RunResult* sink) const;
    void applySchedule(ExecState& st, const TransitionDescriptor& td, RunOptions* opt,
                       RunResult* sink) const;
    bool iterIterPremise(const ExecState& st, const IterInfo& info) const;

    int consumeHead(StructInstance& si) const;
    uint32_t allocateLabel(ExecState& st) const;

    void traceCommand(RunResult* sink, RunOptions* opt, Rule rule, Label actor,
                      const Command& cmd, const ExecState& st, bool hasTarget = false,
                      Label target = {}, Sym var = 0, int64_t index = -1,
                      bool changed = false) const;
    void traceSchedule(RunResult* sink, RunOptions* opt, Rule rule,
                       const ExecState& st) const;
};

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace, bool paramFix,
                           const SymbolTable& syms);

}  // namespace audala
