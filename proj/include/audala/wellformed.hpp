#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "audala/ast.hpp"
#include "audala/command.hpp"
#include "audala/value.hpp"

namespace audala {

struct Extensions {
    bool paramFix = false;
    bool iter = false;
    bool arrays = false;
};

struct ParamInfo {
    Sym name = 0;
    SynType type;
};

struct StructInfo {
    Sym name = 0;
    std::vector<ParamInfo> params;
    std::unordered_map<Sym, int> stepIndex;  // step name -> index in ast steps

    int paramIndex(Sym x) const {
        for (size_t i = 0; i < params.size(); ++i)
            if (params[i].name == x) return static_cast<int>(i);
        return -1;
    }
};

// A checked, desugared, annotated program together with the resolved tables
// the engine needs. Null label ids are fixed here: struct i gets label i and
// the null array gets label structs.size(); fresh labels start after that.
struct ValidatedProgram {
    Program ast;
    std::shared_ptr<SymbolTable> syms;
    Extensions required;  // extensions the program's syntax relies on
    std::vector<StructInfo> structs;

    // Global enumeration of (struct, param) pairs; used by the stability
    // function of parameter-specific fixpoints and by the race detector.
    std::vector<std::pair<int, int>> paramKeys;            // key -> (struct, param)
    std::vector<std::vector<int>> paramKeyOf;              // [struct][param] -> key
    std::unordered_map<Sym, std::vector<int>> keysByName;  // name -> keys

    // Compiled command block per (struct, step); empty block when the struct
    // does not define the step.
    std::vector<std::unordered_map<Sym, CmdBlock>> stepBlocks;

    std::unordered_map<Sym, int> structIndexByName;

    int structIndex(Sym name) const {
        auto it = structIndexByName.find(name);
        return it == structIndexByName.end() ? -1 : it->second;
    }

    uint32_t nullArrayLabelId() const { return static_cast<uint32_t>(structs.size()); }
    uint32_t firstFreshLabelId() const {
        return static_cast<uint32_t>(structs.size()) + 1;
    }
    bool isNullLabel(Label l) const { return l.id <= structs.size(); }

    CmdBlock stepBlock(int structIdx, Sym step) const;
    const CmdList& stepCommands(int structIdx, Sym step) const;

    // Rendered names for null labels: "null_<Struct>" plus "null_array".
    std::vector<std::string> nullLabelNames() const;
};

struct ValidateResult {
    std::shared_ptr<ValidatedProgram> program;  // set iff errors is empty
    std::vector<Diagnostic> errors;
};

// Runs all six well-formedness rules plus the minimal type check over an
// already-desugared program. `enabled` gates the extension syntax; using
// extension syntax without the flag is reported as an error naming the flag.
ValidateResult check_well_formed(Program desugared, Extensions enabled);

// parse + desugar + check in one call.
ValidateResult frontend(std::string_view source, Extensions enabled);

// Null value of a syntactic type (Def. of defaultVal): 0, false, "",
// the struct's null label, or the null array label.
Value default_val(const ValidatedProgram& vp, const SynType& t);

}  // namespace audala
