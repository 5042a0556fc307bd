#pragma once

#include "audala/ast.hpp"
#include "audala/tm.hpp"

namespace audala {

struct CompileError {
    std::string message;
};

// Builds the AuDaLa implementation of `tm` with the tape initialized to
// `input`: a TapeCell struct, a Control struct whose transition step holds
// one else-if clause per defined delta entry (in (q, s) order), an init step
// creating and linking one cell per input symbol, and the schedule
// `init < Fix(transition)`. Throws CompileError on an empty input or input
// symbols outside the machine's alphabet.
Program compile_tm(const TuringMachine& tm, const std::vector<int64_t>& input);

// The same program as source text.
std::string compile_tm_source(const TuringMachine& tm,
                              const std::vector<int64_t>& input);

}  // namespace audala
