#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace audala {

struct SourceLoc {
    int line = 0;  // 1-based; 0 = unknown
    int column = 0;

    bool known() const { return line > 0; }
};

// One frontend problem: a parse error, a well-formedness rule violation
// (rule 1..6) or a type mismatch. `rule` is 0 for parse/type errors.
struct Diagnostic {
    SourceLoc loc;
    int rule = 0;
    std::string message;
};

std::string render_diagnostics(const std::vector<Diagnostic>& diags);
std::string render_diagnostics_json(const std::vector<Diagnostic>& diags);

}  // namespace audala
