#pragma once

#include <optional>
#include <string_view>

#include "audala/ast.hpp"

namespace audala {

struct ParseResult {
    std::optional<Program> program;  // set iff errors is empty
    std::vector<Diagnostic> errors;
};

ParseResult parse_program(std::string_view source);

}  // namespace audala
