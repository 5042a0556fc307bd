#pragma once

#include "audala/ast.hpp"

namespace audala {

// Rewrites else/else-if chains into core syntax: one fresh Boolean guard per
// chain plus plain if-then statements. `if(a){A} else if(b){B}` becomes
//
//     Bool $g := a;
//     if ($g) { A }
//     if (!$g && b) { B }
//
// Non-final clauses additionally set `$g := true;` so later clauses stay
// disabled once one has fired. The output contains no else constructs.
Program desugar(Program p);

}  // namespace audala
