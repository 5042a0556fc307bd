#pragma once

#include "audala/command.hpp"
#include "audala/wellformed.hpp"

namespace audala {

// Lowers every step of every struct into its command block and stores the
// blocks in the validated program. Lowering is deterministic; equal ASTs
// produce equal command lists.
void compile_steps(ValidatedProgram& vp);

CmdList lower_statements(const ValidatedProgram& vp, const StmtList& stmts);
CmdList lower_expr(const ValidatedProgram& vp, const Expr& e);

}  // namespace audala
