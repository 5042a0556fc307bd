#pragma once

#include <memory>
#include <string>
#include <vector>

#include "audala/ast.hpp"
#include "audala/value.hpp"

namespace audala {

// The atomic execution units produced by the interpretation function. Seven
// base commands plus the four array-extension commands.
enum class CmdKind : uint8_t {
    Push,      // push a semantic value
    PushThis,  // push the executing instance's label
    Rd,        // read variable through the label on top of the stack
    Wr,        // write a value through a label
    Cons,      // construct a struct instance
    If,        // conditionally prepend the body
    Not,       // negate the Boolean on top
    Op,        // apply a binary operator
    RdA,       // indexed array read
    WrA,       // indexed array write
    Arr,       // allocate an array
    Asize,     // push an array's size
};

struct Command;
using CmdList = std::vector<Command>;
using CmdBlock = std::shared_ptr<const CmdList>;

struct Command {
    CmdKind kind = CmdKind::Push;
    Value value;             // Push
    Sym var = 0;             // Rd / Wr
    int structIdx = -1;      // Cons
    BinOp op = BinOp::Eq;    // Op
    CmdBlock body;           // If
    Value arrDefault;        // Arr: cell initializer
    std::string typeName;    // Cons / Arr: rendered type name

    bool operator==(const Command& o) const;
};

inline Command cmd_push(Value v) {
    Command c;
    c.kind = CmdKind::Push;
    c.value = std::move(v);
    return c;
}
inline Command cmd_push_this() {
    Command c;
    c.kind = CmdKind::PushThis;
    return c;
}
inline Command cmd_rd(Sym x) {
    Command c;
    c.kind = CmdKind::Rd;
    c.var = x;
    return c;
}
inline Command cmd_wr(Sym x) {
    Command c;
    c.kind = CmdKind::Wr;
    c.var = x;
    return c;
}
inline Command cmd_if(CmdBlock body) {
    Command c;
    c.kind = CmdKind::If;
    c.body = std::move(body);
    return c;
}
inline Command cmd_not() {
    Command c;
    c.kind = CmdKind::Not;
    return c;
}
inline Command cmd_op(BinOp op) {
    Command c;
    c.kind = CmdKind::Op;
    c.op = op;
    return c;
}

// Stable textual form: one command per line, If bodies indented two spaces.
// Matches the notation the semantics uses (equality renders as `=`).
// `nullNames[i]` names null label i (e.g. "null_Node") inside Push(...).
std::string render_commands(const CmdList& cmds, const SymbolTable& syms,
                            const std::vector<std::string>& nullNames,
                            int indent = 0);
std::string render_commands(const CmdList& cmds, const SymbolTable& syms,
                            int indent = 0);
std::string render_command(const Command& c, const SymbolTable& syms);

// Rendering of values as they appear inside Push(...): integers, true/false,
// quoted strings, and null labels as null_<TypeName>. `nullNames[i]` is the
// rendered name for label id i (null labels only).
std::string render_push_value(const Value& v, const std::vector<std::string>& nullNames);

}  // namespace audala
