#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "audala/diagnostics.hpp"
#include "audala/symbols.hpp"
#include "audala/types.hpp"

namespace audala {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinOp : uint8_t { Eq, Ne, Lt, Le, Gt, Ge, And, Or, Add, Sub, Mul, Div, Mod };

const char* binop_text(BinOp op);

// One segment of a variable chain: `.field`, `[index]`, or the array size
// query `.s` (the checker rewrites a trailing field `s` on an array-typed
// prefix into a Size segment).
struct ChainSeg {
    enum class Kind : uint8_t { Field, Index, Size };
    Kind kind = Kind::Field;
    Sym sym = 0;     // Field
    ExprPtr index;   // Index
    SourceLoc loc;
};

struct LitExpr {
    std::variant<int64_t, bool, std::string> value;
};
struct NullExpr {};
struct ThisExpr {};
struct ChainExpr {
    std::vector<ChainSeg> segs;  // segs[0] is always a Field (the root name)
};
struct NotExpr {
    ExprPtr operand;
};
struct BinExpr {
    BinOp op;
    ExprPtr lhs, rhs;
};
struct ConsExpr {
    Sym typeSym = 0;
    int structIdx = -1;  // resolved by the checker
    std::vector<ExprPtr> args;
};
struct ArrayNewExpr {
    ExprPtr size;  // element type lands in Expr::type as Array(T)
};

struct Expr {
    SourceLoc loc;
    SynType type;  // filled in by the well-formedness checker
    std::variant<LitExpr, NullExpr, ThisExpr, ChainExpr, NotExpr, BinExpr, ConsExpr,
                 ArrayNewExpr>
        node;
};

struct Stmt;
using StmtList = std::vector<Stmt>;

struct IfStmt {
    ExprPtr cond;
    StmtList thenBody;
    StmtList elseBody;  // empty after desugaring
    bool hasElse = false;
};
struct DeclStmt {
    SynType declType;
    Sym name = 0;
    ExprPtr init;
};
struct UpdateStmt {
    ChainExpr target;
    SourceLoc targetLoc;
    ExprPtr value;
};
struct ConsStmt {
    Sym typeSym = 0;
    int structIdx = -1;
    std::vector<ExprPtr> args;
};

struct Stmt {
    SourceLoc loc;
    std::variant<IfStmt, DeclStmt, UpdateStmt, ConsStmt> node;
};

struct ParamDef {
    Sym name = 0;
    SynType type;
    SourceLoc loc;
};
struct StepDef {
    Sym name = 0;
    StmtList body;
    SourceLoc loc;
};
struct StructDef {
    Sym name = 0;
    std::vector<ParamDef> params;
    std::vector<StepDef> steps;
    SourceLoc loc;
};

struct ScheduleItem;
struct Schedule {
    std::vector<ScheduleItem> items;  // barrier-separated, in order
};

struct ScheduleItem {
    enum class Kind : uint8_t { GlobalCall, LocalCall, Fix, FixOn, Iter };
    Kind kind = Kind::GlobalCall;
    Sym stepSym = 0;    // GlobalCall / LocalCall
    Sym structSym = 0;  // LocalCall
    Schedule body;      // Fix / FixOn
    std::vector<Sym> fixParams;   // FixOn
    std::vector<Sym> iterSteps;   // Iter
    SourceLoc loc;
};

struct Program {
    std::vector<StructDef> structs;
    Schedule schedule;
    std::shared_ptr<SymbolTable> syms;
};

// Deep structural equality, ignoring source locations and checker
// annotations. Used by the parse/pretty-print round-trip tests.
bool equal(const Expr& a, const Expr& b);
bool equal(const Stmt& a, const Stmt& b);
bool equal(const StmtList& a, const StmtList& b);
bool equal(const Schedule& a, const Schedule& b);
bool equal(const Program& a, const Program& b);

// Pretty-printer; parse(pretty(parse(src))) is a fixpoint on ASTs.
std::string pretty(const Program& p);
std::string pretty(const Schedule& s, const SymbolTable& syms);

}  // namespace audala
