#include "audala/lower.hpp"

namespace audala {

namespace {

struct Lowerer {
    const ValidatedProgram& vp;

    void expr(const Expr& e, CmdList& out) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LitExpr>) {
                    if (std::holds_alternative<int64_t>(node.value))
                        out.push_back(cmd_push(std::get<int64_t>(node.value)));
                    else if (std::holds_alternative<bool>(node.value))
                        out.push_back(cmd_push(std::get<bool>(node.value)));
                    else
                        out.push_back(cmd_push(std::get<std::string>(node.value)));
                } else if constexpr (std::is_same_v<T, NullExpr>) {
                    out.push_back(cmd_push(default_val(vp, e.type)));
                } else if constexpr (std::is_same_v<T, ThisExpr>) {
                    out.push_back(cmd_push_this());
                } else if constexpr (std::is_same_v<T, ChainExpr>) {
                    chainRead(node.segs, node.segs.size(), out);
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    expr(*node.operand, out);
                    out.push_back(cmd_not());
                } else if constexpr (std::is_same_v<T, BinExpr>) {
                    expr(*node.lhs, out);
                    expr(*node.rhs, out);
                    out.push_back(cmd_op(node.op));
                } else if constexpr (std::is_same_v<T, ConsExpr>) {
                    for (const ExprPtr& a : node.args) expr(*a, out);
                    Command c;
                    c.kind = CmdKind::Cons;
                    c.structIdx = node.structIdx;
                    c.typeName = vp.syms->name(node.typeSym);
                    out.push_back(std::move(c));
                } else if constexpr (std::is_same_v<T, ArrayNewExpr>) {
                    expr(*node.size, out);
                    Command c;
                    c.kind = CmdKind::Arr;
                    const SynType& elem = *e.type.elem;
                    c.arrDefault = default_val(vp, elem);
                    c.typeName = elem.render(*vp.syms);
                    out.push_back(std::move(c));
                }
            },
            e.node);
    }

    // Emits the read of the first `count` segments of a chain:
    // Push(this) then one Rd / RdA / Asize per segment.
    void chainRead(const std::vector<ChainSeg>& segs, size_t count, CmdList& out) {
        out.push_back(cmd_push_this());
        for (size_t i = 0; i < count; ++i) {
            const ChainSeg& seg = segs[i];
            switch (seg.kind) {
                case ChainSeg::Kind::Field: out.push_back(cmd_rd(seg.sym)); break;
                case ChainSeg::Kind::Index: {
                    expr(*seg.index, out);
                    Command c;
                    c.kind = CmdKind::RdA;
                    out.push_back(std::move(c));
                    break;
                }
                case ChainSeg::Kind::Size: {
                    Command c;
                    c.kind = CmdKind::Asize;
                    out.push_back(std::move(c));
                    break;
                }
            }
        }
    }

    void stmt(const Stmt& s, CmdList& out) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IfStmt>) {
                    expr(*node.cond, out);
                    auto body = std::make_shared<CmdList>();
                    stmts(node.thenBody, *body);
                    out.push_back(cmd_if(std::move(body)));
                } else if constexpr (std::is_same_v<T, DeclStmt>) {
                    // T x := E lowers like x := E on the executing instance
                    expr(*node.init, out);
                    out.push_back(cmd_push_this());
                    out.push_back(cmd_wr(node.name));
                } else if constexpr (std::is_same_v<T, UpdateStmt>) {
                    const auto& segs = node.target.segs;
                    const ChainSeg& last = segs.back();
                    expr(*node.value, out);
                    chainRead(segs, segs.size() - 1, out);
                    if (last.kind == ChainSeg::Kind::Field) {
                        out.push_back(cmd_wr(last.sym));
                    } else {
                        expr(*last.index, out);
                        Command c;
                        c.kind = CmdKind::WrA;
                        out.push_back(std::move(c));
                    }
                } else if constexpr (std::is_same_v<T, ConsStmt>) {
                    for (const ExprPtr& a : node.args) expr(*a, out);
                    Command c;
                    c.kind = CmdKind::Cons;
                    c.structIdx = node.structIdx;
                    c.typeName = vp.syms->name(node.typeSym);
                    out.push_back(std::move(c));
                }
            },
            s.node);
    }

    void stmts(const StmtList& list, CmdList& out) {
        for (const Stmt& s : list) stmt(s, out);
    }
};

}  // namespace

CmdList lower_statements(const ValidatedProgram& vp, const StmtList& stmts) {
    CmdList out;
    Lowerer{vp}.stmts(stmts, out);
    return out;
}

CmdList lower_expr(const ValidatedProgram& vp, const Expr& e) {
    CmdList out;
    Lowerer{vp}.expr(e, out);
    return out;
}

void compile_steps(ValidatedProgram& vp) {
    vp.stepBlocks.assign(vp.structs.size(), {});
    for (size_t si = 0; si < vp.structs.size(); ++si) {
        const StructDef& sd = vp.ast.structs[si];
        for (const StepDef& step : sd.steps) {
            vp.stepBlocks[si][step.name] =
                std::make_shared<const CmdList>(lower_statements(vp, step.body));
        }
    }
}

}  // namespace audala
