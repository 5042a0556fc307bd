#include "audala/desugar.hpp"

#include <utility>

namespace audala {

namespace {

struct Desugarer {
    SymbolTable& syms;
    int counter = 0;

    ExprPtr mk(SourceLoc loc, auto node) {
        auto e = std::make_unique<Expr>();
        e->loc = loc;
        e->node = std::move(node);
        return e;
    }

    ExprPtr readGuard(Sym guard, SourceLoc loc) {
        ChainExpr c;
        ChainSeg seg;
        seg.kind = ChainSeg::Kind::Field;
        seg.sym = guard;
        seg.loc = loc;
        c.segs.push_back(std::move(seg));
        return mk(loc, std::move(c));
    }

    Stmt setGuardTrue(Sym guard, SourceLoc loc) {
        UpdateStmt us;
        us.targetLoc = loc;
        ChainSeg seg;
        seg.kind = ChainSeg::Kind::Field;
        seg.sym = guard;
        seg.loc = loc;
        us.target.segs.push_back(std::move(seg));
        us.value = mk(loc, LitExpr{true});
        return Stmt{loc, std::move(us)};
    }

    StmtList rewrite(StmtList list) {
        StmtList out;
        for (Stmt& s : list) {
            if (auto* ifs = std::get_if<IfStmt>(&s.node)) {
                if (!ifs->hasElse) {
                    ifs->thenBody = rewrite(std::move(ifs->thenBody));
                    out.push_back(std::move(s));
                    continue;
                }
                rewriteChain(std::move(s), out);
                continue;
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    void rewriteChain(Stmt chainStmt, StmtList& out) {
        SourceLoc loc = chainStmt.loc;
        // Flatten the chain into (cond, body) clauses plus an optional final
        // else body.
        std::vector<std::pair<ExprPtr, StmtList>> clauses;
        StmtList finalElse;
        bool hasFinalElse = false;
        Stmt cur = std::move(chainStmt);
        for (;;) {
            IfStmt ifs = std::get<IfStmt>(std::move(cur.node));
            clauses.emplace_back(std::move(ifs.cond), rewrite(std::move(ifs.thenBody)));
            if (!ifs.hasElse) break;
            if (ifs.elseBody.size() == 1 &&
                std::holds_alternative<IfStmt>(ifs.elseBody[0].node)) {
                cur = std::move(ifs.elseBody[0]);
                continue;
            }
            finalElse = rewrite(std::move(ifs.elseBody));
            hasFinalElse = true;
            break;
        }

        Sym guard = syms.intern("$elif" + std::to_string(counter++));

        // Bool $g := c1;
        DeclStmt decl;
        decl.declType = SynType::boolean();
        decl.name = guard;
        decl.init = std::move(clauses[0].first);
        out.push_back(Stmt{loc, std::move(decl)});

        // if ($g) { A1 }
        {
            IfStmt first;
            first.cond = readGuard(guard, loc);
            first.thenBody = std::move(clauses[0].second);
            out.push_back(Stmt{loc, std::move(first)});
        }

        for (size_t i = 1; i < clauses.size(); ++i) {
            bool lastOverall = (i + 1 == clauses.size()) && !hasFinalElse;
            IfStmt guarded;
            NotExpr neg{readGuard(guard, loc)};
            BinExpr conj{BinOp::And, mk(loc, std::move(neg)),
                         std::move(clauses[i].first)};
            guarded.cond = mk(loc, std::move(conj));
            if (!lastOverall) guarded.thenBody.push_back(setGuardTrue(guard, loc));
            for (Stmt& b : clauses[i].second) guarded.thenBody.push_back(std::move(b));
            out.push_back(Stmt{loc, std::move(guarded)});
        }

        if (hasFinalElse) {
            IfStmt rest;
            rest.cond = mk(loc, NotExpr{readGuard(guard, loc)});
            rest.thenBody = std::move(finalElse);
            out.push_back(Stmt{loc, std::move(rest)});
        }
    }
};

}  // namespace

Program desugar(Program p) {
    Desugarer d{*p.syms};
    for (StructDef& sd : p.structs) {
        for (StepDef& st : sd.steps) {
            d.counter = 0;
            st.body = d.rewrite(std::move(st.body));
        }
    }
    return p;
}

}  // namespace audala
