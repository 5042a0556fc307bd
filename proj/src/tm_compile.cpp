#include "audala/tm_compile.hpp"

namespace audala {

namespace {

struct Builder {
    std::shared_ptr<SymbolTable> syms = std::make_shared<SymbolTable>();
    Sym tapeCell, control, left, right, symbol, head, state, accepting, cellPrefix;

    Builder() {
        tapeCell = syms->intern("TapeCell");
        control = syms->intern("Control");
        left = syms->intern("left");
        right = syms->intern("right");
        symbol = syms->intern("symbol");
        head = syms->intern("head");
        state = syms->intern("state");
        accepting = syms->intern("accepting");
        cellPrefix = 0;
    }

    ExprPtr mk(auto node) {
        auto e = std::make_unique<Expr>();
        e->node = std::move(node);
        return e;
    }

    ExprPtr intLit(int64_t v) { return mk(LitExpr{v}); }
    ExprPtr boolLit(bool v) { return mk(LitExpr{v}); }
    ExprPtr null() { return mk(NullExpr{}); }

    ExprPtr chain(std::initializer_list<Sym> names) {
        ChainExpr c;
        for (Sym n : names) {
            ChainSeg seg;
            seg.kind = ChainSeg::Kind::Field;
            seg.sym = n;
            c.segs.push_back(std::move(seg));
        }
        return mk(std::move(c));
    }

    ChainExpr chainTarget(std::initializer_list<Sym> names) {
        ChainExpr c;
        for (Sym n : names) {
            ChainSeg seg;
            seg.kind = ChainSeg::Kind::Field;
            seg.sym = n;
            c.segs.push_back(std::move(seg));
        }
        return c;
    }

    ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r) {
        return mk(BinExpr{op, std::move(l), std::move(r)});
    }

    Stmt update(ChainExpr target, ExprPtr value) {
        UpdateStmt us;
        us.target = std::move(target);
        us.value = std::move(value);
        return Stmt{{}, std::move(us)};
    }

    Stmt decl(SynType type, Sym name, ExprPtr init) {
        DeclStmt ds;
        ds.declType = std::move(type);
        ds.name = name;
        ds.init = std::move(init);
        return Stmt{{}, std::move(ds)};
    }

    // One clause body for delta(q, s) = (q', s', D), per the paper's scheme:
    // update symbol/state/accepting, create the next cell when moving past
    // the linked extent, then move the head.
    StmtList clauseBody(const TuringMachine& tm, const TMTransition& tr) {
        Sym dir = tr.moveRight ? right : left;
        StmtList body;
        body.push_back(update(chainTarget({head, symbol}), intLit(tr.writeSymbol)));
        body.push_back(update(chainTarget({state}), intLit(tr.nextState)));
        body.push_back(
            update(chainTarget({accepting}), boolLit(tm.isAccepting(tr.nextState))));

        // if (head != null && head.<dir> == null) then { head.<dir> := TapeCell(...); }
        IfStmt grow;
        grow.cond = bin(BinOp::And, bin(BinOp::Ne, chain({head}), null()),
                        bin(BinOp::Eq, chain({head, dir}), null()));
        ConsExpr cons;
        cons.typeSym = tapeCell;
        if (tr.moveRight) {
            cons.args.push_back(chain({head}));
            cons.args.push_back(null());
        } else {
            cons.args.push_back(null());
            cons.args.push_back(chain({head}));
        }
        cons.args.push_back(intLit(0));
        grow.thenBody.push_back(
            update(chainTarget({head, dir}), mk(std::move(cons))));
        body.push_back(Stmt{{}, std::move(grow)});

        body.push_back(update(chainTarget({head}), chain({head, dir})));
        return body;
    }

    Program build(const TuringMachine& tm, const std::vector<int64_t>& input) {
        if (input.empty()) throw CompileError{"input string must not be empty"};
        for (int64_t s : input) {
            if (s == 0)
                throw CompileError{"input may not contain the blank symbol 0"};
            if (!tm.sigma.empty() && !tm.sigma.count(s))
                throw CompileError{"input symbol " + std::to_string(s) +
                                   " is not in the machine's alphabet"};
        }

        Program p;
        p.syms = syms;

        StructDef tape;
        tape.name = tapeCell;
        tape.params.push_back({left, SynType::structRef(tapeCell), {}});
        tape.params.push_back({right, SynType::structRef(tapeCell), {}});
        tape.params.push_back({symbol, SynType::int_(), {}});
        p.structs.push_back(std::move(tape));

        StructDef ctl;
        ctl.name = control;
        ctl.params.push_back({head, SynType::structRef(tapeCell), {}});
        ctl.params.push_back({state, SynType::int_(), {}});
        ctl.params.push_back({accepting, SynType::boolean(), {}});

        // transition: one clause per defined delta entry, chained with else-if
        StepDef transition;
        transition.name = syms->intern("transition");
        Stmt* tail = nullptr;
        for (const auto& [key, tr] : tm.delta) {
            IfStmt clause;
            clause.cond =
                bin(BinOp::And, bin(BinOp::Eq, chain({state}), intLit(key.first)),
                    bin(BinOp::Eq, chain({head, symbol}), intLit(key.second)));
            clause.thenBody = clauseBody(tm, tr);
            Stmt stmt{{}, std::move(clause)};
            if (!tail) {
                transition.body.push_back(std::move(stmt));
                tail = &transition.body.back();
            } else {
                IfStmt& prev = std::get<IfStmt>(tail->node);
                prev.hasElse = true;
                prev.elseBody.push_back(std::move(stmt));
                tail = &prev.elseBody.back();
            }
        }
        ctl.steps.push_back(std::move(transition));

        // init: one cell per input symbol, linked left-to-right, then the
        // single Control instance
        StepDef init;
        init.name = syms->intern("init");
        std::vector<Sym> cells;
        for (size_t i = 0; i < input.size(); ++i)
            cells.push_back(syms->intern("cell" + std::to_string(i)));
        for (size_t i = 0; i < input.size(); ++i) {
            ConsExpr cons;
            cons.typeSym = tapeCell;
            cons.args.push_back(null());
            cons.args.push_back(null());
            cons.args.push_back(intLit(input[i]));
            init.body.push_back(
                decl(SynType::structRef(tapeCell), cells[i], mk(std::move(cons))));
        }
        for (size_t i = 1; i < input.size(); ++i) {
            init.body.push_back(update(chainTarget({cells[i], left}), chain({cells[i - 1]})));
            init.body.push_back(update(chainTarget({cells[i - 1], right}), chain({cells[i]})));
        }
        ConsStmt mkControl;
        mkControl.typeSym = control;
        mkControl.args.push_back(chain({cells[0]}));
        mkControl.args.push_back(intLit(0));
        mkControl.args.push_back(boolLit(tm.isAccepting(0)));
        init.body.push_back(Stmt{{}, std::move(mkControl)});
        ctl.steps.push_back(std::move(init));

        p.structs.push_back(std::move(ctl));

        ScheduleItem initCall;
        initCall.kind = ScheduleItem::Kind::GlobalCall;
        initCall.stepSym = init.name;
        ScheduleItem fix;
        fix.kind = ScheduleItem::Kind::Fix;
        ScheduleItem transCall;
        transCall.kind = ScheduleItem::Kind::GlobalCall;
        transCall.stepSym = transition.name;
        fix.body.items.push_back(std::move(transCall));
        p.schedule.items.push_back(std::move(initCall));
        p.schedule.items.push_back(std::move(fix));
        return p;
    }
};

}  // namespace

Program compile_tm(const TuringMachine& tm, const std::vector<int64_t>& input) {
    Builder b;
    return b.build(tm, input);
}

std::string compile_tm_source(const TuringMachine& tm,
                              const std::vector<int64_t>& input) {
    return pretty(compile_tm(tm, input));
}

}  // namespace audala
