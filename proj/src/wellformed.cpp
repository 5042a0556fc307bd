#include "audala/wellformed.hpp"

#include <set>
#include <utility>

#include "audala/desugar.hpp"
#include "audala/lower.hpp"
#include "audala/parser.hpp"

namespace audala {

CmdBlock ValidatedProgram::stepBlock(int structIdx, Sym step) const {
    const auto& map = stepBlocks[structIdx];
    auto it = map.find(step);
    if (it != map.end()) return it->second;
    static const CmdBlock kEmpty = std::make_shared<const CmdList>();
    return kEmpty;
}

const CmdList& ValidatedProgram::stepCommands(int structIdx, Sym step) const {
    return *stepBlock(structIdx, step);
}

std::vector<std::string> ValidatedProgram::nullLabelNames() const {
    std::vector<std::string> names;
    names.reserve(structs.size() + 1);
    for (const StructInfo& si : structs) names.push_back("null_" + syms->name(si.name));
    names.push_back("null_array");
    return names;
}

Value default_val(const ValidatedProgram& vp, const SynType& t) {
    switch (t.kind) {
        case SynType::Kind::Nat:
        case SynType::Kind::Int: return int64_t{0};
        case SynType::Kind::Bool: return false;
        case SynType::Kind::String: return std::string{};
        case SynType::Kind::Struct:
            return Label{static_cast<uint32_t>(t.structIdx)};
        case SynType::Kind::Array: return Label{vp.nullArrayLabelId()};
        case SynType::Kind::Invalid: break;
    }
    return int64_t{0};
}

namespace {

class Checker {
public:
    Checker(ValidatedProgram& vp, Extensions enabled, std::vector<Diagnostic>& errs)
        : vp_(vp), enabled_(enabled), errs_(errs), syms_(*vp.syms) {}

    void run() {
        collectStructs();
        if (!errs_.empty()) return;
        for (size_t i = 0; i < vp_.ast.structs.size(); ++i) checkStruct(static_cast<int>(i));
        checkSchedule(vp_.ast.schedule, /*insideIter=*/false);
        enforceExtensionFlags();
        if (errs_.empty()) buildParamKeys();
    }

private:
    ValidatedProgram& vp_;
    Extensions enabled_;
    std::vector<Diagnostic>& errs_;
    SymbolTable& syms_;
    int currentStruct_ = -1;
    std::vector<std::vector<std::pair<Sym, SynType>>> scopes_;
    std::set<Sym> declaredLaterInStep_;

    void error(SourceLoc loc, std::string msg, int rule = 0) {
        errs_.push_back({loc, rule, std::move(msg)});
    }

    // ---- tables ---------------------------------------------------------

    void collectStructs() {
        for (size_t i = 0; i < vp_.ast.structs.size(); ++i) {
            const StructDef& sd = vp_.ast.structs[i];
            if (vp_.structIndexByName.count(sd.name)) {
                error(sd.loc, "struct '" + syms_.name(sd.name) + "' declared twice");
                continue;
            }
            vp_.structIndexByName[sd.name] = static_cast<int>(i);
        }
        for (StructDef& sd : vp_.ast.structs) {
            StructInfo info;
            info.name = sd.name;
            for (ParamDef& pd : sd.params) {
                if (info.paramIndex(pd.name) >= 0)
                    error(pd.loc,
                          "parameter '" + syms_.name(pd.name) + "' used more than once in struct '" +
                              syms_.name(sd.name) + "'",
                          3);
                resolveType(pd.type, pd.loc);
                info.params.push_back({pd.name, pd.type});
            }
            for (size_t s = 0; s < sd.steps.size(); ++s) {
                if (info.stepIndex.count(sd.steps[s].name))
                    error(sd.steps[s].loc,
                          "step '" + syms_.name(sd.steps[s].name) +
                              "' declared more than once in struct '" +
                              syms_.name(sd.name) + "'",
                          2);
                else
                    info.stepIndex[sd.steps[s].name] = static_cast<int>(s);
            }
            vp_.structs.push_back(std::move(info));
        }
    }

    void buildParamKeys() {
        vp_.paramKeyOf.resize(vp_.structs.size());
        for (size_t si = 0; si < vp_.structs.size(); ++si) {
            auto& row = vp_.paramKeyOf[si];
            for (size_t pi = 0; pi < vp_.structs[si].params.size(); ++pi) {
                int key = static_cast<int>(vp_.paramKeys.size());
                vp_.paramKeys.emplace_back(static_cast<int>(si), static_cast<int>(pi));
                row.push_back(key);
                vp_.keysByName[vp_.structs[si].params[pi].name].push_back(key);
            }
        }
    }

    // ---- types ----------------------------------------------------------

    void resolveType(SynType& t, SourceLoc loc) {
        if (t.kind == SynType::Kind::Struct) {
            int idx = vp_.structIndex(t.nameSym);
            if (idx < 0)
                error(loc, "unknown type '" + syms_.name(t.nameSym) + "'");
            t.structIdx = idx;
        } else if (t.kind == SynType::Kind::Array) {
            vp_.required.arrays = true;
            if (t.elem) resolveType(*t.elem, loc);
        }
    }

    // ---- schedule ---------------------------------------------------------

    bool someStructDefines(Sym step) const {
        for (const StructInfo& si : vp_.structs)
            if (si.stepIndex.count(step)) return true;
        return false;
    }

    void checkSchedule(Schedule& s, bool insideIter) {
        for (ScheduleItem& item : s.items) {
            switch (item.kind) {
                case ScheduleItem::Kind::GlobalCall:
                    if (!someStructDefines(item.stepSym))
                        error(item.loc, "no struct defines step '" +
                                            syms_.name(item.stepSym) + "'");
                    break;
                case ScheduleItem::Kind::LocalCall: {
                    int idx = vp_.structIndex(item.structSym);
                    if (idx < 0) {
                        error(item.loc,
                              "unknown struct '" + syms_.name(item.structSym) + "'");
                    } else if (!vp_.structs[idx].stepIndex.count(item.stepSym)) {
                        error(item.loc, "struct '" + syms_.name(item.structSym) +
                                            "' does not define step '" +
                                            syms_.name(item.stepSym) + "'");
                    }
                    break;
                }
                case ScheduleItem::Kind::Fix:
                case ScheduleItem::Kind::FixOn:
                    if (insideIter)
                        error(item.loc, "fixpoints cannot appear inside an iterator");
                    if (item.kind == ScheduleItem::Kind::FixOn) {
                        vp_.required.paramFix = true;
                        for (Sym p : item.fixParams) {
                            bool isParam = false;
                            for (const StructInfo& si : vp_.structs)
                                if (si.paramIndex(p) >= 0) isParam = true;
                            if (!isParam)
                                error(item.loc, "'" + syms_.name(p) +
                                                    "' is not a parameter of any struct");
                        }
                    }
                    checkSchedule(item.body, insideIter);
                    break;
                case ScheduleItem::Kind::Iter:
                    vp_.required.iter = true;
                    if (insideIter)
                        error(item.loc, "iterators cannot be nested");
                    for (Sym step : item.iterSteps)
                        if (!someStructDefines(step))
                            error(item.loc, "no struct defines step '" +
                                                syms_.name(step) + "'");
                    break;
            }
        }
    }

    void enforceExtensionFlags() {
        if (vp_.required.paramFix && !enabled_.paramFix)
            error({}, "program uses parameter-specific fixpoints; enable with "
                      "--ext param-fix");
        if (vp_.required.iter && !enabled_.iter)
            error({}, "program uses iterators; enable with --ext iter");
        if (vp_.required.arrays && !enabled_.arrays)
            error({}, "program uses arrays; enable with --ext arrays");
    }

    // ---- steps -------------------------------------------------------------

    void checkStruct(int structIdx) {
        currentStruct_ = structIdx;
        StructDef& sd = vp_.ast.structs[structIdx];
        for (StepDef& step : sd.steps) {
            declaredLaterInStep_.clear();
            collectDecls(step.body);
            scopes_.clear();
            scopes_.emplace_back();
            checkStmts(step.body);
            scopes_.clear();
        }
    }

    void collectDecls(const StmtList& list) {
        for (const Stmt& s : list) {
            if (const auto* d = std::get_if<DeclStmt>(&s.node))
                declaredLaterInStep_.insert(d->name);
            else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
                collectDecls(i->thenBody);
                collectDecls(i->elseBody);
            }
        }
    }

    const SynType* lookupLocal(Sym name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            for (const auto& [n, t] : *it)
                if (n == name) return &t;
        return nullptr;
    }

    void checkStmts(StmtList& list) {
        for (Stmt& s : list) checkStmt(s);
    }

    void checkStmt(Stmt& s) {
        std::visit(
            [&](auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IfStmt>) {
                    SynType ct = checkExpr(*node.cond, SynType::boolean());
                    if (ct.valid() && ct.kind != SynType::Kind::Bool)
                        error(s.loc, "if condition must be a Bool, found " +
                                         ct.render(syms_));
                    scopes_.emplace_back();
                    checkStmts(node.thenBody);
                    scopes_.pop_back();
                    // desugar removed all else branches
                } else if constexpr (std::is_same_v<T, DeclStmt>) {
                    resolveType(node.declType, s.loc);
                    const StructInfo& si = vp_.structs[currentStruct_];
                    if (si.paramIndex(node.name) >= 0)
                        error(s.loc,
                              "local variable '" + syms_.name(node.name) +
                                  "' overlaps a parameter of struct '" +
                                  syms_.name(si.name) + "'",
                              4);
                    if (lookupLocal(node.name))
                        error(s.loc,
                              "variable '" + syms_.name(node.name) +
                                  "' is already declared; assignments may only "
                                  "declare new local variables",
                              5);
                    if (node.init) checkExpr(*node.init, node.declType);
                    scopes_.back().emplace_back(node.name, node.declType);
                } else if constexpr (std::is_same_v<T, UpdateStmt>) {
                    SynType target = checkChain(node.target, s.loc, /*forWrite=*/true);
                    if (node.value) {
                        SynType vt = checkExpr(*node.value, target);
                        if (target.valid() && vt.valid() && !vt.assignableTo(target))
                            error(s.loc, "cannot assign " + vt.render(syms_) +
                                             " to target of type " +
                                             target.render(syms_));
                    }
                } else if constexpr (std::is_same_v<T, ConsStmt>) {
                    checkConstructor(node.typeSym, node.structIdx, node.args, s.loc);
                }
            },
            s.node);
    }

    void checkConstructor(Sym typeSym, int& structIdxOut, std::vector<ExprPtr>& args,
                          SourceLoc loc) {
        int idx = vp_.structIndex(typeSym);
        if (idx < 0) {
            error(loc, "unknown struct '" + syms_.name(typeSym) + "'");
            return;
        }
        structIdxOut = idx;
        const StructInfo& si = vp_.structs[idx];
        if (args.size() != si.params.size()) {
            error(loc, "constructor " + syms_.name(typeSym) + " expects " +
                           std::to_string(si.params.size()) + " arguments, got " +
                           std::to_string(args.size()));
            return;
        }
        for (size_t i = 0; i < args.size(); ++i) {
            SynType at = checkExpr(*args[i], si.params[i].type);
            if (at.valid() && !at.assignableTo(si.params[i].type))
                error(args[i]->loc,
                      "argument " + std::to_string(i + 1) + " of " +
                          syms_.name(typeSym) + " has type " + at.render(syms_) +
                          ", expected " + si.params[i].type.render(syms_));
        }
    }

    // Checks a chain and classifies its segments; rewrites a trailing `.s`
    // on an array-typed prefix into a Size segment.
    SynType checkChain(ChainExpr& chain, SourceLoc loc, bool forWrite) {
        (void)loc;
        if (chain.segs.empty()) return SynType::invalid();
        ChainSeg& root = chain.segs[0];
        SynType cur;
        if (const SynType* lt = lookupLocal(root.sym)) {
            cur = *lt;
        } else {
            const StructInfo& si = vp_.structs[currentStruct_];
            int pi = si.paramIndex(root.sym);
            if (pi >= 0) {
                cur = si.params[pi].type;
            } else if (declaredLaterInStep_.count(root.sym)) {
                error(root.loc,
                      "local variable '" + syms_.name(root.sym) +
                          "' used before its declaration",
                      6);
                return SynType::invalid();
            } else {
                error(root.loc, "undefined variable '" + syms_.name(root.sym) + "'");
                return SynType::invalid();
            }
        }
        for (size_t i = 1; i < chain.segs.size(); ++i) {
            ChainSeg& seg = chain.segs[i];
            if (!cur.valid()) return SynType::invalid();
            if (seg.kind == ChainSeg::Kind::Field) {
                if (cur.isArray()) {
                    if (syms_.name(seg.sym) == "s") {
                        seg.kind = ChainSeg::Kind::Size;
                        if (forWrite && i + 1 == chain.segs.size()) {
                            error(seg.loc, "cannot assign to the size of an array");
                            return SynType::invalid();
                        }
                        cur = SynType::nat();
                        continue;
                    }
                    error(seg.loc, "arrays have no field '" + syms_.name(seg.sym) +
                                       "' (only .s and indexing)");
                    return SynType::invalid();
                }
                if (!cur.isStruct() || cur.structIdx < 0) {
                    error(seg.loc, "cannot access '." + syms_.name(seg.sym) +
                                       "' on a value of type " + cur.render(syms_));
                    return SynType::invalid();
                }
                const StructInfo& si = vp_.structs[cur.structIdx];
                int pi = si.paramIndex(seg.sym);
                if (pi < 0) {
                    error(seg.loc, "struct '" + syms_.name(si.name) +
                                       "' has no parameter '" + syms_.name(seg.sym) +
                                       "'");
                    return SynType::invalid();
                }
                cur = si.params[pi].type;
            } else if (seg.kind == ChainSeg::Kind::Index) {
                vp_.required.arrays = true;
                if (!cur.isArray() || !cur.elem) {
                    error(seg.loc, "indexing requires an array, found " +
                                       cur.render(syms_));
                    return SynType::invalid();
                }
                SynType it = checkExpr(*seg.index, SynType::nat());
                if (it.valid() && it.kind != SynType::Kind::Nat)
                    error(seg.index->loc,
                          "array index must be a Nat, found " + it.render(syms_));
                cur = *cur.elem;
            }
        }
        return cur;
    }

    SynType checkExpr(Expr& e, std::optional<SynType> expected = std::nullopt) {
        SynType t = inferExpr(e, expected);
        e.type = t;
        return t;
    }

    SynType inferExpr(Expr& e, const std::optional<SynType>& expected) {
        return std::visit(
            [&](auto& node) -> SynType {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LitExpr>) {
                    if (std::holds_alternative<int64_t>(node.value)) {
                        int64_t v = std::get<int64_t>(node.value);
                        if (expected && expected->isIntegral()) {
                            if (expected->kind == SynType::Kind::Nat && v < 0)
                                error(e.loc, "negative literal where Nat is expected");
                            return *expected;
                        }
                        return v >= 0 ? SynType::nat() : SynType::int_();
                    }
                    if (std::holds_alternative<bool>(node.value))
                        return SynType::boolean();
                    return SynType::string();
                } else if constexpr (std::is_same_v<T, NullExpr>) {
                    if (!expected || !expected->valid()) {
                        error(e.loc, "cannot infer the type of null here");
                        return SynType::invalid();
                    }
                    return *expected;
                } else if constexpr (std::is_same_v<T, ThisExpr>) {
                    SynType t = SynType::structRef(vp_.structs[currentStruct_].name);
                    t.structIdx = currentStruct_;
                    return t;
                } else if constexpr (std::is_same_v<T, ChainExpr>) {
                    return checkChain(node, e.loc, /*forWrite=*/false);
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    SynType ot = checkExpr(*node.operand, SynType::boolean());
                    if (ot.valid() && ot.kind != SynType::Kind::Bool)
                        error(e.loc, "'!' requires a Bool operand");
                    return SynType::boolean();
                } else if constexpr (std::is_same_v<T, BinExpr>) {
                    return checkBin(e.loc, node);
                } else if constexpr (std::is_same_v<T, ConsExpr>) {
                    checkConstructor(node.typeSym, node.structIdx, node.args, e.loc);
                    if (node.structIdx < 0) return SynType::invalid();
                    SynType t = SynType::structRef(node.typeSym);
                    t.structIdx = node.structIdx;
                    return t;
                } else if constexpr (std::is_same_v<T, ArrayNewExpr>) {
                    vp_.required.arrays = true;
                    checkExpr(*node.size, SynType::nat());
                    if (!expected || !expected->isArray()) {
                        error(e.loc,
                              "cannot infer the element type of array(...) here");
                        return SynType::invalid();
                    }
                    return *expected;
                }
            },
            e.node);
    }

    SynType checkBin(SourceLoc loc, BinExpr& b) {
        switch (b.op) {
            case BinOp::And:
            case BinOp::Or: {
                SynType lt = checkExpr(*b.lhs, SynType::boolean());
                SynType rt = checkExpr(*b.rhs, SynType::boolean());
                if ((lt.valid() && lt.kind != SynType::Kind::Bool) ||
                    (rt.valid() && rt.kind != SynType::Kind::Bool))
                    error(loc, std::string("'") + binop_text(b.op) +
                                   "' requires Bool operands");
                return SynType::boolean();
            }
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
            case BinOp::Div:
            case BinOp::Mod: {
                SynType lt = checkExpr(*b.lhs);
                SynType rt = checkExpr(*b.rhs);
                if ((lt.valid() && !lt.isIntegral()) || (rt.valid() && !rt.isIntegral())) {
                    error(loc, std::string("'") + binop_text(b.op) +
                                   "' requires integer operands");
                    return SynType::int_();
                }
                if (lt.kind == SynType::Kind::Nat && rt.kind == SynType::Kind::Nat)
                    return SynType::nat();
                return SynType::int_();
            }
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: {
                SynType lt = checkExpr(*b.lhs);
                SynType rt = checkExpr(*b.rhs);
                if ((lt.valid() && !lt.isIntegral()) || (rt.valid() && !rt.isIntegral()))
                    error(loc, std::string("'") + binop_text(b.op) +
                                   "' requires integer operands");
                return SynType::boolean();
            }
            case BinOp::Eq:
            case BinOp::Ne: {
                // Handle `null` on either side by checking the other side first.
                SynType lt, rt;
                if (std::holds_alternative<NullExpr>(b.lhs->node) &&
                    !std::holds_alternative<NullExpr>(b.rhs->node)) {
                    rt = checkExpr(*b.rhs);
                    lt = checkExpr(*b.lhs, rt);
                } else {
                    lt = checkExpr(*b.lhs);
                    rt = checkExpr(*b.rhs, lt.valid() ? std::optional<SynType>(lt)
                                                      : std::nullopt);
                }
                if (lt.valid() && rt.valid() && !lt.assignableTo(rt) &&
                    !rt.assignableTo(lt))
                    error(loc, "cannot compare " + lt.render(syms_) + " with " +
                                   rt.render(syms_));
                return SynType::boolean();
            }
        }
        return SynType::invalid();
    }
};

}  // namespace

ValidateResult check_well_formed(Program desugared, Extensions enabled) {
    ValidateResult res;
    auto vp = std::make_shared<ValidatedProgram>();
    vp->ast = std::move(desugared);
    vp->syms = vp->ast.syms;
    Checker checker(*vp, enabled, res.errors);
    checker.run();
    if (!res.errors.empty()) return res;
    compile_steps(*vp);
    res.program = std::move(vp);
    return res;
}

ValidateResult frontend(std::string_view source, Extensions enabled) {
    ParseResult pr = parse_program(source);
    if (!pr.program) {
        ValidateResult res;
        res.errors = std::move(pr.errors);
        return res;
    }
    return check_well_formed(desugar(std::move(*pr.program)), enabled);
}

}  // namespace audala
