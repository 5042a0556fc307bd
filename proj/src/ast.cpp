#include "audala/ast.hpp"

#include <sstream>

#include "json.hpp"

namespace audala {

const char* binop_text(BinOp op) {
    switch (op) {
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
    }
    return "?";
}

std::string render_diagnostics(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (const auto& d : diags) {
        if (d.loc.known()) os << d.loc.line << ":" << d.loc.column << ": ";
        os << "error: " << d.message;
        if (d.rule > 0) os << " [rule " << d.rule << "]";
        os << "\n";
    }
    return os.str();
}

std::string render_diagnostics_json(const std::vector<Diagnostic>& diags) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : diags) {
        nlohmann::json j;
        j["line"] = d.loc.line;
        j["column"] = d.loc.column;
        j["message"] = d.message;
        if (d.rule > 0) j["rule"] = d.rule;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

// ---- structural equality ---------------------------------------------------

namespace {

bool equalChain(const ChainExpr& a, const ChainExpr& b) {
    if (a.segs.size() != b.segs.size()) return false;
    for (size_t i = 0; i < a.segs.size(); ++i) {
        const ChainSeg& x = a.segs[i];
        const ChainSeg& y = b.segs[i];
        if (x.kind != y.kind) return false;
        if (x.kind == ChainSeg::Kind::Field && x.sym != y.sym) return false;
        if (x.kind == ChainSeg::Kind::Index && !equal(*x.index, *y.index)) return false;
    }
    return true;
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, LitExpr>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, NullExpr> ||
                                 std::is_same_v<T, ThisExpr>) {
                return true;
            } else if constexpr (std::is_same_v<T, ChainExpr>) {
                return equalChain(x, y);
            } else if constexpr (std::is_same_v<T, NotExpr>) {
                return equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, BinExpr>) {
                return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
            } else if constexpr (std::is_same_v<T, ConsExpr>) {
                if (x.typeSym != y.typeSym || x.args.size() != y.args.size())
                    return false;
                for (size_t i = 0; i < x.args.size(); ++i)
                    if (!equal(*x.args[i], *y.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, ArrayNewExpr>) {
                return equal(*x.size, *y.size);
            }
        },
        a.node);
}

bool equal(const StmtList& a, const StmtList& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!equal(a[i], b[i])) return false;
    return true;
}

bool equal(const Stmt& a, const Stmt& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const T& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, IfStmt>) {
                return equal(*x.cond, *y.cond) && equal(x.thenBody, y.thenBody) &&
                       x.hasElse == y.hasElse && equal(x.elseBody, y.elseBody);
            } else if constexpr (std::is_same_v<T, DeclStmt>) {
                return x.declType.sameAs(y.declType) && x.name == y.name &&
                       equal(*x.init, *y.init);
            } else if constexpr (std::is_same_v<T, UpdateStmt>) {
                return equalChain(x.target, y.target) && equal(*x.value, *y.value);
            } else if constexpr (std::is_same_v<T, ConsStmt>) {
                if (x.typeSym != y.typeSym || x.args.size() != y.args.size())
                    return false;
                for (size_t i = 0; i < x.args.size(); ++i)
                    if (!equal(*x.args[i], *y.args[i])) return false;
                return true;
            }
        },
        a.node);
}

bool equal(const Schedule& a, const Schedule& b) {
    if (a.items.size() != b.items.size()) return false;
    for (size_t i = 0; i < a.items.size(); ++i) {
        const ScheduleItem& x = a.items[i];
        const ScheduleItem& y = b.items[i];
        if (x.kind != y.kind || x.stepSym != y.stepSym || x.structSym != y.structSym)
            return false;
        if (!equal(x.body, y.body)) return false;
        if (x.fixParams != y.fixParams || x.iterSteps != y.iterSteps) return false;
    }
    return true;
}

bool equal(const Program& a, const Program& b) {
    // Symbol ids are only comparable within one table; compare by name.
    if (a.structs.size() != b.structs.size()) return false;
    auto sameName = [&](Sym x, Sym y) { return a.syms->name(x) == b.syms->name(y); };
    for (size_t i = 0; i < a.structs.size(); ++i) {
        if (!sameName(a.structs[i].name, b.structs[i].name)) return false;
    }
    // For full structural comparison require a shared symbol table; the
    // round-trip tests re-parse with a fresh table, so compare via rendering.
    return pretty(a) == pretty(b);
}

// ---- pretty printer ---------------------------------------------------------

namespace {

class Printer {
public:
    explicit Printer(const SymbolTable& syms) : syms_(syms) {}

    std::string run(const Program& p) {
        for (const auto& sd : p.structs) {
            os_ << "struct " << syms_.name(sd.name) << " (";
            for (size_t i = 0; i < sd.params.size(); ++i) {
                if (i) os_ << ", ";
                os_ << syms_.name(sd.params[i].name) << ": "
                    << sd.params[i].type.render(syms_);
            }
            os_ << ") {\n";
            for (const auto& st : sd.steps) {
                os_ << "    " << syms_.name(st.name) << " {\n";
                printStmts(st.body, 2);
                os_ << "    }\n";
            }
            os_ << "}\n\n";
        }
        printSchedule(p.schedule);
        os_ << "\n";
        return os_.str();
    }

    void printSchedule(const Schedule& s) {
        for (size_t i = 0; i < s.items.size(); ++i) {
            if (i) os_ << " < ";
            printItem(s.items[i]);
        }
    }

    std::string str() const { return os_.str(); }

private:
    const SymbolTable& syms_;
    std::ostringstream os_;

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) os_ << "    ";
    }

    void printItem(const ScheduleItem& it) {
        switch (it.kind) {
            case ScheduleItem::Kind::GlobalCall: os_ << syms_.name(it.stepSym); break;
            case ScheduleItem::Kind::LocalCall:
                os_ << syms_.name(it.structSym) << "." << syms_.name(it.stepSym);
                break;
            case ScheduleItem::Kind::Fix:
            case ScheduleItem::Kind::FixOn:
                os_ << "Fix(";
                printSchedule(it.body);
                for (Sym p : it.fixParams) os_ << ", " << syms_.name(p);
                os_ << ")";
                break;
            case ScheduleItem::Kind::Iter:
                os_ << "Iter(";
                for (size_t i = 0; i < it.iterSteps.size(); ++i) {
                    if (i) os_ << "; ";
                    os_ << syms_.name(it.iterSteps[i]);
                }
                os_ << ")";
                break;
        }
    }

    void printStmts(const StmtList& list, int depth) {
        for (const Stmt& s : list) printStmt(s, depth);
    }

    void printIf(const IfStmt& node, int depth) {
        os_ << "if (";
        printExpr(*node.cond);
        os_ << ") then {\n";
        printStmts(node.thenBody, depth + 1);
        indent(depth);
        os_ << "}";
        if (node.hasElse) {
            os_ << " else ";
            // else-if chains print without an extra brace level
            if (node.elseBody.size() == 1 &&
                std::holds_alternative<IfStmt>(node.elseBody[0].node)) {
                printIf(std::get<IfStmt>(node.elseBody[0].node), depth);
                return;
            }
            os_ << "{\n";
            printStmts(node.elseBody, depth + 1);
            indent(depth);
            os_ << "}";
        }
    }

    void printStmt(const Stmt& s, int depth) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, IfStmt>) {
                    indent(depth);
                    printIf(node, depth);
                    os_ << "\n";
                } else if constexpr (std::is_same_v<T, DeclStmt>) {
                    indent(depth);
                    os_ << node.declType.render(syms_) << " " << syms_.name(node.name)
                        << " := ";
                    printExpr(*node.init);
                    os_ << ";\n";
                } else if constexpr (std::is_same_v<T, UpdateStmt>) {
                    indent(depth);
                    printChain(node.target);
                    os_ << " := ";
                    printExpr(*node.value);
                    os_ << ";\n";
                } else if constexpr (std::is_same_v<T, ConsStmt>) {
                    indent(depth);
                    os_ << syms_.name(node.typeSym) << "(";
                    for (size_t i = 0; i < node.args.size(); ++i) {
                        if (i) os_ << ", ";
                        printExpr(*node.args[i]);
                    }
                    os_ << ");\n";
                }
            },
            s.node);
    }

    void printChain(const ChainExpr& chain) {
        for (size_t i = 0; i < chain.segs.size(); ++i) {
            const ChainSeg& seg = chain.segs[i];
            switch (seg.kind) {
                case ChainSeg::Kind::Field:
                    if (i) os_ << ".";
                    os_ << syms_.name(seg.sym);
                    break;
                case ChainSeg::Kind::Index:
                    os_ << "[";
                    printExpr(*seg.index);
                    os_ << "]";
                    break;
                case ChainSeg::Kind::Size: os_ << ".s"; break;
            }
        }
    }

    // Precedence levels, loosest first: || (1), && (2), comparisons (3),
    // additive (4), multiplicative (5), unary/primary (6).
    static int precOf(BinOp op) {
        switch (op) {
            case BinOp::Or: return 1;
            case BinOp::And: return 2;
            case BinOp::Eq:
            case BinOp::Ne:
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge: return 3;
            case BinOp::Add:
            case BinOp::Sub: return 4;
            case BinOp::Mul:
            case BinOp::Div:
            case BinOp::Mod: return 5;
        }
        return 6;
    }

    void printExpr(const Expr& e, int parentPrec = 0, bool rightOperand = false) {
        std::visit(
            [&](const auto& node) {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, LitExpr>) {
                    if (std::holds_alternative<int64_t>(node.value))
                        os_ << std::get<int64_t>(node.value);
                    else if (std::holds_alternative<bool>(node.value))
                        os_ << (std::get<bool>(node.value) ? "true" : "false");
                    else
                        os_ << '"' << escape(std::get<std::string>(node.value)) << '"';
                } else if constexpr (std::is_same_v<T, NullExpr>) {
                    os_ << "null";
                } else if constexpr (std::is_same_v<T, ThisExpr>) {
                    os_ << "this";
                } else if constexpr (std::is_same_v<T, ChainExpr>) {
                    printChain(node);
                } else if constexpr (std::is_same_v<T, NotExpr>) {
                    os_ << "!";
                    printExpr(*node.operand, 6);
                } else if constexpr (std::is_same_v<T, BinExpr>) {
                    int prec = precOf(node.op);
                    bool needParens =
                        prec < parentPrec || (prec == parentPrec && rightOperand) ||
                        (prec == 3 && parentPrec == 3);
                    if (needParens) os_ << "(";
                    printExpr(*node.lhs, prec, false);
                    os_ << " " << binop_text(node.op) << " ";
                    printExpr(*node.rhs, prec, true);
                    if (needParens) os_ << ")";
                } else if constexpr (std::is_same_v<T, ConsExpr>) {
                    os_ << syms_.name(node.typeSym) << "(";
                    for (size_t i = 0; i < node.args.size(); ++i) {
                        if (i) os_ << ", ";
                        printExpr(*node.args[i]);
                    }
                    os_ << ")";
                } else if constexpr (std::is_same_v<T, ArrayNewExpr>) {
                    os_ << "array(";
                    printExpr(*node.size);
                    os_ << ")";
                }
            },
            e.node);
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out += c;
            }
        }
        return out;
    }
};

}  // namespace

std::string pretty(const Program& p) { return Printer(*p.syms).run(p); }

std::string pretty(const Schedule& s, const SymbolTable& syms) {
    Printer pr(syms);
    pr.printSchedule(s);
    return pr.str();
}

}  // namespace audala
