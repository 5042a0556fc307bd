#include "audala/parser.hpp"

#include <memory>
#include <utility>

#include "audala/lexer.hpp"

namespace audala {

namespace {

struct ParseFail {};  // unwinds to parse_program; the diagnostic is already recorded

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
        : toks_(std::move(toks)), diags_(diags) {
        syms_ = std::make_shared<SymbolTable>();
    }

    Program parseProgram() {
        Program p;
        p.syms = syms_;
        while (at(Tok::KwStruct)) p.structs.push_back(parseStruct());
        p.schedule = parseSchedule();
        expect(Tok::Eof);
        return p;
    }

private:
    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::shared_ptr<SymbolTable> syms_;
    size_t pos_ = 0;

    const Token& peek(size_t k = 0) const {
        size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at(Tok t, size_t k = 0) const { return peek(k).kind == t; }
    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(SourceLoc loc, std::string msg, int rule = 0) {
        diags_.push_back({loc, rule, std::move(msg)});
        throw ParseFail{};
    }

    Token expect(Tok t) {
        if (!at(t)) {
            fail(peek().loc, std::string("expected ") + token_name(t) + ", found " +
                                 token_name(peek().kind));
        }
        return take();
    }

    Sym expectIdent(const char* what) {
        if (at(Tok::Ident)) return syms_->intern(take().text);
        if (is_keyword(peek().kind)) {
            fail(peek().loc,
                 std::string("keyword ") + token_name(peek().kind) +
                     " may not be used as " + what + " (rule 1)",
                 1);
        }
        fail(peek().loc, std::string("expected ") + what + ", found " +
                             token_name(peek().kind));
    }

    // ---- types -------------------------------------------------------

    bool atTypeStart() const {
        switch (peek().kind) {
            case Tok::KwNat:
            case Tok::KwInt:
            case Tok::KwBool:
            case Tok::KwString: return true;
            case Tok::Ident: return true;
            default: return false;
        }
    }

    SynType parseType() {
        switch (peek().kind) {
            case Tok::KwNat: take(); return SynType::nat();
            case Tok::KwInt: take(); return SynType::int_();
            case Tok::KwBool: take(); return SynType::boolean();
            case Tok::KwString: take(); return SynType::string();
            case Tok::Ident: {
                Token t = take();
                if (t.text == "Array") {
                    expect(Tok::LParen);
                    SynType inner = parseType();
                    expect(Tok::RParen);
                    return SynType::array(std::move(inner));
                }
                return SynType::structRef(syms_->intern(t.text));
            }
            default:
                fail(peek().loc, std::string("expected a type, found ") +
                                     token_name(peek().kind));
        }
    }

    // ---- structs and steps --------------------------------------------

    StructDef parseStruct() {
        StructDef sd;
        sd.loc = peek().loc;
        expect(Tok::KwStruct);
        sd.name = expectIdent("a struct name");
        expect(Tok::LParen);
        if (!at(Tok::RParen)) {
            for (;;) {
                ParamDef pd;
                pd.loc = peek().loc;
                pd.name = expectIdent("a parameter name");
                expect(Tok::Colon);
                pd.type = parseType();
                sd.params.push_back(std::move(pd));
                if (!at(Tok::Comma)) break;
                take();
            }
        }
        expect(Tok::RParen);
        expect(Tok::LBrace);
        while (!at(Tok::RBrace)) {
            StepDef st;
            st.loc = peek().loc;
            st.name = expectIdent("a step name");
            expect(Tok::LBrace);
            st.body = parseStmts();
            expect(Tok::RBrace);
            sd.steps.push_back(std::move(st));
        }
        expect(Tok::RBrace);
        return sd;
    }

    // ---- statements ----------------------------------------------------

    StmtList parseStmts() {
        StmtList list;
        while (!at(Tok::RBrace) && !at(Tok::Eof)) list.push_back(parseStmt());
        return list;
    }

    Stmt parseStmt() {
        SourceLoc loc = peek().loc;
        if (at(Tok::KwIf)) return Stmt{loc, parseIf()};
        if (at(Tok::KwNat) || at(Tok::KwInt) || at(Tok::KwBool) || at(Tok::KwString))
            return parseDecl(loc);
        if (at(Tok::Ident)) {
            if (peek().text == "Array" && at(Tok::LParen, 1)) return parseDecl(loc);
            if (at(Tok::LParen, 1)) {
                // bare constructor statement: Control(cell0, 0, false);
                ConsStmt cs;
                cs.typeSym = syms_->intern(take().text);
                cs.args = parseArgs();
                expect(Tok::Semi);
                return Stmt{loc, std::move(cs)};
            }
            if (at(Tok::Ident, 1)) return parseDecl(loc);  // `Node node1 := ...`
            // otherwise an update through a variable chain
            UpdateStmt us;
            us.targetLoc = loc;
            us.target = parseChain();
            expect(Tok::Assign);
            us.value = parseExpr();
            expect(Tok::Semi);
            return Stmt{loc, std::move(us)};
        }
        fail(loc, std::string("expected a statement, found ") + token_name(peek().kind));
    }

    Stmt parseDecl(SourceLoc loc) {
        DeclStmt ds;
        ds.declType = parseType();
        ds.name = expectIdent("a variable name");
        expect(Tok::Assign);
        ds.init = parseExpr();
        expect(Tok::Semi);
        return Stmt{loc, std::move(ds)};
    }

    IfStmt parseIf() {
        expect(Tok::KwIf);
        IfStmt is;
        expect(Tok::LParen);
        is.cond = parseExpr();
        expect(Tok::RParen);
        if (at(Tok::KwThen)) take();  // `then` is optional in the listings
        expect(Tok::LBrace);
        is.thenBody = parseStmts();
        expect(Tok::RBrace);
        if (at(Tok::KwElse)) {
            take();
            is.hasElse = true;
            if (at(Tok::KwIf)) {
                SourceLoc loc = peek().loc;
                is.elseBody.push_back(Stmt{loc, parseIf()});
            } else {
                expect(Tok::LBrace);
                is.elseBody = parseStmts();
                expect(Tok::RBrace);
            }
        }
        return is;
    }

    // ---- expressions -----------------------------------------------------

    std::vector<ExprPtr> parseArgs() {
        expect(Tok::LParen);
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            for (;;) {
                args.push_back(parseExpr());
                if (!at(Tok::Comma)) break;
                take();
            }
        }
        expect(Tok::RParen);
        return args;
    }

    ChainExpr parseChain() {
        ChainExpr chain;
        ChainSeg root;
        root.loc = peek().loc;
        root.kind = ChainSeg::Kind::Field;
        root.sym = expectIdent("a variable name");
        chain.segs.push_back(std::move(root));
        for (;;) {
            if (at(Tok::Dot)) {
                take();
                ChainSeg seg;
                seg.loc = peek().loc;
                seg.kind = ChainSeg::Kind::Field;
                seg.sym = expectIdent("a field name");
                chain.segs.push_back(std::move(seg));
            } else if (at(Tok::LBracket)) {
                ChainSeg seg;
                seg.loc = peek().loc;
                seg.kind = ChainSeg::Kind::Index;
                take();
                seg.index = parseExpr();
                expect(Tok::RBracket);
                chain.segs.push_back(std::move(seg));
            } else {
                break;
            }
        }
        return chain;
    }

    ExprPtr mk(SourceLoc loc, auto node) {
        auto e = std::make_unique<Expr>();
        e->loc = loc;
        e->node = std::move(node);
        return e;
    }

    ExprPtr parseExpr() { return parseOr(); }

    ExprPtr parseOr() {
        ExprPtr lhs = parseAnd();
        while (at(Tok::OrOr)) {
            SourceLoc loc = take().loc;
            BinExpr b{BinOp::Or, std::move(lhs), parseAnd()};
            lhs = mk(loc, std::move(b));
        }
        return lhs;
    }

    ExprPtr parseAnd() {
        ExprPtr lhs = parseCmp();
        while (at(Tok::AndAnd)) {
            SourceLoc loc = take().loc;
            BinExpr b{BinOp::And, std::move(lhs), parseCmp()};
            lhs = mk(loc, std::move(b));
        }
        return lhs;
    }

    ExprPtr parseCmp() {
        ExprPtr lhs = parseAdd();
        BinOp op;
        switch (peek().kind) {
            case Tok::Eq: op = BinOp::Eq; break;
            case Tok::Ne: op = BinOp::Ne; break;
            case Tok::Lt: op = BinOp::Lt; break;
            case Tok::Le: op = BinOp::Le; break;
            case Tok::Gt: op = BinOp::Gt; break;
            case Tok::Ge: op = BinOp::Ge; break;
            default: return lhs;
        }
        SourceLoc loc = take().loc;
        BinExpr b{op, std::move(lhs), parseAdd()};
        return mk(loc, std::move(b));
    }

    ExprPtr parseAdd() {
        ExprPtr lhs = parseMul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
            SourceLoc loc = take().loc;
            BinExpr b{op, std::move(lhs), parseMul()};
            lhs = mk(loc, std::move(b));
        }
        return lhs;
    }

    ExprPtr parseMul() {
        ExprPtr lhs = parseUnary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            BinOp op = at(Tok::Star)    ? BinOp::Mul
                       : at(Tok::Slash) ? BinOp::Div
                                        : BinOp::Mod;
            SourceLoc loc = take().loc;
            BinExpr b{op, std::move(lhs), parseUnary()};
            lhs = mk(loc, std::move(b));
        }
        return lhs;
    }

    ExprPtr parseUnary() {
        if (at(Tok::Bang)) {
            SourceLoc loc = take().loc;
            NotExpr n{parseUnary()};
            return mk(loc, std::move(n));
        }
        if (at(Tok::Minus) && at(Tok::IntLit, 1)) {
            SourceLoc loc = take().loc;
            Token lit = take();
            return mk(loc, LitExpr{-lit.intValue});
        }
        return parsePrimary();
    }

    ExprPtr parsePrimary() {
        SourceLoc loc = peek().loc;
        switch (peek().kind) {
            case Tok::IntLit: {
                Token t = take();
                return mk(loc, LitExpr{t.intValue});
            }
            case Tok::StringLit: {
                Token t = take();
                return mk(loc, LitExpr{t.text});
            }
            case Tok::KwTrue: take(); return mk(loc, LitExpr{true});
            case Tok::KwFalse: take(); return mk(loc, LitExpr{false});
            case Tok::KwNull: take(); return mk(loc, NullExpr{});
            case Tok::KwThis: take(); return mk(loc, ThisExpr{});
            case Tok::KwArray: {
                take();
                expect(Tok::LParen);
                ArrayNewExpr a{parseExpr()};
                expect(Tok::RParen);
                return mk(loc, std::move(a));
            }
            case Tok::LParen: {
                take();
                ExprPtr e = parseExpr();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Ident: {
                if (at(Tok::LParen, 1)) {
                    ConsExpr c;
                    c.typeSym = syms_->intern(take().text);
                    c.args = parseArgs();
                    return mk(loc, std::move(c));
                }
                return mk(loc, parseChain());
            }
            default:
                fail(loc, std::string("expected an expression, found ") +
                              token_name(peek().kind));
        }
    }

    // ---- schedule --------------------------------------------------------

    Schedule parseSchedule() {
        Schedule s;
        s.items.push_back(parseScheduleItem());
        while (at(Tok::Lt)) {
            take();
            s.items.push_back(parseScheduleItem());
        }
        return s;
    }

    ScheduleItem parseScheduleItem() {
        ScheduleItem item;
        item.loc = peek().loc;
        if (at(Tok::KwFix)) {
            take();
            expect(Tok::LParen);
            item.kind = ScheduleItem::Kind::Fix;
            item.body = parseSchedule();
            if (at(Tok::Comma)) {
                item.kind = ScheduleItem::Kind::FixOn;
                while (at(Tok::Comma)) {
                    take();
                    item.fixParams.push_back(expectIdent("a parameter name"));
                }
            }
            expect(Tok::RParen);
            return item;
        }
        if (at(Tok::KwIter)) {
            take();
            expect(Tok::LParen);
            item.kind = ScheduleItem::Kind::Iter;
            item.iterSteps.push_back(expectIdent("a step name"));
            while (at(Tok::Semi)) {
                take();
                item.iterSteps.push_back(expectIdent("a step name"));
            }
            expect(Tok::RParen);
            return item;
        }
        Sym first = expectIdent("a step name");
        if (at(Tok::Dot)) {
            take();
            item.kind = ScheduleItem::Kind::LocalCall;
            item.structSym = first;
            item.stepSym = expectIdent("a step name");
        } else {
            item.kind = ScheduleItem::Kind::GlobalCall;
            item.stepSym = first;
        }
        return item;
    }
};

}  // namespace

ParseResult parse_program(std::string_view source) {
    ParseResult res;
    std::vector<Token> toks = lex(source, res.errors);
    if (!res.errors.empty()) return res;
    Parser parser(std::move(toks), res.errors);
    try {
        res.program = parser.parseProgram();
    } catch (ParseFail&) {
        res.program.reset();
    }
    return res;
}

}  // namespace audala
