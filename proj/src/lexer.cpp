#include "audala/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace audala {

bool is_keyword(Tok t) {
    switch (t) {
        case Tok::KwStruct:
        case Tok::KwIf:
        case Tok::KwThen:
        case Tok::KwElse:
        case Tok::KwNull:
        case Tok::KwThis:
        case Tok::KwTrue:
        case Tok::KwFalse:
        case Tok::KwFix:
        case Tok::KwIter:
        case Tok::KwArray:
        case Tok::KwNat:
        case Tok::KwInt:
        case Tok::KwBool:
        case Tok::KwString: return true;
        default: return false;
    }
}

const char* token_name(Tok t) {
    switch (t) {
        case Tok::Eof: return "end of input";
        case Tok::Ident: return "identifier";
        case Tok::IntLit: return "integer literal";
        case Tok::StringLit: return "string literal";
        case Tok::KwStruct: return "'struct'";
        case Tok::KwIf: return "'if'";
        case Tok::KwThen: return "'then'";
        case Tok::KwElse: return "'else'";
        case Tok::KwNull: return "'null'";
        case Tok::KwThis: return "'this'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwFix: return "'Fix'";
        case Tok::KwIter: return "'Iter'";
        case Tok::KwArray: return "'array'";
        case Tok::KwNat: return "'Nat'";
        case Tok::KwInt: return "'Int'";
        case Tok::KwBool: return "'Bool'";
        case Tok::KwString: return "'String'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Colon: return "':'";
        case Tok::Dot: return "'.'";
        case Tok::Assign: return "':='";
        case Tok::Eq: return "'=='";
        case Tok::Ne: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::Bang: return "'!'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
    }
    return "?";
}

namespace {

const std::unordered_map<std::string_view, Tok> kKeywords = {
    {"struct", Tok::KwStruct}, {"if", Tok::KwIf},       {"then", Tok::KwThen},
    {"else", Tok::KwElse},     {"null", Tok::KwNull},   {"this", Tok::KwThis},
    {"true", Tok::KwTrue},     {"false", Tok::KwFalse}, {"Fix", Tok::KwFix},
    {"Iter", Tok::KwIter},     {"array", Tok::KwArray}, {"Nat", Tok::KwNat},
    {"Int", Tok::KwInt},       {"Bool", Tok::KwBool},   {"String", Tok::KwString},
};

}  // namespace

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;

    auto here = [&] { return SourceLoc{line, col}; };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok kind, SourceLoc loc, std::string text = {}, int64_t v = 0) {
        out.push_back(Token{kind, std::move(text), v, loc});
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourceLoc loc = here();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            size_t start = i;
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_' ||
                    src[i] == '$'))
                advance(1);
            std::string_view word = src.substr(start, i - start);
            auto it = kKeywords.find(word);
            if (it != kKeywords.end())
                push(it->second, loc);
            else
                push(Tok::Ident, loc, std::string(word));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
                advance(1);
            std::string text(src.substr(start, i - start));
            int64_t v = 0;
            try {
                v = std::stoll(text);
            } catch (...) {
                diags.push_back({loc, 0, "integer literal out of range: " + text});
            }
            push(Tok::IntLit, loc, text, v);
            continue;
        }
        if (c == '"') {
            advance(1);
            std::string text;
            bool closed = false;
            while (i < src.size()) {
                char d = src[i];
                if (d == '"') {
                    advance(1);
                    closed = true;
                    break;
                }
                if (d == '\\' && i + 1 < src.size()) {
                    char e = src[i + 1];
                    advance(2);
                    switch (e) {
                        case 'n': text += '\n'; break;
                        case 't': text += '\t'; break;
                        case '\\': text += '\\'; break;
                        case '"': text += '"'; break;
                        default: text += e; break;
                    }
                    continue;
                }
                text += d;
                advance(1);
            }
            if (!closed) {
                diags.push_back({loc, 0, "unterminated string literal"});
                break;
            }
            push(Tok::StringLit, loc, text);
            continue;
        }

        auto two = [&](char a, char b) {
            return c == a && i + 1 < src.size() && src[i + 1] == b;
        };
        if (two(':', '=')) { push(Tok::Assign, loc); advance(2); continue; }
        if (two('=', '=')) { push(Tok::Eq, loc); advance(2); continue; }
        if (two('!', '=')) { push(Tok::Ne, loc); advance(2); continue; }
        if (two('<', '=')) { push(Tok::Le, loc); advance(2); continue; }
        if (two('>', '=')) { push(Tok::Ge, loc); advance(2); continue; }
        if (two('&', '&')) { push(Tok::AndAnd, loc); advance(2); continue; }
        if (two('|', '|')) { push(Tok::OrOr, loc); advance(2); continue; }

        Tok single = Tok::Eof;
        switch (c) {
            case '(': single = Tok::LParen; break;
            case ')': single = Tok::RParen; break;
            case '{': single = Tok::LBrace; break;
            case '}': single = Tok::RBrace; break;
            case '[': single = Tok::LBracket; break;
            case ']': single = Tok::RBracket; break;
            case ',': single = Tok::Comma; break;
            case ';': single = Tok::Semi; break;
            case ':': single = Tok::Colon; break;
            case '.': single = Tok::Dot; break;
            case '=': single = Tok::Eq; break;  // listings use both = and ==
            case '<': single = Tok::Lt; break;
            case '>': single = Tok::Gt; break;
            case '!': single = Tok::Bang; break;
            case '+': single = Tok::Plus; break;
            case '-': single = Tok::Minus; break;
            case '*': single = Tok::Star; break;
            case '/': single = Tok::Slash; break;
            case '%': single = Tok::Percent; break;
            default:
                diags.push_back({loc, 0, std::string("unexpected character '") + c + "'"});
                advance(1);
                continue;
        }
        push(single, loc);
        advance(1);
    }
    out.push_back(Token{Tok::Eof, {}, 0, here()});
    return out;
}

}  // namespace audala
