#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "audala/diagnostics.hpp"

namespace audala {

enum class Tok : uint8_t {
    Eof,
    Ident,
    IntLit,
    StringLit,
    // keywords (rule 1: these are not identifiers)
    KwStruct,
    KwIf,
    KwThen,
    KwElse,
    KwNull,
    KwThis,
    KwTrue,
    KwFalse,
    KwFix,
    KwIter,
    KwArray,
    KwNat,
    KwInt,
    KwBool,
    KwString,
    // punctuation / operators
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Assign,   // :=
    Eq,       // == or =
    Ne,       // !=
    Lt,       // <   (also the schedule barrier)
    Le,       // <=
    Gt,       // >
    Ge,       // >=
    AndAnd,   // &&
    OrOr,     // ||
    Bang,     // !
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;    // identifier / literal spelling
    int64_t intValue = 0;
    SourceLoc loc;
};

// Tokenizes the whole input. On a lexical error appends a diagnostic and
// stops; the token stream always ends with an Eof token.
std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diags);

bool is_keyword(Tok t);
const char* token_name(Tok t);

}  // namespace audala
