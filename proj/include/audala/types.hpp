#pragma once

#include <memory>
#include <string>

#include "audala/symbols.hpp"

namespace audala {

// Syntactic types: Nat, Int, Bool, String, struct references and (with the
// arrays extension) Array(T). Struct references carry the source name and,
// after resolution, the index of the struct definition.
struct SynType {
    enum class Kind : uint8_t { Invalid, Nat, Int, Bool, String, Struct, Array };

    Kind kind = Kind::Invalid;
    Sym nameSym = 0;     // Struct: source identifier
    int structIdx = -1;  // Struct: resolved index, -1 before resolution
    std::shared_ptr<SynType> elem;  // Array element type

    static SynType invalid() { return {}; }
    static SynType nat() { return make(Kind::Nat); }
    static SynType int_() { return make(Kind::Int); }
    static SynType boolean() { return make(Kind::Bool); }
    static SynType string() { return make(Kind::String); }
    static SynType structRef(Sym name) {
        SynType t = make(Kind::Struct);
        t.nameSym = name;
        return t;
    }
    static SynType array(SynType element) {
        SynType t = make(Kind::Array);
        t.elem = std::make_shared<SynType>(std::move(element));
        return t;
    }

    bool valid() const { return kind != Kind::Invalid; }
    bool isIntegral() const { return kind == Kind::Nat || kind == Kind::Int; }
    bool isStruct() const { return kind == Kind::Struct; }
    bool isArray() const { return kind == Kind::Array; }

    // Structural equality. Struct types compare by resolved index when both
    // sides are resolved, by name otherwise (the pre-resolution AST case).
    bool sameAs(const SynType& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Struct) {
            if (structIdx >= 0 && o.structIdx >= 0) return structIdx == o.structIdx;
            return nameSym == o.nameSym;
        }
        if (kind == Kind::Array) return elem && o.elem && elem->sameAs(*o.elem);
        return true;
    }

    // Nat values embed into Int; everything else must match exactly.
    bool assignableTo(const SynType& target) const {
        if (kind == Kind::Nat && target.kind == Kind::Int) return true;
        return sameAs(target);
    }

    std::string render(const SymbolTable& syms) const {
        switch (kind) {
            case Kind::Invalid: return "<invalid>";
            case Kind::Nat: return "Nat";
            case Kind::Int: return "Int";
            case Kind::Bool: return "Bool";
            case Kind::String: return "String";
            case Kind::Struct: return syms.name(nameSym);
            case Kind::Array: return "Array(" + (elem ? elem->render(syms) : "?") + ")";
        }
        return "<invalid>";
    }

private:
    static SynType make(Kind k) {
        SynType t;
        t.kind = k;
        return t;
    }
};

}  // namespace audala
