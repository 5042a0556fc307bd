#include "audala/command.hpp"

#include <sstream>

namespace audala {

bool Command::operator==(const Command& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case CmdKind::Push: return value == o.value;
        case CmdKind::PushThis: return true;
        case CmdKind::Rd:
        case CmdKind::Wr: return var == o.var;
        case CmdKind::Cons: return structIdx == o.structIdx;
        case CmdKind::If:
            if (body == o.body) return true;
            if (!body || !o.body) return false;
            return *body == *o.body;
        case CmdKind::Not: return true;
        case CmdKind::Op: return op == o.op;
        case CmdKind::RdA:
        case CmdKind::WrA:
        case CmdKind::Asize: return true;
        case CmdKind::Arr: return arrDefault == o.arrDefault && typeName == o.typeName;
    }
    return false;
}

std::string render_push_value(const Value& v,
                              const std::vector<std::string>& nullNames) {
    std::ostringstream os;
    if (const auto* i = std::get_if<int64_t>(&v)) {
        os << *i;
    } else if (const auto* b = std::get_if<bool>(&v)) {
        os << (*b ? "true" : "false");
    } else if (const auto* s = std::get_if<std::string>(&v)) {
        os << '"' << *s << '"';
    } else {
        const Label& l = std::get<Label>(v);
        if (l.id < nullNames.size())
            os << nullNames[l.id];
        else
            os << "@" << l.id;
    }
    return os.str();
}

namespace {

// Operator notation of the semantics: equality prints as `=`.
const char* op_notation(BinOp op) { return op == BinOp::Eq ? "=" : binop_text(op); }

void renderInto(std::ostringstream& os, const CmdList& cmds, const SymbolTable& syms,
                int indent, const std::vector<std::string>& nullNames) {
    auto pad = [&](int n) {
        for (int i = 0; i < n; ++i) os << "  ";
    };
    for (const Command& c : cmds) {
        pad(indent);
        switch (c.kind) {
            case CmdKind::Push:
                os << "Push(" << render_push_value(c.value, nullNames) << ")\n";
                break;
            case CmdKind::PushThis: os << "Push(this)\n"; break;
            case CmdKind::Rd: os << "Rd(" << syms.name(c.var) << ")\n"; break;
            case CmdKind::Wr: os << "Wr(" << syms.name(c.var) << ")\n"; break;
            case CmdKind::Cons: os << "Cons(" << c.typeName << ")\n"; break;
            case CmdKind::If:
                os << "If(\n";
                if (c.body) renderInto(os, *c.body, syms, indent + 1, nullNames);
                pad(indent);
                os << ")\n";
                break;
            case CmdKind::Not: os << "Not\n"; break;
            case CmdKind::Op: os << "Op(" << op_notation(c.op) << ")\n"; break;
            case CmdKind::RdA: os << "RdA\n"; break;
            case CmdKind::WrA: os << "WrA\n"; break;
            case CmdKind::Arr: os << "Arr(" << c.typeName << ")\n"; break;
            case CmdKind::Asize: os << "Asize\n"; break;
        }
    }
}

const std::vector<std::string> kNoNullNames;

}  // namespace

std::string render_commands(const CmdList& cmds, const SymbolTable& syms,
                            const std::vector<std::string>& nullNames, int indent) {
    std::ostringstream os;
    renderInto(os, cmds, syms, indent, nullNames);
    return os.str();
}

std::string render_commands(const CmdList& cmds, const SymbolTable& syms, int indent) {
    return render_commands(cmds, syms, kNoNullNames, indent);
}

std::string render_command(const Command& c, const SymbolTable& syms) {
    std::string s = render_commands(CmdList{c}, syms, 0);
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

}  // namespace audala
