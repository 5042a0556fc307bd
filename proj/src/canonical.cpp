#include "audala/canonical.hpp"

#include <algorithm>
#include <sstream>

namespace audala {

CanonicalMap canonical_map(const ExecState& st, const ValidatedProgram& vp) {
    CanonicalMap m;
    m.oldToNew.assign(st.env.size(), UINT32_MAX);
    uint32_t firstFresh = vp.firstFreshLabelId();
    for (uint32_t i = 0; i < firstFresh && i < st.env.size(); ++i) m.oldToNew[i] = i;
    uint32_t next = firstFresh;
    for (uint32_t old : st.creationOrder) {
        if (old < m.oldToNew.size()) m.oldToNew[old] = next++;
    }
    return m;
}

namespace {

Value remapValue(const Value& v, const CanonicalMap& m) {
    if (const Label* l = std::get_if<Label>(&v)) return Label{m.map(*l)};
    return v;
}

}  // namespace

ExecState canonicalize(const ExecState& st, const ValidatedProgram& vp) {
    CanonicalMap m = canonical_map(st, vp);
    uint32_t firstFresh = vp.firstFreshLabelId();
    uint32_t total = firstFresh + static_cast<uint32_t>(st.creationOrder.size());

    ExecState out;
    out.schedule = st.schedule;
    out.stability = st.stability;
    out.sf = st.sf;
    out.env.resize(total);
    out.memory.resize(1);
    out.allocStep = 1;
    out.nextLabel = total;
    out.creationOrder.reserve(st.creationOrder.size());
    for (uint32_t i = firstFresh; i < total; ++i) out.creationOrder.push_back(i);

    // copy instances under the new numbering; relocate array storage in
    // canonical creation order
    for (uint32_t old = 0; old < st.env.size(); ++old) {
        uint32_t nu = m.oldToNew[old];
        if (nu == UINT32_MAX) continue;
        if (const auto* si = std::get_if<StructInstance>(&st.env[old])) {
            StructInstance copy = *si;
            for (Value& v : copy.stack) v = remapValue(v, m);
            for (Value& v : copy.params) v = remapValue(v, m);
            for (auto& [n, v] : copy.locals) v = remapValue(v, m);
            std::sort(copy.locals.begin(), copy.locals.end(),
                      [&](const auto& a, const auto& b) {
                          return vp.syms->name(a.first) < vp.syms->name(b.first);
                      });
            out.env[nu] = std::move(copy);
        } else if (std::holds_alternative<ArrayInstance>(st.env[old])) {
            out.env[nu] = ArrayInstance{};  // placed below in canonical order
        }
    }
    // null array keeps <0, 0>
    if (vp.nullArrayLabelId() < st.env.size() &&
        std::holds_alternative<ArrayInstance>(st.env[vp.nullArrayLabelId()]))
        out.env[vp.nullArrayLabelId()] = ArrayInstance{0, 0};

    for (uint32_t old : st.creationOrder) {
        const auto* arr = std::get_if<ArrayInstance>(&st.env[old]);
        if (!arr) continue;
        uint32_t nu = m.oldToNew[old];
        uint64_t addr = out.memory.size();
        for (int64_t i = 0; i < arr->size; ++i)
            out.memory.push_back(remapValue(st.memory[arr->addr + i], m));
        out.env[nu] = ArrayInstance{addr, arr->size};
    }
    return out;
}

// ---- rendering ------------------------------------------------------------------

namespace {

std::string labelName(Label l, const ValidatedProgram& vp) {
    if (l.id < vp.structs.size()) return "null_" + vp.syms->name(vp.structs[l.id].name);
    if (l.id == vp.nullArrayLabelId()) return "null_array";
    return "@" + std::to_string(l.id);
}

void renderValue(std::ostringstream& os, const Value& v, const ExecState& canon,
                 const ValidatedProgram& vp, bool expandArrays) {
    if (const auto* i = std::get_if<int64_t>(&v)) {
        os << *i;
    } else if (const auto* b = std::get_if<bool>(&v)) {
        os << (*b ? "true" : "false");
    } else if (const auto* s = std::get_if<std::string>(&v)) {
        os << '"' << *s << '"';
    } else {
        Label l = std::get<Label>(v);
        const ArrayInstance* arr = canon.array(l);
        if (arr && expandArrays && l.id != vp.nullArrayLabelId()) {
            os << "[";
            for (int64_t i = 0; i < arr->size; ++i) {
                if (i) os << ", ";
                renderValue(os, canon.memory[arr->addr + i], canon, vp, false);
            }
            os << "]";
            return;
        }
        os << labelName(l, vp);
    }
}

void renderItem(std::ostringstream& os, const RtItem& item, const SymbolTable& syms) {
    switch (item.kind) {
        case RtItem::Kind::GlobalCall: os << syms.name(item.stepSym); break;
        case RtItem::Kind::LocalCall:
            os << "local:" << syms.name(item.stepSym);
            break;
        case RtItem::Kind::Fix:
        case RtItem::Kind::AFix: {
            os << (item.kind == RtItem::Kind::Fix ? "Fix(" : "aFix(");
            for (size_t i = 0; i < item.fixBody->size(); ++i) {
                if (i) os << " < ";
                renderItem(os, (*item.fixBody)[i], syms);
            }
            os << ")";
            break;
        }
        case RtItem::Kind::Iter:
        case RtItem::Kind::AIter: {
            os << (item.kind == RtItem::Kind::Iter ? "Iter(" : "aIter(");
            for (size_t i = 0; i < item.iter->steps.size(); ++i) {
                if (i) os << "; ";
                os << syms.name(item.iter->steps[i]);
            }
            os << ")";
            break;
        }
    }
}

}  // namespace

std::string render_canonical_value(const Value& v, const ExecState& canon,
                                   const ValidatedProgram& vp) {
    std::ostringstream os;
    renderValue(os, v, canon, vp, true);
    return os.str();
}

std::string render_canonical(const ExecState& st, const ValidatedProgram& vp) {
    ExecState canon = canonicalize(st, vp);
    std::ostringstream os;
    os << "schedule:";
    for (const RtItem& item : canon.schedule) {
        os << " ";
        renderItem(os, item, *vp.syms);
    }
    os << "\nstability:";
    for (uint8_t b : canon.stability) os << " " << (b ? "true" : "false");
    // levels above the stability depth are immaterial and never read
    canon.sf.resize(std::min(canon.sf.size(), canon.stability.size()));
    if (!canon.sf.empty()) {
        os << "\nsf:";
        for (const SfLevel& lvl : canon.sf) {
            if (lvl.allTrue) {
                os << " all";
            } else {
                os << " [";
                for (uint8_t b : *lvl.mask) os << (b ? '1' : '0');
                os << "]";
            }
        }
    }
    os << "\n";
    for (uint32_t id = 0; id < canon.env.size(); ++id) {
        if (const auto* si = std::get_if<StructInstance>(&canon.env[id])) {
            os << labelName(Label{id}, vp) << " : "
               << vp.syms->name(vp.structs[si->structIdx].name) << " {";
            const StructInfo& info = vp.structs[si->structIdx];
            for (size_t p = 0; p < info.params.size(); ++p) {
                if (p) os << ",";
                os << " " << vp.syms->name(info.params[p].name) << "=";
                renderValue(os, si->params[p], canon, vp, false);
            }
            os << " }";
            if (!si->locals.empty()) {
                os << " locals {";
                for (size_t i = 0; i < si->locals.size(); ++i) {
                    if (i) os << ",";
                    os << " " << vp.syms->name(si->locals[i].first) << "=";
                    renderValue(os, si->locals[i].second, canon, vp, false);
                }
                os << " }";
            }
            if (!si->stack.empty()) {
                os << " stack [";
                for (size_t i = 0; i < si->stack.size(); ++i) {
                    if (i) os << ", ";
                    renderValue(os, si->stack[i], canon, vp, false);
                }
                os << "]";
            }
            size_t pending = si->pendingCount();
            if (pending > 0) os << " pending " << pending;
            os << "\n";
        } else if (const auto* arr = std::get_if<ArrayInstance>(&canon.env[id])) {
            os << labelName(Label{id}, vp) << " : array size " << arr->size << " [";
            for (int64_t i = 0; i < arr->size; ++i) {
                if (i) os << ", ";
                renderValue(os, canon.memory[arr->addr + i], canon, vp, false);
            }
            os << "]\n";
        }
    }
    return os.str();
}

std::string render_final_values(const ExecState& st, const ValidatedProgram& vp) {
    ExecState canon = canonicalize(st, vp);
    std::ostringstream os;
    for (uint32_t id = vp.firstFreshLabelId(); id < canon.env.size(); ++id) {
        const auto* si = std::get_if<StructInstance>(&canon.env[id]);
        if (!si) continue;
        const StructInfo& info = vp.structs[si->structIdx];
        os << vp.syms->name(info.name) << " @" << id << " {";
        for (size_t p = 0; p < info.params.size(); ++p) {
            if (p) os << ",";
            os << " " << vp.syms->name(info.params[p].name) << " = ";
            renderValue(os, si->params[p], canon, vp, true);
        }
        os << " }\n";
    }
    return os.str();
}

}  // namespace audala
