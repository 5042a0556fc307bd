#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <variant>
#include <vector>

#include "audala/command.hpp"
#include "audala/value.hpp"
#include "audala/wellformed.hpp"

namespace audala {

// A slice of a shared immutable command list. An instance's pending commands
// are the concatenation of its frames, front first. If-bodies are pushed as
// front frames; iterator top-ups are appended as back frames.
struct Frame {
    CmdBlock cmds;
    uint32_t idx = 0;
    bool blockBoundary = false;  // installed by Init/IterInit/IterIter

    size_t remaining() const { return cmds->size() - idx; }
    const Command& head() const { return (*cmds)[idx]; }
};

struct StructInstance {
    int structIdx = -1;
    std::deque<Frame> frames;
    std::vector<Value> stack;                    // back = top
    std::vector<Value> params;                   // by parameter index
    std::vector<std::pair<Sym, Value>> locals;   // small linear map

    bool busy() const {
        for (const Frame& f : frames)
            if (f.remaining() > 0) return true;
        return false;
    }
    const Command* headCommand() const {
        for (const Frame& f : frames)
            if (f.remaining() > 0) return &f.head();
        return nullptr;
    }
    size_t pendingCount() const {
        size_t n = 0;
        for (const Frame& f : frames) n += f.remaining();
        return n;
    }
    // Structural check that the pending command list ends with `block`.
    bool endsWithBlock(const CmdList& block) const;

    Value* findLocal(Sym x) {
        for (auto& [n, v] : locals)
            if (n == x) return &v;
        return nullptr;
    }
    const Value* findLocal(Sym x) const {
        for (const auto& [n, v] : locals)
            if (n == x) return &v;
        return nullptr;
    }
    void setLocal(Sym x, Value v) {
        if (Value* p = findLocal(x))
            *p = std::move(v);
        else
            locals.emplace_back(x, std::move(v));
    }
};

// Array instance: start address and size. The null array is <0, 0>.
struct ArrayInstance {
    uint64_t addr = 0;
    int64_t size = 0;
};

using Slot = std::variant<std::monostate, StructInstance, ArrayInstance>;

// Stability-function level for parameter-specific fixpoints: either the
// all-true function (plain Fix) or a mask over the program's parameter keys.
struct SfLevel {
    bool allTrue = true;
    std::shared_ptr<const std::vector<uint8_t>> mask;  // set iff !allTrue

    bool relevant(int paramKey) const {
        return allTrue || (mask && (*mask)[paramKey] != 0);
    }
};

struct IterInfo {
    std::vector<Sym> steps;
    std::vector<CmdBlock> blockByStruct;  // compiled I(.) per struct type
};

// Runtime schedule item. aFix/aIter are the internal markers of the
// semantics; they are never parseable from source.
struct RtItem {
    enum class Kind : uint8_t { GlobalCall, LocalCall, Fix, AFix, Iter, AIter };
    Kind kind = Kind::GlobalCall;
    Sym stepSym = 0;
    int structIdx = -1;  // LocalCall
    std::shared_ptr<const std::vector<RtItem>> fixBody;        // Fix / AFix
    std::shared_ptr<const std::vector<uint8_t>> fixMask;       // FixOn; null = plain
    std::shared_ptr<const IterInfo> iter;                      // Iter / AIter
};

struct ExecState {
    std::deque<RtItem> schedule;
    std::vector<Slot> env;              // label id -> slot
    std::vector<uint8_t> stability;     // stability stack, back = top
    std::vector<SfLevel> sf;            // level k at sf[k-1] (param-fix)
    std::vector<Value> memory;          // address -> value; address 0 reserved
    std::vector<uint32_t> creationOrder;  // fresh labels, in creation order
    uint32_t nextLabel = 0;
    int32_t allocStep = 1;  // +1 normal, -1 for the reversed-allocator tests

    const StructInstance* instance(Label l) const {
        if (l.id >= env.size()) return nullptr;
        return std::get_if<StructInstance>(&env[l.id]);
    }
    StructInstance* instance(Label l) {
        if (l.id >= env.size()) return nullptr;
        return std::get_if<StructInstance>(&env[l.id]);
    }
    const ArrayInstance* array(Label l) const {
        if (l.id >= env.size()) return nullptr;
        return std::get_if<ArrayInstance>(&env[l.id]);
    }
    bool defined(uint32_t id) const {
        return id < env.size() && !std::holds_alternative<std::monostate>(env[id]);
    }
};

}  // namespace audala
