#include "audala/engine.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace audala {

const char* rule_name(Rule r, bool paramFix) {
    switch (r) {
        case Rule::ComPush: return "ComPush";
        case Rule::ComPushThis: return "ComPushThis";
        case Rule::ComRd: return "ComRd";
        case Rule::ComWr: return paramFix ? "ComWrN" : "ComWr";
        case Rule::ComWrNSkip: return "ComWrNSkip";
        case Rule::ComNot: return "ComNot";
        case Rule::ComOp: return "ComOp";
        case Rule::ComCons: return "ComCons";
        case Rule::ComIfT: return "ComIfT";
        case Rule::ComIfF: return "ComIfF";
        case Rule::ComRdA: return "ComRdA";
        case Rule::ComWrA: return "ComWrA";
        case Rule::ComWrASkip: return "ComWrASkip";
        case Rule::ComAsize: return "ComAsize";
        case Rule::ComArr: return "ComArr";
        case Rule::InitG: return "InitG";
        case Rule::InitL: return "InitL";
        case Rule::FixInit: return paramFix ? "FixInitG" : "FixInit";
        case Rule::FixIter: return paramFix ? "FixIterN" : "FixIter";
        case Rule::FixTerm: return paramFix ? "FixTermN" : "FixTerm";
        case Rule::IterInit: return "IterInit";
        case Rule::IterIter: return "IterIter";
        case Rule::IterTerm: return "IterTerm";
    }
    return "?";
}

// ---- command-list helpers ---------------------------------------------------

bool StructInstance::endsWithBlock(const CmdList& block) const {
    if (block.empty()) return true;  // L = L;eps
    size_t need = block.size();
    if (pendingCount() < need) return false;
    // walk frames from the back, comparing against block from its end
    size_t bi = block.size();
    for (auto fit = frames.rbegin(); fit != frames.rend() && bi > 0; ++fit) {
        const Frame& f = *fit;
        size_t n = f.remaining();
        for (size_t k = 0; k < n && bi > 0; ++k) {
            const Command& mine = (*f.cmds)[f.cmds->size() - 1 - k];
            if (!(mine == block[bi - 1])) return false;
            --bi;
        }
    }
    return bi == 0;
}

// ---- integer semantics -------------------------------------------------------

namespace {

int64_t wrap_add(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
    return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}

Value eval_binop(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return !(a == b);
        case BinOp::And: return std::get<bool>(a) && std::get<bool>(b);
        case BinOp::Or: return std::get<bool>(a) || std::get<bool>(b);
        default: break;
    }
    int64_t x = std::get<int64_t>(a);
    int64_t y = std::get<int64_t>(b);
    switch (op) {
        case BinOp::Lt: return x < y;
        case BinOp::Le: return x <= y;
        case BinOp::Gt: return x > y;
        case BinOp::Ge: return x >= y;
        case BinOp::Add: return wrap_add(x, y);
        case BinOp::Sub: return wrap_sub(x, y);
        case BinOp::Mul: return wrap_mul(x, y);
        case BinOp::Div:
            if (y == 0) throw EngineFault{FaultKind::DivisionByZero, "division by zero"};
            if (x == INT64_MIN && y == -1) return INT64_MIN;
            return x / y;
        case BinOp::Mod:
            if (y == 0) throw EngineFault{FaultKind::DivisionByZero, "modulo by zero"};
            if (x == INT64_MIN && y == -1) return int64_t{0};
            return x % y;
        default: break;
    }
    throw std::logic_error("eval_binop: unhandled operator");
}

bool binop_operands_ok(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Eq:
        case BinOp::Ne: return a.index() == b.index();
        case BinOp::And:
        case BinOp::Or: return is_bool(a) && is_bool(b);
        default: return is_int(a) && is_int(b);
    }
}

}  // namespace

// ---- engine construction ------------------------------------------------------

Engine::Engine(std::shared_ptr<const ValidatedProgram> program, Extensions ext)
    : program_(std::move(program)), ext_(ext) {
    const ValidatedProgram& vp = *program_;
    defaultParams_.resize(vp.structs.size());
    for (size_t i = 0; i < vp.structs.size(); ++i) {
        for (const ParamInfo& p : vp.structs[i].params)
            defaultParams_[i].push_back(default_val(vp, p.type));
    }
    nullNames_ = vp.nullLabelNames();
    rtSchedule_ = compileSchedule(vp.ast.schedule);
}

std::vector<RtItem> Engine::compileSchedule(const Schedule& s) const {
    const ValidatedProgram& vp = *program_;
    std::vector<RtItem> out;
    for (const ScheduleItem& item : s.items) {
        RtItem rt;
        switch (item.kind) {
            case ScheduleItem::Kind::GlobalCall:
                rt.kind = RtItem::Kind::GlobalCall;
                rt.stepSym = item.stepSym;
                break;
            case ScheduleItem::Kind::LocalCall:
                rt.kind = RtItem::Kind::LocalCall;
                rt.stepSym = item.stepSym;
                rt.structIdx = vp.structIndex(item.structSym);
                break;
            case ScheduleItem::Kind::Fix:
            case ScheduleItem::Kind::FixOn: {
                rt.kind = RtItem::Kind::Fix;
                rt.fixBody = std::make_shared<const std::vector<RtItem>>(
                    compileSchedule(item.body));
                if (item.kind == ScheduleItem::Kind::FixOn) {
                    std::vector<uint8_t> mask(vp.paramKeys.size(), 0);
                    for (Sym p : item.fixParams) {
                        auto it = vp.keysByName.find(p);
                        if (it != vp.keysByName.end())
                            for (int key : it->second) mask[key] = 1;
                    }
                    rt.fixMask =
                        std::make_shared<const std::vector<uint8_t>>(std::move(mask));
                }
                break;
            }
            case ScheduleItem::Kind::Iter: {
                rt.kind = RtItem::Kind::Iter;
                auto info = std::make_shared<IterInfo>();
                info->steps = item.iterSteps;
                info->blockByStruct.resize(vp.structs.size());
                for (size_t si = 0; si < vp.structs.size(); ++si) {
                    CmdList acc;
                    for (Sym step : item.iterSteps) {
                        const CmdList& blk = vp.stepCommands(static_cast<int>(si), step);
                        acc.insert(acc.end(), blk.begin(), blk.end());
                    }
                    info->blockByStruct[si] =
                        std::make_shared<const CmdList>(std::move(acc));
                }
                rt.iter = std::move(info);
                break;
            }
        }
        out.push_back(std::move(rt));
    }
    return out;
}

ExecState Engine::initial_state() const {
    const ValidatedProgram& vp = *program_;
    ExecState st;
    st.schedule.assign(rtSchedule_.begin(), rtSchedule_.end());
    st.env.resize(vp.structs.size() + 1);
    for (size_t i = 0; i < vp.structs.size(); ++i) {
        StructInstance si;
        si.structIdx = static_cast<int>(i);
        si.params = defaultParams_[i];
        st.env[i] = std::move(si);
    }
    if (ext_.arrays) st.env[vp.nullArrayLabelId()] = ArrayInstance{0, 0};
    st.nextLabel = vp.firstFreshLabelId();
    st.memory.resize(1);  // address 0 reserved, never allocated
    return st;
}

bool Engine::done(const ExecState& st) const {
    for (const Slot& slot : st.env) {
        if (const auto* si = std::get_if<StructInstance>(&slot))
            if (si->busy()) return false;
    }
    return true;
}

// ---- enabledness --------------------------------------------------------------

bool Engine::commandEnabled(const ExecState& st, const StructInstance& si,
                            const Command& c, Rule* out) const {
    const std::vector<Value>& stack = si.stack;
    auto top = [&](size_t k) -> const Value& { return stack[stack.size() - 1 - k]; };
    switch (c.kind) {
        case CmdKind::Push: *out = Rule::ComPush; return true;
        case CmdKind::PushThis: *out = Rule::ComPushThis; return true;
        case CmdKind::Rd: {
            if (stack.empty() || !is_label(top(0))) return false;
            if (!st.instance(std::get<Label>(top(0)))) return false;
            *out = Rule::ComRd;
            return true;
        }
        case CmdKind::Wr: {
            if (stack.size() < 2 || !is_label(top(0))) return false;
            const StructInstance* target = st.instance(std::get<Label>(top(0)));
            if (!target) return false;
            bool isParam =
                program_->structs[target->structIdx].paramIndex(c.var) >= 0;
            bool isNull = program_->isNullLabel(std::get<Label>(top(0)));
            *out = (isNull && isParam) ? Rule::ComWrNSkip : Rule::ComWr;
            return true;
        }
        case CmdKind::Cons: {
            size_t n = program_->structs[c.structIdx].params.size();
            if (stack.size() < n) return false;
            *out = Rule::ComCons;
            return true;
        }
        case CmdKind::If: {
            if (stack.empty() || !is_bool(top(0))) return false;
            *out = std::get<bool>(top(0)) ? Rule::ComIfT : Rule::ComIfF;
            return true;
        }
        case CmdKind::Not: {
            if (stack.empty() || !is_bool(top(0))) return false;
            *out = Rule::ComNot;
            return true;
        }
        case CmdKind::Op: {
            if (stack.size() < 2) return false;
            if (!binop_operands_ok(c.op, top(1), top(0))) return false;
            *out = Rule::ComOp;
            return true;
        }
        case CmdKind::RdA: {
            if (stack.size() < 2 || !is_int(top(0)) || !is_label(top(1))) return false;
            if (!st.array(std::get<Label>(top(1)))) return false;
            *out = Rule::ComRdA;
            return true;
        }
        case CmdKind::WrA: {
            if (stack.size() < 3 || !is_int(top(0)) || !is_label(top(1))) return false;
            const ArrayInstance* arr = st.array(std::get<Label>(top(1)));
            if (!arr) return false;
            bool isNull = program_->isNullLabel(std::get<Label>(top(1)));
            *out = isNull ? Rule::ComWrASkip : Rule::ComWrA;
            return true;
        }
        case CmdKind::Asize: {
            if (stack.empty() || !is_label(top(0))) return false;
            if (!st.array(std::get<Label>(top(0)))) return false;
            *out = Rule::ComAsize;
            return true;
        }
        case CmdKind::Arr: {
            if (stack.empty() || !is_int(top(0))) return false;
            *out = Rule::ComArr;
            return true;
        }
    }
    return false;
}

std::optional<TransitionDescriptor> Engine::schedule_transition(
    const ExecState& st) const {
    if (st.schedule.empty()) return std::nullopt;
    const RtItem& head = st.schedule.front();
    bool isDone = done(st);
    auto mk = [](Rule r) { return TransitionDescriptor{r, Label{}}; };
    switch (head.kind) {
        case RtItem::Kind::GlobalCall:
            if (isDone) return mk(Rule::InitG);
            return std::nullopt;
        case RtItem::Kind::LocalCall:
            if (isDone) return mk(Rule::InitL);
            return std::nullopt;
        case RtItem::Kind::Fix:
            if (isDone) return mk(Rule::FixInit);
            return std::nullopt;
        case RtItem::Kind::AFix:
            if (!isDone) return std::nullopt;
            return mk(st.stability.back() ? Rule::FixTerm : Rule::FixIter);
        case RtItem::Kind::Iter:
            if (isDone) return mk(Rule::IterInit);
            return std::nullopt;
        case RtItem::Kind::AIter:
            if (st.stability.back()) {
                if (isDone) return mk(Rule::IterTerm);
                return std::nullopt;
            }
            if (iterIterPremise(st, *head.iter)) return mk(Rule::IterIter);
            return std::nullopt;
    }
    return std::nullopt;
}

bool Engine::iterIterPremise(const ExecState& st, const IterInfo& info) const {
    for (const Slot& slot : st.env) {
        const auto* si = std::get_if<StructInstance>(&slot);
        if (!si) continue;
        if (!si->busy() && !info.blockByStruct[si->structIdx]->empty()) return true;
    }
    return false;
}

std::vector<TransitionDescriptor> Engine::enabled_transitions(
    const ExecState& st) const {
    std::vector<TransitionDescriptor> out;
    for (uint32_t id = 0; id < st.env.size(); ++id) {
        const auto* si = std::get_if<StructInstance>(&st.env[id]);
        if (!si) continue;
        const Command* head = si->headCommand();
        if (!head) continue;
        Rule rule;
        if (commandEnabled(st, *si, *head, &rule))
            out.push_back(TransitionDescriptor{rule, Label{id}});
    }
    if (auto td = schedule_transition(st)) out.push_back(*td);
    return out;
}

// ---- transition application ------------------------------------------------------

int Engine::consumeHead(StructInstance& si) const {
    for (auto& f : si.frames) {
        if (f.remaining() > 0) {
            ++f.idx;
            break;
        }
    }
    int boundaries = 0;
    while (!si.frames.empty() && si.frames.front().remaining() == 0) {
        if (si.frames.front().blockBoundary) ++boundaries;
        si.frames.pop_front();
    }
    return boundaries;
}

uint32_t Engine::allocateLabel(ExecState& st) const {
    uint32_t id = st.nextLabel;
    st.nextLabel = static_cast<uint32_t>(static_cast<int64_t>(st.nextLabel) +
                                         st.allocStep);
    if (id >= st.env.size()) st.env.resize(id + 1);
    st.creationOrder.push_back(id);
    return id;
}

struct Engine::CommandCtx {
    RunOptions* opt = nullptr;
    RunResult* sink = nullptr;
    std::vector<AccessRecord>* accessSink = nullptr;
};

namespace {

// Conjoins every stability entry with su. With the param-fix extension a
// changed parameter resets an entry only when relevant at that level;
// paramKey < 0 means "relevant everywhere" (plain writes, array cells).
void conjoin_stability(ExecState& st, bool paramFix, bool su, int paramKey) {
    if (su) return;
    for (size_t k = 0; k < st.stability.size(); ++k) {
        if (paramFix && paramKey >= 0) {
            bool relevant = k < st.sf.size() ? st.sf[k].relevant(paramKey) : true;
            if (!relevant) continue;
        }
        st.stability[k] = 0;
    }
}

}  // namespace

int Engine::applyCommand(ExecState& st, Label actor, RunOptions* opt,
                         RunResult* sink) const {
    int boundaries = 0;
    CommandCtx ctx;
    ctx.opt = opt;
    ctx.sink = sink;
    if (sink && opt && opt->recordAccesses && !sink->windows.empty())
        ctx.accessSink = &sink->windows.back().accesses;

    StructInstance* si = st.instance(actor);
    if (!si || !si->busy()) throw std::logic_error("applyCommand: actor not busy");
    const Command cmd = *si->headCommand();  // copy: frames mutate below
    Rule rule;
    if (!commandEnabled(st, *si, cmd, &rule))
        throw std::logic_error("applyCommand: head command not enabled");

    auto& stack = si->stack;
    bool traceOn = opt && opt->recordTrace && sink;
    bool hasTarget = false;
    Label target{};
    Sym targetVar = 0;
    int64_t targetIndex = -1;
    bool changed = false;

    switch (rule) {
        case Rule::ComPush:
            boundaries += consumeHead(*si);
            stack.push_back(cmd.value);
            break;
        case Rule::ComPushThis:
            boundaries += consumeHead(*si);
            stack.push_back(actor);
            break;
        case Rule::ComRd: {
            Label l2 = std::get<Label>(stack.back());
            StructInstance* tgt = st.instance(l2);
            int pi = program_->structs[tgt->structIdx].paramIndex(cmd.var);
            Value v;
            if (pi >= 0) {
                v = tgt->params[pi];
                if (ctx.accessSink)
                    ctx.accessSink->push_back(
                        {actor, l2, false, cmd.var, 0, /*isWrite=*/false});
            } else {
                const Value* lv = tgt->findLocal(cmd.var);
                if (!lv)
                    throw std::logic_error(
                        "engine defect: read of undefined variable '" +
                        program_->syms->name(cmd.var) + "'");
                v = *lv;
            }
            boundaries += consumeHead(*si);
            stack.back() = std::move(v);
            hasTarget = true;
            target = l2;
            targetVar = cmd.var;
            break;
        }
        case Rule::ComWr:
        case Rule::ComWrNSkip: {
            Label l2 = std::get<Label>(stack.back());
            Value v = std::move(stack[stack.size() - 2]);
            StructInstance* tgt = st.instance(l2);
            int pi = program_->structs[tgt->structIdx].paramIndex(cmd.var);
            boundaries += consumeHead(*si);
            stack.pop_back();
            stack.pop_back();
            hasTarget = true;
            target = l2;
            targetVar = cmd.var;
            if (rule == Rule::ComWrNSkip) break;  // write to a null parameter: dropped
            if (pi >= 0) {
                bool su = tgt->params[pi] == v;
                changed = !su;
                tgt->params[pi] = std::move(v);
                if (ctx.accessSink)
                    ctx.accessSink->push_back(
                        {actor, l2, false, cmd.var, 0, /*isWrite=*/true});
                conjoin_stability(st, ext_.paramFix, su,
                                  program_->paramKeyOf[tgt->structIdx][pi]);
            } else {
                tgt->setLocal(cmd.var, std::move(v));  // su holds: x not a parameter
            }
            break;
        }
        case Rule::ComNot: {
            boundaries += consumeHead(*si);
            stack.back() = !std::get<bool>(stack.back());
            break;
        }
        case Rule::ComOp: {
            Value r = eval_binop(cmd.op, stack[stack.size() - 2], stack.back());
            boundaries += consumeHead(*si);
            stack.pop_back();
            stack.back() = std::move(r);
            break;
        }
        case Rule::ComCons: {
            const StructInfo& info = program_->structs[cmd.structIdx];
            size_t n = info.params.size();
            uint32_t fresh = allocateLabel(st);
            si = st.instance(actor);  // env may have been resized
            StructInstance inst;
            inst.structIdx = cmd.structIdx;
            inst.params = defaultParams_[cmd.structIdx];
            for (size_t i = 0; i < n; ++i)
                inst.params[i] = std::move(si->stack[si->stack.size() - n + i]);
            st.env[fresh] = std::move(inst);
            boundaries += consumeHead(*si);
            si->stack.resize(si->stack.size() - n);
            si->stack.push_back(Label{fresh});
            // new struct instances reset every active fixpoint
            std::fill(st.stability.begin(), st.stability.end(), uint8_t{0});
            hasTarget = true;
            target = Label{fresh};
            break;
        }
        case Rule::ComIfT: {
            boundaries += consumeHead(*si);
            stack.pop_back();
            if (cmd.body && !cmd.body->empty())
                si->frames.push_front(Frame{cmd.body, 0, false});
            break;
        }
        case Rule::ComIfF: {
            boundaries += consumeHead(*si);
            stack.pop_back();
            break;
        }
        case Rule::ComRdA: {
            int64_t idx = std::get<int64_t>(stack.back());
            Label l2 = std::get<Label>(stack[stack.size() - 2]);
            const ArrayInstance* arr = st.array(l2);
            if (program_->isNullLabel(l2))
                throw EngineFault{FaultKind::NullArrayAccess,
                                  "read through the null array"};
            if (idx < 0 || idx >= arr->size)
                throw EngineFault{FaultKind::IndexOutOfBounds,
                                  "array read index " + std::to_string(idx) +
                                      " out of bounds (size " +
                                      std::to_string(arr->size) + ")"};
            Value v = st.memory[arr->addr + idx];
            boundaries += consumeHead(*si);
            stack.pop_back();
            stack.back() = std::move(v);
            if (ctx.accessSink)
                ctx.accessSink->push_back({actor, l2, true, 0, idx, false});
            hasTarget = true;
            target = l2;
            targetIndex = idx;
            break;
        }
        case Rule::ComWrA:
        case Rule::ComWrASkip: {
            int64_t idx = std::get<int64_t>(stack.back());
            Label l2 = std::get<Label>(stack[stack.size() - 2]);
            Value v = std::move(stack[stack.size() - 3]);
            hasTarget = true;
            target = l2;
            targetIndex = idx;
            if (rule == Rule::ComWrASkip) {
                if (opt && opt->strictNullArray)
                    throw EngineFault{FaultKind::NullArrayWrite,
                                      "write through the null array"};
                boundaries += consumeHead(*si);
                stack.resize(stack.size() - 3);
                if (sink)
                    sink->warnings.push_back(
                        "write through the null array skipped");
                break;
            }
            const ArrayInstance* arr = st.array(l2);
            if (idx < 0 || idx >= arr->size)
                throw EngineFault{FaultKind::IndexOutOfBounds,
                                  "array write index " + std::to_string(idx) +
                                      " out of bounds (size " +
                                      std::to_string(arr->size) + ")"};
            bool su = st.memory[arr->addr + idx] == v;
            changed = !su;
            st.memory[arr->addr + idx] = std::move(v);
            boundaries += consumeHead(*si);
            stack.resize(stack.size() - 3);
            if (ctx.accessSink)
                ctx.accessSink->push_back({actor, l2, true, 0, idx, true});
            // array cells act as parameters, relevant at every fixpoint level
            conjoin_stability(st, ext_.paramFix, su, -1);
            break;
        }
        case Rule::ComAsize: {
            Label l2 = std::get<Label>(stack.back());
            int64_t size = st.array(l2)->size;
            boundaries += consumeHead(*si);
            stack.back() = size;
            hasTarget = true;
            target = l2;
            break;
        }
        case Rule::ComArr: {
            int64_t size = std::get<int64_t>(stack.back());
            if (size < 1)
                throw EngineFault{FaultKind::BadArraySize,
                                  "array size must be at least 1, got " +
                                      std::to_string(size)};
            uint64_t addr = st.memory.size();
            st.memory.resize(st.memory.size() + static_cast<size_t>(size),
                             cmd.arrDefault);
            uint32_t fresh = allocateLabel(st);
            si = st.instance(actor);
            st.env[fresh] = ArrayInstance{addr, size};
            boundaries += consumeHead(*si);
            si->stack.back() = Label{fresh};
            hasTarget = true;
            target = Label{fresh};
            break;
        }
        default: throw std::logic_error("applyCommand: not a command rule");
    }

    if (traceOn)
        traceCommand(sink, opt, rule, actor, cmd, st, hasTarget, target, targetVar,
                     targetIndex, changed);
    return boundaries;
}

void Engine::applySchedule(ExecState& st, const TransitionDescriptor& td,
                           RunOptions* opt, RunResult* sink) const {
    const RtItem head = st.schedule.front();  // copy; schedule mutates below
    switch (td.rule) {
        case Rule::InitG:
        case Rule::InitL: {
            st.schedule.pop_front();
            ptrdiff_t count = static_cast<ptrdiff_t>(st.env.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (count > 16384)
#endif
            for (ptrdiff_t id = 0; id < count; ++id) {
                auto* si = std::get_if<StructInstance>(&st.env[id]);
                if (!si) continue;
                if (td.rule == Rule::InitL && si->structIdx != head.structIdx)
                    continue;
                si->frames.clear();
                si->stack.clear();
                CmdBlock block = program_->stepBlock(si->structIdx, head.stepSym);
                if (!block->empty()) si->frames.push_back(Frame{block, 0, true});
            }
            break;
        }
        case Rule::FixInit: {
            st.schedule.pop_front();
            RtItem marker;
            marker.kind = RtItem::Kind::AFix;
            marker.fixBody = head.fixBody;
            marker.fixMask = head.fixMask;
            st.schedule.push_front(std::move(marker));
            st.schedule.insert(st.schedule.begin(), head.fixBody->begin(),
                               head.fixBody->end());
            st.stability.push_back(1);
            if (ext_.paramFix) {
                SfLevel level;
                if (head.fixMask) {
                    level.allTrue = false;
                    level.mask = head.fixMask;
                }
                st.sf.resize(st.stability.size());
                st.sf[st.stability.size() - 1] = std::move(level);
            }
            break;
        }
        case Rule::FixIter: {
            st.schedule.insert(st.schedule.begin(), head.fixBody->begin(),
                               head.fixBody->end());
            st.stability.back() = 1;
            break;
        }
        case Rule::FixTerm: {
            st.schedule.pop_front();
            st.stability.pop_back();
            break;
        }
        case Rule::IterInit: {
            st.schedule.front().kind = RtItem::Kind::AIter;
            for (Slot& slot : st.env) {
                auto* si = std::get_if<StructInstance>(&slot);
                if (!si) continue;
                si->frames.clear();
                si->stack.clear();
                CmdBlock block = head.iter->blockByStruct[si->structIdx];
                if (!block->empty()) si->frames.push_back(Frame{block, 0, true});
            }
            st.stability.push_back(1);
            if (ext_.paramFix) {
                st.sf.resize(st.stability.size());
                st.sf[st.stability.size() - 1] = SfLevel{};  // all-true
            }
            break;
        }
        case Rule::IterIter: {
            for (Slot& slot : st.env) {
                auto* si = std::get_if<StructInstance>(&slot);
                if (!si) continue;
                CmdBlock block = head.iter->blockByStruct[si->structIdx];
                if (block->empty()) continue;
                if (si->endsWithBlock(*block)) continue;
                si->frames.push_back(Frame{block, 0, true});
            }
            st.stability.back() = 1;
            break;
        }
        case Rule::IterTerm: {
            st.schedule.pop_front();
            st.stability.pop_back();
            break;
        }
        default: throw std::logic_error("applySchedule: not a schedule rule");
    }
    if (opt && opt->recordTrace && sink) traceSchedule(sink, opt, td.rule, st);
}

void Engine::apply(ExecState& st, const TransitionDescriptor& td, RunOptions* opt,
                   RunResult* sink) const {
    if (td.isSchedule()) {
        auto enabled = schedule_transition(st);
        if (!enabled || enabled->rule != td.rule)
            throw std::logic_error("apply: schedule transition not enabled");
        applySchedule(st, td, opt, sink);
        return;
    }
    applyCommand(st, td.actor, opt, sink);
}

// ---- tracing ---------------------------------------------------------------------

void Engine::traceCommand(RunResult* sink, RunOptions* opt, Rule rule, Label actor,
                          const Command& cmd, const ExecState& st, bool hasTarget,
                          Label target, Sym var, int64_t index, bool changed) const {
    (void)opt;
    TraceEvent ev;
    ev.rule = rule;
    ev.hasActor = true;
    ev.actor = actor;
    {
        std::string s =
            render_commands(CmdList{cmd}, *program_->syms, nullNames_, 0);
        // single-line form: collapse If bodies
        if (cmd.kind == CmdKind::If) s = "If(...)";
        if (!s.empty() && s.back() == '\n') s.pop_back();
        ev.command = std::move(s);
    }
    ev.hasTarget = hasTarget;
    ev.target = target;
    ev.targetVar = var;
    ev.targetIndex = index;
    ev.changedParam = changed;
    ev.stabilityAfter = st.stability;
    sink->trace.push_back(std::move(ev));
}

void Engine::traceSchedule(RunResult* sink, RunOptions* opt, Rule rule,
                           const ExecState& st) const {
    (void)opt;
    TraceEvent ev;
    ev.rule = rule;
    ev.stabilityAfter = st.stability;
    sink->trace.push_back(std::move(ev));
}

std::string trace_to_jsonl(const std::vector<TraceEvent>& trace, bool paramFix,
                           const SymbolTable& syms) {
    std::ostringstream os;
    for (const TraceEvent& ev : trace) {
        nlohmann::json j;
        j["rule"] = rule_name(ev.rule, paramFix);
        if (ev.hasActor) {
            j["actor"] = ev.actor.id;
            j["command"] = ev.command;
        }
        if (ev.hasTarget) {
            nlohmann::json t;
            t["label"] = ev.target.id;
            switch (ev.rule) {
                case Rule::ComRd:
                case Rule::ComWr:
                case Rule::ComWrNSkip: t["var"] = syms.name(ev.targetVar); break;
                case Rule::ComRdA:
                case Rule::ComWrA:
                case Rule::ComWrASkip: t["index"] = ev.targetIndex; break;
                default: break;
            }
            j["target"] = std::move(t);
            j["changed"] = ev.changedParam;
        }
        nlohmann::json stab = nlohmann::json::array();
        for (uint8_t b : ev.stabilityAfter) stab.push_back(b != 0);
        j["stability"] = std::move(stab);
        os << j.dump() << "\n";
    }
    return os.str();
}

}  // namespace audala
