#include "audala/race.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"

namespace audala {

std::vector<RaceReport> detect_races(const StepWindow& window) {
    struct Touch {
        std::set<uint32_t> writers;
        std::set<uint32_t> readers;
    };
    // location: (target label, kind, var-or-index)
    std::map<std::tuple<uint32_t, bool, uint64_t>, Touch> byLoc;
    for (const AccessRecord& a : window.accesses) {
        uint64_t slot = a.isArrayCell ? static_cast<uint64_t>(a.index)
                                      : static_cast<uint64_t>(a.var);
        Touch& t = byLoc[{a.target.id, a.isArrayCell, slot}];
        (a.isWrite ? t.writers : t.readers).insert(a.accessor.id);
    }
    std::vector<RaceReport> out;
    for (const auto& [key, t] : byLoc) {
        if (t.writers.empty()) continue;
        std::set<uint32_t> accessors = t.writers;
        accessors.insert(t.readers.begin(), t.readers.end());
        if (accessors.size() < 2) continue;
        RaceReport r;
        r.stepSym = window.stepSym;
        r.ordinal = window.ordinal;
        r.target = Label{std::get<0>(key)};
        r.isArrayCell = std::get<1>(key);
        if (r.isArrayCell)
            r.index = static_cast<int64_t>(std::get<2>(key));
        else
            r.var = static_cast<Sym>(std::get<2>(key));
        r.writeWrite = t.writers.size() >= 2;
        for (uint32_t rd : t.readers)
            if (!t.writers.count(rd)) r.readWrite = true;
        // a lone writer plus readers that all equal the writer is not a race;
        // guarded by the distinct-accessor check above
        r.writers.assign(t.writers.begin(), t.writers.end());
        r.readers.assign(t.readers.begin(), t.readers.end());
        if (r.writeWrite || r.readWrite) out.push_back(std::move(r));
    }
    return out;
}

std::vector<RaceReport> detect_races(const std::vector<StepWindow>& windows) {
    std::vector<RaceReport> out;
    for (const StepWindow& w : windows) {
        std::vector<RaceReport> part = detect_races(w);
        out.insert(out.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return out;
}

std::string races_to_json(const std::vector<RaceReport>& races,
                          const ValidatedProgram& vp, const CanonicalMap& map) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RaceReport& r : races) {
        nlohmann::json j;
        j["step"] = vp.syms->name(r.stepSym);
        j["execution"] = r.ordinal;
        j["target"] = map.map(r.target);
        if (r.isArrayCell)
            j["cell"] = r.index;
        else
            j["parameter"] = vp.syms->name(r.var);
        nlohmann::json kinds = nlohmann::json::array();
        if (r.writeWrite) kinds.push_back("write-write");
        if (r.readWrite) kinds.push_back("read-write");
        j["kind"] = std::move(kinds);
        nlohmann::json ws = nlohmann::json::array();
        for (uint32_t w : r.writers) ws.push_back(map.map(Label{w}));
        j["writers"] = std::move(ws);
        nlohmann::json rs = nlohmann::json::array();
        for (uint32_t rd : r.readers) rs.push_back(map.map(Label{rd}));
        j["readers"] = std::move(rs);
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

}  // namespace audala
