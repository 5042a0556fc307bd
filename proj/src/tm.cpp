#include "audala/tm.hpp"

#include <sstream>

#include "json.hpp"

namespace audala {

TMConfiguration tm_initial_configuration(const std::vector<int64_t>& input) {
    TMConfiguration c;
    c.state = 0;
    for (size_t i = 0; i < input.size(); ++i)
        c.set(static_cast<int64_t>(i), input[i]);
    return c;
}

std::optional<TMConfiguration> tm_step(const TMConfiguration& c,
                                       const TuringMachine& tm) {
    auto it = tm.delta.find({c.state, c.at(0)});
    if (it == tm.delta.end()) return std::nullopt;
    const TMTransition& tr = it->second;
    TMConfiguration next;
    next.state = tr.nextState;
    if (tr.moveRight) {
        // t'(i) = t(i+1) everywhere, then t'(-1) = s'
        for (const auto& [pos, sym] : c.tape) next.set(pos - 1, sym);
        next.set(-1, tr.writeSymbol);
    } else {
        for (const auto& [pos, sym] : c.tape) next.set(pos + 1, sym);
        next.set(1, tr.writeSymbol);
    }
    return next;
}

TuringMachine tm_from_json(const std::string& text, std::vector<int64_t>& inputOut) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw TMParseError{std::string("invalid JSON: ") + e.what()};
    }
    TuringMachine tm;
    try {
        for (const auto& q : j.at("states")) tm.states.insert(q.get<int64_t>());
        for (const auto& q : j.at("accepting")) tm.accepting.insert(q.get<int64_t>());
        for (const auto& row : j.at("delta")) {
            if (!row.is_array() || row.size() != 5)
                throw TMParseError{"delta rows must be [q, s, q', s', \"L\"|\"R\"]"};
            int64_t q = row[0].get<int64_t>();
            int64_t s = row[1].get<int64_t>();
            TMTransition tr;
            tr.nextState = row[2].get<int64_t>();
            tr.writeSymbol = row[3].get<int64_t>();
            std::string dir = row[4].get<std::string>();
            if (dir != "L" && dir != "R")
                throw TMParseError{"direction must be \"L\" or \"R\""};
            tr.moveRight = dir == "R";
            if (tm.delta.count({q, s}))
                throw TMParseError{"delta defined twice for (" + std::to_string(q) +
                                   ", " + std::to_string(s) + ")"};
            tm.delta[{q, s}] = tr;
        }
        inputOut.clear();
        for (const auto& s : j.at("input")) inputOut.push_back(s.get<int64_t>());
        if (j.contains("sigma"))
            for (const auto& s : j.at("sigma")) tm.sigma.insert(s.get<int64_t>());
    } catch (const nlohmann::json::exception& e) {
        throw TMParseError{std::string("malformed TM spec: ") + e.what()};
    }
    if (!tm.states.count(0)) throw TMParseError{"states must contain the start state 0"};
    for (int64_t q : tm.accepting)
        if (!tm.states.count(q))
            throw TMParseError{"accepting state " + std::to_string(q) +
                               " is not in states"};
    for (const auto& [key, tr] : tm.delta) {
        if (!tm.states.count(key.first) || !tm.states.count(tr.nextState))
            throw TMParseError{"delta references an unknown state"};
    }
    if (tm.sigma.empty()) {
        // derive the input alphabet: every nonzero symbol mentioned anywhere
        for (const auto& [key, tr] : tm.delta) {
            if (key.second != 0) tm.sigma.insert(key.second);
            if (tr.writeSymbol != 0) tm.sigma.insert(tr.writeSymbol);
        }
        for (int64_t s : inputOut)
            if (s != 0) tm.sigma.insert(s);
    }
    if (tm.sigma.count(0)) throw TMParseError{"sigma may not contain the blank 0"};
    return tm;
}

std::string tm_to_json(const TuringMachine& tm, const std::vector<int64_t>& input) {
    nlohmann::json j;
    j["states"] = tm.states;
    j["accepting"] = tm.accepting;
    nlohmann::json delta = nlohmann::json::array();
    for (const auto& [key, tr] : tm.delta)
        delta.push_back({key.first, key.second, tr.nextState, tr.writeSymbol,
                         tr.moveRight ? "R" : "L"});
    j["delta"] = std::move(delta);
    j["input"] = input;
    j["sigma"] = tm.sigma;
    return j.dump(2);
}

TuringMachine random_tm(std::mt19937_64& rng, int maxStates, int maxTapeSymbols) {
    TuringMachine tm;
    auto pick = [&](int64_t lo, int64_t hi) {
        return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
    };
    int64_t numStates = pick(1, maxStates);
    int64_t numSymbols = pick(2, maxTapeSymbols);  // incl. blank
    for (int64_t q = 0; q < numStates; ++q) tm.states.insert(q);
    for (int64_t s = 1; s < numSymbols; ++s) tm.sigma.insert(s);
    for (int64_t q : tm.states)
        if (pick(0, 2) == 0) tm.accepting.insert(q);
    for (int64_t q = 0; q < numStates; ++q) {
        for (int64_t s = 0; s < numSymbols; ++s) {
            if (pick(0, 3) == 0) continue;  // leave some entries undefined
            TMTransition tr;
            tr.nextState = pick(0, numStates - 1);
            tr.writeSymbol = pick(0, numSymbols - 1);
            tr.moveRight = pick(0, 1) == 1;
            tm.delta[{q, s}] = tr;
        }
    }
    return tm;
}

std::vector<int64_t> random_input(std::mt19937_64& rng, const TuringMachine& tm,
                                  int maxLen) {
    std::vector<int64_t> sigma(tm.sigma.begin(), tm.sigma.end());
    if (sigma.empty()) sigma.push_back(1);
    std::uniform_int_distribution<size_t> lenDist(1, static_cast<size_t>(maxLen));
    std::uniform_int_distribution<size_t> symDist(0, sigma.size() - 1);
    std::vector<int64_t> input(lenDist(rng));
    for (int64_t& s : input) s = sigma[symDist(rng)];
    return input;
}

std::string render_configuration(const TMConfiguration& c) {
    std::ostringstream os;
    os << "(q=" << c.state << ", tape={";
    bool first = true;
    for (const auto& [pos, sym] : c.tape) {
        if (!first) os << ", ";
        first = false;
        os << pos << ":" << sym;
    }
    os << "})";
    return os.str();
}

}  // namespace audala
