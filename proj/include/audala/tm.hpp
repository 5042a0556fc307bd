#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace audala {

// Deterministic Turing machine, normalized so that Q and Gamma are integers
// with q0 = 0 and blank B = 0.
struct TMTransition {
    int64_t nextState = 0;
    int64_t writeSymbol = 0;
    bool moveRight = true;
};

struct TuringMachine {
    std::set<int64_t> states;     // contains 0
    std::set<int64_t> accepting;  // subset of states
    std::set<int64_t> sigma;      // input symbols; nonzero
    std::map<std::pair<int64_t, int64_t>, TMTransition> delta;

    bool isAccepting(int64_t q) const { return accepting.count(q) != 0; }
};

// Head-relative configuration: cell 0 is the head; only nonzero cells are
// stored, so equality is equality of normalized tapes.
struct TMConfiguration {
    int64_t state = 0;
    std::map<int64_t, int64_t> tape;

    int64_t at(int64_t i) const {
        auto it = tape.find(i);
        return it == tape.end() ? 0 : it->second;
    }
    void set(int64_t i, int64_t sym) {
        if (sym == 0)
            tape.erase(i);
        else
            tape[i] = sym;
    }
    bool operator==(const TMConfiguration&) const = default;
};

TMConfiguration tm_initial_configuration(const std::vector<int64_t>& input);

// One transition per the tape-shift definition; nullopt when delta is
// undefined at (state, head symbol), i.e. the machine halts.
std::optional<TMConfiguration> tm_step(const TMConfiguration& c,
                                       const TuringMachine& tm);

struct TMParseError {
    std::string message;
};

// JSON format: {"states": [...], "accepting": [...],
//               "delta": [[q, s, q', s', "L"|"R"], ...], "input": [...]}
// Optional "sigma" overrides the derived input alphabet. Throws TMParseError.
TuringMachine tm_from_json(const std::string& text, std::vector<int64_t>& inputOut);
std::string tm_to_json(const TuringMachine& tm, const std::vector<int64_t>& input);

// Random machines for the differential harness.
TuringMachine random_tm(std::mt19937_64& rng, int maxStates, int maxTapeSymbols);
std::vector<int64_t> random_input(std::mt19937_64& rng, const TuringMachine& tm,
                                  int maxLen);

std::string render_configuration(const TMConfiguration& c);

}  // namespace audala
