#pragma once

#include <string>
#include <vector>

#include "audala/canonical.hpp"
#include "audala/engine.hpp"

namespace audala {

// A race condition: within one step-execution window, a parameter (or array
// cell) accessed by two distinct struct instances with at least one write.
// Skipped writes to null parameters are not accesses.
struct RaceReport {
    Sym stepSym = 0;
    int ordinal = 0;  // which execution of the step, 1-based
    Label target;
    bool isArrayCell = false;
    Sym var = 0;
    int64_t index = 0;
    bool writeWrite = false;  // two distinct writers
    bool readWrite = false;   // a writer and a distinct reader
    std::vector<uint32_t> writers;
    std::vector<uint32_t> readers;
};

std::vector<RaceReport> detect_races(const StepWindow& window);
std::vector<RaceReport> detect_races(const std::vector<StepWindow>& windows);

std::string races_to_json(const std::vector<RaceReport>& races,
                          const ValidatedProgram& vp, const CanonicalMap& map);

}  // namespace audala
