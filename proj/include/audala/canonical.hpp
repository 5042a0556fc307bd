#pragma once

#include <string>
#include <vector>

#include "audala/state.hpp"

namespace audala {

// Canonical label renumbering (Def. of determinism modulo labels): null
// labels stay fixed, fresh labels are renumbered by creation order, and
// array storage is relocated to canonical addresses. Two states are equal
// modulo newly assigned labels iff their canonical forms render identically.
struct CanonicalMap {
    std::vector<uint32_t> oldToNew;  // indexed by old label id
    uint32_t map(Label l) const {
        return l.id < oldToNew.size() ? oldToNew[l.id] : l.id;
    }
};

CanonicalMap canonical_map(const ExecState& st, const ValidatedProgram& vp);
ExecState canonicalize(const ExecState& st, const ValidatedProgram& vp);

// Stable textual form of the canonicalized state.
std::string render_canonical(const ExecState& st, const ValidatedProgram& vp);

// Final parameter values of all non-null struct instances in canonical label
// order; the `run` report body.
std::string render_final_values(const ExecState& st, const ValidatedProgram& vp);

// Renders one value against an already-canonical state (labels as @k or
// null_<T>; array labels expand to their cells).
std::string render_canonical_value(const Value& v, const ExecState& canon,
                                   const ValidatedProgram& vp);

}  // namespace audala
