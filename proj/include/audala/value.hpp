#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace audala {

// Opaque struct-instance / array-instance identifier. Null labels occupy a
// reserved low range (one per struct type, plus the null array); fresh labels
// come from the engine's allocator.
struct Label {
    uint32_t id = UINT32_MAX;
    bool operator==(const Label&) const = default;
};

// The value universe: integers (Nat and Int share the carrier), Booleans,
// strings and labels.
using Value = std::variant<int64_t, bool, std::string, Label>;

inline bool is_int(const Value& v) { return std::holds_alternative<int64_t>(v); }
inline bool is_bool(const Value& v) { return std::holds_alternative<bool>(v); }
inline bool is_label(const Value& v) { return std::holds_alternative<Label>(v); }

}  // namespace audala
