#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace audala {

using Sym = uint32_t;

// Interned identifier table shared by the AST, the command IR and the engine.
class SymbolTable {
public:
    Sym intern(std::string_view name) {
        auto it = index_.find(std::string(name));
        if (it != index_.end()) return it->second;
        Sym id = static_cast<Sym>(names_.size());
        names_.emplace_back(name);
        index_.emplace(names_.back(), id);
        return id;
    }

    const std::string& name(Sym s) const { return names_[s]; }
    size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Sym> index_;
};

}  // namespace audala
