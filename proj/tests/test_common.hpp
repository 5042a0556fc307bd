#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "audala/desugar.hpp"
#include "audala/parser.hpp"
#include "audala/wellformed.hpp"

namespace audala::test {

inline std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "cannot open " << path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string corpus(const std::string& name) {
    return readFile(std::string(CORPUS_DIR) + "/" + name);
}

inline std::shared_ptr<ValidatedProgram> mustValidate(const std::string& source,
                                                      Extensions ext = {}) {
    ValidateResult vr = frontend(source, ext);
    REQUIRE_MESSAGE(vr.program != nullptr, render_diagnostics(vr.errors));
    return vr.program;
}

inline std::shared_ptr<ValidatedProgram> mustValidateCorpus(const std::string& name,
                                                            Extensions ext = {}) {
    return mustValidate(corpus(name), ext);
}

}  // namespace audala::test
