// Compares the serial lockstep policy against the OpenMP-backed parallel
// policy on generated reachability programs, and checks that both reach the
// same canonical final state.

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>

#include "audala/canonical.hpp"
#include "audala/engine.hpp"
#include "audala/wellformed.hpp"

namespace {

using namespace audala;

// A reachability instance over a long chain with extra skip edges; node 1 is
// the root. Large enough node counts give the parallel round phases work.
std::string makeProgram(int nodes) {
    std::ostringstream os;
    os << "struct Node (reach: Bool) {}\n\n";
    os << "struct Edge (in: Node, out: Node) {\n";
    os << "    reachability {\n";
    os << "        if (in.reach = true) then {\n";
    os << "            out.reach := true;\n";
    os << "        }\n";
    os << "    }\n";
    os << "    init {\n";
    for (int i = 1; i <= nodes; ++i)
        os << "        Node n" << i << " := Node(" << (i == 1 ? "true" : "false")
           << ");\n";
    for (int i = 1; i < nodes; ++i)
        os << "        Edge e" << i << " := Edge(n" << i << ", n" << (i + 1) << ");\n";
    for (int i = 1; i + 10 <= nodes; i += 7)
        os << "        Edge s" << i << " := Edge(n" << i << ", n" << (i + 10)
           << ");\n";
    os << "    }\n}\n\n";
    os << "init < Fix(reachability)\n";
    return os.str();
}

double runOnce(const Engine& eng, PolicyConfig policy, std::string* canon) {
    RunOptions opt;
    opt.policy = policy;
    auto t0 = std::chrono::steady_clock::now();
    RunResult rr = eng.run(std::move(opt));
    auto t1 = std::chrono::steady_clock::now();
    if (rr.status != RunStatus::Completed) {
        std::cerr << "run did not complete\n";
        std::exit(1);
    }
    if (canon) *canon = render_canonical(rr.finalState, eng.program());
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int nodes = argc > 1 ? std::stoi(argv[1]) : 2000;
    int reps = argc > 2 ? std::stoi(argv[2]) : 3;

    ValidateResult vr = frontend(makeProgram(nodes), Extensions{});
    if (!vr.program) {
        std::cerr << render_diagnostics(vr.errors);
        return 1;
    }
    Engine eng(vr.program, Extensions{});

    std::string serialCanon, parallelCanon;
    double serialBest = 1e300, parallelBest = 1e300;
    for (int r = 0; r < reps; ++r) {
        serialBest = std::min(serialBest,
                              runOnce(eng, PolicyConfig::lockstep(), &serialCanon));
        parallelBest = std::min(
            parallelBest, runOnce(eng, PolicyConfig::parallel(), &parallelCanon));
    }

    std::cout << "nodes " << nodes << "\n";
    std::cout << "lockstep (serial reference)  " << serialBest << " ms\n";
    std::cout << "parallel (OpenMP rounds)     " << parallelBest << " ms\n";
    std::cout << "speedup " << serialBest / parallelBest << "x\n";
    if (serialCanon != parallelCanon) {
        std::cerr << "FAIL: canonical final states differ\n";
        return 1;
    }
    std::cout << "canonical final states identical\n";
    return 0;
}
