// Builds a small custom architecture, routes a GHZ circuit onto it, and
// checks the result against the abstract circuit.

#include <iostream>
#include <sstream>

#include "qabench/arch.hpp"
#include "qabench/qasm.hpp"
#include "qabench/simulator.hpp"
#include "qabench/transpiler.hpp"

using namespace qabench;

int main() {
    Architecture ring("ring6", 6, Family::Custom, 30,
                      {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}});

    Circuit ghz(6, 6);
    ghz.h(0);
    for (std::uint32_t q = 0; q + 1 < 6; ++q) ghz.cx(q, q + 1);
    for (std::uint32_t q = 0; q < 6; ++q) ghz.measure(q, q);

    TranspileConfig cfg;
    cfg.router = Router::Sabre;
    cfg.opt_level = 2;
    TranspileOutcome out = transpile(ghz, ring, cfg);

    std::cout << "routed on " << ring.name << ": " << out.circuit.ops.size() << " ops, "
              << out.swaps_inserted << " swaps, fidelity "
              << equivalence(ghz, out.circuit, out.final_layout) << "\n\n";

    std::ostringstream arch_text;
    save_architecture(ring, arch_text);
    std::cout << arch_text.str() << "\n" << serialize_qasm(out.circuit);
    return 0;
}
