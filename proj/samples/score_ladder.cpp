// Transpiles one benchmark across every builtin architecture and prints the
// selected-score ladder, the minimal version of what `qabench run` does.

#include <cstdio>

#include "qabench/benchgen.hpp"
#include "qabench/scoring.hpp"
#include "qabench/transpiler.hpp"

using namespace qabench;

int main() {
    Circuit bench = make_benchmark("qft_12");
    Circuit native = decompose_to_native(bench);
    double base = score_simplified(native);

    std::printf("%-4s %6s %8s %8s %10s\n", "arch", "c", "gates", "depth", "norm_score");
    for (const auto& name : builtin_names()) {
        Architecture arch = builtin(name);

        TranspileOutcome best;
        double best_score = 0.0;
        bool have = false;
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            TranspileConfig cfg;
            cfg.router = Router::Sabre;
            cfg.opt_level = 3;
            cfg.seed = seed;
            TranspileOutcome out = transpile(bench, arch, cfg);
            double s = score_simplified(out.circuit);
            if (!have || s < best_score) {
                best = std::move(out);
                best_score = s;
                have = true;
            }
        }

        std::printf("%-4s %6.2f %8llu %8llu %10.3f\n", name.c_str(), connectivity(arch),
                    static_cast<unsigned long long>(tally_gates(best.circuit).total()),
                    static_cast<unsigned long long>(depth(best.circuit)), best_score / base);
    }
    return 0;
}
