#pragma once

// Depth-weighted error scoring. Gates carry uniform per-kind error rates;
// a circuit's average error is the count-weighted mean over its one- and
// two-qubit gates, and the two scores weight that by depth:
//   full:       beta * (1 - (1 - avg_error)^depth)
//   simplified: depth * avg_error
// Lower is better. Barriers never count; measurements are excluded unless
// include_measure is set (they still occupy depth layers).

#include <cmath>

#include "qabench/circuit.hpp"

namespace qabench {

struct ErrorModel {
    double e1q = 3.8e-4;
    double e2q = 6.4e-3;
    double beta = 1.0;
    bool include_measure = false;

    void check() const {
        if (!(e1q >= 0 && e1q < 1) || !(e2q >= 0 && e2q < 1))
            throw Error("error model: rates must lie in [0,1)");
        if (!(beta > 0)) throw Error("error model: beta must be positive");
    }
};

inline double avg_error(const Circuit& c, const ErrorModel& model = {}, bool* empty = nullptr) {
    model.check();
    GateTally t = tally_gates(c, model.include_measure);
    if (empty) *empty = t.total() == 0;
    if (t.total() == 0) return 0.0;
    return (model.e1q * static_cast<double>(t.one_qubit) +
            model.e2q * static_cast<double>(t.two_qubit)) /
           static_cast<double>(t.total());
}

inline double score_simplified(const Circuit& c, const ErrorModel& model = {}) {
    return static_cast<double>(depth(c)) * avg_error(c, model);
}

inline double score_full(const Circuit& c, const ErrorModel& model = {}) {
    double d = static_cast<double>(depth(c));
    return model.beta * (1.0 - std::pow(1.0 - avg_error(c, model), d));
}

inline double normalized_score(const Circuit& transpiled, const Circuit& original,
                               const ErrorModel& model = {}) {
    double base = score_simplified(original, model);
    if (base <= 0) throw Error("normalized_score: original circuit has zero score");
    return score_simplified(transpiled, model) / base;
}

}  // namespace qabench
