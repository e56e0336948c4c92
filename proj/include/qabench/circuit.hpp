#pragma once

// Gate-level circuit representation shared by every other component.
// A circuit is a flat list of operations over one qubit register and
// one classical bit register.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qabench {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GateKind : std::uint8_t {
    H,
    X,
    SX,
    RZ,
    U,
    CX,
    CP,
    RX,
    Swap,
    Measure,
    Barrier,
};

constexpr bool is_unitary(GateKind k) {
    return k != GateKind::Measure && k != GateKind::Barrier;
}

constexpr bool is_two_qubit(GateKind k) {
    return k == GateKind::CX || k == GateKind::CP || k == GateKind::Swap;
}

// Barrier spans a variable number of qubits, reported as -1.
constexpr int arity(GateKind k) {
    if (k == GateKind::Barrier) return -1;
    return is_two_qubit(k) ? 2 : 1;
}

constexpr int param_count(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::RX:
        case GateKind::CP:
            return 1;
        case GateKind::U:
            return 3;
        default:
            return 0;
    }
}

inline const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::H: return "h";
        case GateKind::X: return "x";
        case GateKind::SX: return "sx";
        case GateKind::RZ: return "rz";
        case GateKind::U: return "u";
        case GateKind::CX: return "cx";
        case GateKind::CP: return "cp";
        case GateKind::RX: return "rx";
        case GateKind::Swap: return "swap";
        case GateKind::Measure: return "measure";
        case GateKind::Barrier: return "barrier";
    }
    return "?";
}

struct Op {
    GateKind kind{};
    std::vector<std::uint32_t> qubits;
    std::array<double, 3> params{};
    std::int32_t clbit = -1;

    bool touches(std::uint32_t q) const {
        return std::find(qubits.begin(), qubits.end(), q) != qubits.end();
    }
};

// Native hardware set used by the transpiler backend.
constexpr bool is_native(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::SX:
        case GateKind::X:
        case GateKind::CX:
        case GateKind::Measure:
        case GateKind::Barrier:
            return true;
        default:
            return false;
    }
}

class Circuit {
  public:
    std::uint32_t num_qubits = 0;
    std::uint32_t num_clbits = 0;
    std::vector<Op> ops;

    Circuit() = default;
    explicit Circuit(std::uint32_t qubits, std::uint32_t clbits = 0)
        : num_qubits(qubits), num_clbits(clbits) {}

    void h(std::uint32_t q) { add1(GateKind::H, q); }
    void x(std::uint32_t q) { add1(GateKind::X, q); }
    void sx(std::uint32_t q) { add1(GateKind::SX, q); }
    void rz(double theta, std::uint32_t q) { add1(GateKind::RZ, q, {theta, 0, 0}); }
    void rx(double theta, std::uint32_t q) { add1(GateKind::RX, q, {theta, 0, 0}); }
    void u(double theta, double phi, double lambda, std::uint32_t q) {
        add1(GateKind::U, q, {theta, phi, lambda});
    }
    void cx(std::uint32_t c, std::uint32_t t) { add2(GateKind::CX, c, t); }
    void cp(double theta, std::uint32_t c, std::uint32_t t) {
        add2(GateKind::CP, c, t, {theta, 0, 0});
    }
    void swap(std::uint32_t a, std::uint32_t b) { add2(GateKind::Swap, a, b); }

    void measure(std::uint32_t q, std::uint32_t c) {
        check_qubit(q);
        if (c >= num_clbits)
            throw Error("measure: classical bit " + std::to_string(c) + " out of range");
        Op op;
        op.kind = GateKind::Measure;
        op.qubits = {q};
        op.clbit = static_cast<std::int32_t>(c);
        ops.push_back(std::move(op));
    }

    void barrier(std::vector<std::uint32_t> qs) {
        if (qs.empty()) throw Error("barrier: needs at least one qubit");
        for (auto q : qs) check_qubit(q);
        std::sort(qs.begin(), qs.end());
        if (std::adjacent_find(qs.begin(), qs.end()) != qs.end())
            throw Error("barrier: duplicate qubit");
        Op op;
        op.kind = GateKind::Barrier;
        op.qubits = std::move(qs);
        ops.push_back(std::move(op));
    }

    void append(Op op) {
        validate_op(op);
        ops.push_back(std::move(op));
    }

    // Structural invariants; builder methods already enforce them, so this
    // mainly guards circuits assembled field by field.
    void validate() const {
        for (const auto& op : ops) validate_op(op);
    }

  private:
    void check_qubit(std::uint32_t q) const {
        if (q >= num_qubits)
            throw Error("qubit index " + std::to_string(q) + " out of range (register size " +
                        std::to_string(num_qubits) + ")");
    }

    void add1(GateKind k, std::uint32_t q, std::array<double, 3> params = {}) {
        check_qubit(q);
        check_params(k, params);
        Op op;
        op.kind = k;
        op.qubits = {q};
        op.params = params;
        ops.push_back(std::move(op));
    }

    void add2(GateKind k, std::uint32_t a, std::uint32_t b, std::array<double, 3> params = {}) {
        check_qubit(a);
        check_qubit(b);
        if (a == b) throw Error(std::string(gate_name(k)) + ": qubits must be distinct");
        check_params(k, params);
        Op op;
        op.kind = k;
        op.qubits = {a, b};
        op.params = params;
        ops.push_back(std::move(op));
    }

    static void check_params(GateKind k, const std::array<double, 3>& params) {
        for (int i = 0; i < param_count(k); ++i)
            if (!std::isfinite(params[i]))
                throw Error(std::string(gate_name(k)) + ": angle must be finite");
    }

    void validate_op(const Op& op) const {
        int n = arity(op.kind);
        if (n >= 0 && op.qubits.size() != static_cast<std::size_t>(n))
            throw Error(std::string(gate_name(op.kind)) + ": expected " + std::to_string(n) +
                        " qubit(s), got " + std::to_string(op.qubits.size()));
        if (op.kind == GateKind::Barrier && op.qubits.empty())
            throw Error("barrier: needs at least one qubit");
        for (auto q : op.qubits) check_qubit(q);
        if (op.qubits.size() == 2 && op.qubits[0] == op.qubits[1])
            throw Error(std::string(gate_name(op.kind)) + ": qubits must be distinct");
        check_params(op.kind, op.params);
        if (op.kind == GateKind::Measure) {
            if (op.clbit < 0 || static_cast<std::uint32_t>(op.clbit) >= num_clbits)
                throw Error("measure: classical bit out of range");
        }
    }
};

namespace detail {

// As-soon-as-possible level for each op. Barriers take no level of their
// own, they only align the fronts of their wires. Measurements share the
// gate scheduling rule; when count_measures is false they are invisible.
inline std::vector<std::uint64_t> op_levels(const Circuit& c, bool count_measures) {
    std::vector<std::uint64_t> qubit_front(c.num_qubits, 0);
    std::vector<std::uint64_t> clbit_front(c.num_clbits, 0);
    std::vector<std::uint64_t> levels(c.ops.size(), 0);
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        const Op& op = c.ops[i];
        if (op.kind == GateKind::Barrier) {
            std::uint64_t lv = 0;
            for (auto q : op.qubits) lv = std::max(lv, qubit_front[q]);
            for (auto q : op.qubits) qubit_front[q] = lv;
            levels[i] = 0;
            continue;
        }
        if (!count_measures && op.kind == GateKind::Measure) {
            levels[i] = 0;
            continue;
        }
        std::uint64_t lv = 0;
        for (auto q : op.qubits) lv = std::max(lv, qubit_front[q]);
        if (op.clbit >= 0) lv = std::max(lv, clbit_front[op.clbit]);
        ++lv;
        for (auto q : op.qubits) qubit_front[q] = lv;
        if (op.clbit >= 0) clbit_front[op.clbit] = lv;
        levels[i] = lv;
    }
    return levels;
}

}  // namespace detail

inline std::uint64_t depth(const Circuit& c, bool count_measures = true) {
    auto levels = detail::op_levels(c, count_measures);
    std::uint64_t d = 0;
    for (auto lv : levels) d = std::max(d, lv);
    return d;
}

// Greedy ASAP layering; ops within a layer act on disjoint qubits.
// layers(c).size() == depth(c).
inline std::vector<std::vector<std::size_t>> layers(const Circuit& c,
                                                    bool count_measures = true) {
    auto levels = detail::op_levels(c, count_measures);
    std::uint64_t d = 0;
    for (auto lv : levels) d = std::max(d, lv);
    std::vector<std::vector<std::size_t>> out(d);
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] > 0) out[levels[i] - 1].push_back(i);
    return out;
}

inline std::map<GateKind, std::uint64_t> gate_counts(const Circuit& c) {
    std::map<GateKind, std::uint64_t> counts;
    for (const auto& op : c.ops) ++counts[op.kind];
    return counts;
}

// Gate totals split by arity, the quantities error models consume.
// Barriers never count; measurements only when include_measure is set.
struct GateTally {
    std::uint64_t one_qubit = 0;
    std::uint64_t two_qubit = 0;
    std::uint64_t total() const { return one_qubit + two_qubit; }
};

inline GateTally tally_gates(const Circuit& c, bool include_measure = false) {
    GateTally t;
    for (const auto& op : c.ops) {
        if (op.kind == GateKind::Barrier) continue;
        if (op.kind == GateKind::Measure) {
            if (include_measure) ++t.one_qubit;
            continue;
        }
        if (is_two_qubit(op.kind))
            ++t.two_qubit;
        else
            ++t.one_qubit;
    }
    return t;
}

}  // namespace qabench
