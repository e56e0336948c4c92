#pragma once

// Dense statevector simulator. Qubit 0 is the least-significant bit of the
// basis index. Measurements must be terminal per wire; they are recorded,
// and the returned state is pre-collapse.
//
// A process-wide admission guard bounds the total amplitude memory of
// concurrently running simulations; oversized single requests fail fast
// with a capacity error naming the required bytes.

#include <chrono>
#include <complex>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "qabench/circuit.hpp"
#include "qabench/gates.hpp"
#include "qabench/transpiler.hpp"

namespace qabench {

struct CapacityError : Error {
    using Error::Error;
};

inline std::uint32_t max_sim_qubits() {
    static const std::uint32_t cap = [] {
        if (const char* env = std::getenv("QABENCH_SIM_MAX_QUBITS")) {
            long v = std::atol(env);
            if (v >= 1 && v <= 30) return static_cast<std::uint32_t>(v);
        }
        return 24u;
    }();
    return cap;
}

inline std::uint64_t state_bytes(std::uint32_t num_qubits) {
    return std::uint64_t(16) << num_qubits;
}

namespace sim_detail {

// Blocking admission on a shared memory budget. Budget defaults to 4 GiB
// (override: QABENCH_SIM_MEMORY_BYTES) and always admits at least one
// cap-sized state so single simulations cannot deadlock.
class MemoryGuard {
  public:
    static MemoryGuard& instance() {
        static MemoryGuard g;
        return g;
    }

    class Lease {
      public:
        Lease(MemoryGuard& g, std::uint64_t bytes) : guard_(g), bytes_(bytes) {
            guard_.acquire(bytes_);
        }
        ~Lease() { guard_.release(bytes_); }
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;

      private:
        MemoryGuard& guard_;
        std::uint64_t bytes_;
    };

    std::uint64_t budget() const { return budget_; }

  private:
    friend class Lease;

    MemoryGuard() {
        budget_ = std::uint64_t(4) << 30;
        if (const char* env = std::getenv("QABENCH_SIM_MEMORY_BYTES")) {
            long long v = std::atoll(env);
            if (v > 0) budget_ = static_cast<std::uint64_t>(v);
        }
        std::uint64_t least = state_bytes(max_sim_qubits());
        if (budget_ < least) budget_ = least;
    }

    void acquire(std::uint64_t bytes) {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return used_ + bytes <= budget_; });
        used_ += bytes;
    }

    void release(std::uint64_t bytes) {
        {
            std::lock_guard<std::mutex> lock(mu_);
            used_ -= bytes;
        }
        cv_.notify_all();
    }

    std::mutex mu_;
    std::condition_variable cv_;
    std::uint64_t budget_ = 0;
    std::uint64_t used_ = 0;
};

}  // namespace sim_detail

struct StateVector {
    std::uint32_t num_qubits = 0;
    std::vector<cplx> amps;

    static StateVector basis(std::uint32_t num_qubits, std::uint64_t index = 0) {
        StateVector s;
        s.num_qubits = num_qubits;
        s.amps.assign(std::uint64_t(1) << num_qubits, cplx(0));
        if (index >= s.amps.size()) throw Error("basis index out of range");
        s.amps[index] = cplx(1);
        return s;
    }

    double norm() const {
        double n = 0;
        for (const auto& a : amps) n += std::norm(a);
        return std::sqrt(n);
    }
};

struct SimResult {
    StateVector state;
    double t_sim_s = 0.0;
    // (qubit, clbit) pairs in program order.
    std::vector<std::pair<std::uint32_t, std::int32_t>> measurements;
};

namespace sim_detail {

inline void check_capacity(std::uint32_t num_qubits) {
    std::uint32_t cap = max_sim_qubits();
    if (num_qubits > cap)
        throw CapacityError("simulate: " + std::to_string(num_qubits) + " qubits need " +
                            std::to_string(state_bytes(num_qubits)) +
                            " bytes of amplitudes (16*2^" + std::to_string(num_qubits) +
                            "); cap is " + std::to_string(cap) + " qubits");
}

inline void apply_1q(std::vector<cplx>& a, std::uint32_t q, const Mat2& u) {
    const std::uint64_t bit = std::uint64_t(1) << q;
    const cplx m00 = u.m[0], m01 = u.m[1], m10 = u.m[2], m11 = u.m[3];
    for (std::uint64_t base = 0; base < a.size(); base += bit << 1)
        for (std::uint64_t ofs = 0; ofs < bit; ++ofs) {
            std::uint64_t i0 = base + ofs;
            cplx a0 = a[i0], a1 = a[i0 | bit];
            a[i0] = m00 * a0 + m01 * a1;
            a[i0 | bit] = m10 * a0 + m11 * a1;
        }
}

inline void apply_rz(std::vector<cplx>& a, std::uint32_t q, double angle) {
    const std::uint64_t bit = std::uint64_t(1) << q;
    const cplx p0 = std::polar(1.0, -angle / 2), p1 = std::polar(1.0, angle / 2);
    for (std::uint64_t base = 0; base < a.size(); base += bit << 1)
        for (std::uint64_t ofs = 0; ofs < bit; ++ofs) {
            a[base + ofs] *= p0;
            a[base + ofs + bit] *= p1;
        }
}

inline void apply_x(std::vector<cplx>& a, std::uint32_t q) {
    const std::uint64_t bit = std::uint64_t(1) << q;
    for (std::uint64_t base = 0; base < a.size(); base += bit << 1)
        for (std::uint64_t ofs = 0; ofs < bit; ++ofs)
            std::swap(a[base + ofs], a[base + ofs + bit]);
}

inline void apply_cx(std::vector<cplx>& a, std::uint32_t c, std::uint32_t t) {
    const std::uint64_t cb = std::uint64_t(1) << c, tb = std::uint64_t(1) << t;
    for (std::uint64_t i = 0; i < a.size(); ++i)
        if ((i & cb) && !(i & tb)) std::swap(a[i], a[i | tb]);
}

inline void apply_cp(std::vector<cplx>& a, std::uint32_t c, std::uint32_t t, double angle) {
    const std::uint64_t cb = std::uint64_t(1) << c, tb = std::uint64_t(1) << t;
    const cplx ph = std::polar(1.0, angle);
    for (std::uint64_t i = 0; i < a.size(); ++i)
        if ((i & cb) && (i & tb)) a[i] *= ph;
}

inline void apply_swap(std::vector<cplx>& a, std::uint32_t p, std::uint32_t q) {
    const std::uint64_t pb = std::uint64_t(1) << p, qb = std::uint64_t(1) << q;
    for (std::uint64_t i = 0; i < a.size(); ++i)
        if ((i & pb) && !(i & qb)) std::swap(a[i], a[(i & ~pb) | qb]);
}

}  // namespace sim_detail

inline SimResult simulate(const Circuit& c, const StateVector& initial) {
    sim_detail::check_capacity(c.num_qubits);
    if (initial.num_qubits != c.num_qubits)
        throw Error("simulate: initial state has " + std::to_string(initial.num_qubits) +
                    " qubits, circuit has " + std::to_string(c.num_qubits));
    sim_detail::MemoryGuard::Lease lease(sim_detail::MemoryGuard::instance(),
                                         state_bytes(c.num_qubits));
    SimResult res;
    res.state = initial;
    auto& a = res.state.amps;
    std::vector<bool> measured(c.num_qubits, false);

    auto t0 = std::chrono::steady_clock::now();
    for (const auto& op : c.ops) {
        if (is_unitary(op.kind))
            for (auto q : op.qubits)
                if (measured[q])
                    throw Error("simulate: gate on qubit " + std::to_string(q) +
                                " after its measurement (measurements must be terminal)");
        switch (op.kind) {
            case GateKind::X:
                sim_detail::apply_x(a, op.qubits[0]);
                break;
            case GateKind::RZ:
                sim_detail::apply_rz(a, op.qubits[0], op.params[0]);
                break;
            case GateKind::H:
            case GateKind::SX:
            case GateKind::RX:
            case GateKind::U:
                sim_detail::apply_1q(a, op.qubits[0], gate_unitary_1q(op.kind, op.params));
                break;
            case GateKind::CX:
                sim_detail::apply_cx(a, op.qubits[0], op.qubits[1]);
                break;
            case GateKind::CP:
                sim_detail::apply_cp(a, op.qubits[0], op.qubits[1], op.params[0]);
                break;
            case GateKind::Swap:
                sim_detail::apply_swap(a, op.qubits[0], op.qubits[1]);
                break;
            case GateKind::Measure:
                measured[op.qubits[0]] = true;
                res.measurements.emplace_back(op.qubits[0], op.clbit);
                break;
            case GateKind::Barrier:
                break;
        }
    }
    res.t_sim_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline SimResult simulate(const Circuit& c, std::uint64_t basis_index = 0) {
    sim_detail::check_capacity(c.num_qubits);
    return simulate(c, StateVector::basis(c.num_qubits, basis_index));
}

// Marginal Born probabilities of a qubit subset; bit j of the outcome index
// is the value of qubits[j].
inline std::vector<double> probabilities(const StateVector& s,
                                         const std::vector<std::uint32_t>& qubits) {
    if (qubits.empty()) throw Error("probabilities: empty qubit list");
    if (qubits.size() > 24) throw Error("probabilities: subset too large");
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        if (qubits[i] >= s.num_qubits) throw Error("probabilities: qubit out of range");
        for (std::size_t j = i + 1; j < qubits.size(); ++j)
            if (qubits[i] == qubits[j]) throw Error("probabilities: duplicate qubit");
    }
    std::vector<double> out(std::size_t(1) << qubits.size(), 0.0);
    for (std::uint64_t idx = 0; idx < s.amps.size(); ++idx) {
        double p = std::norm(s.amps[idx]);
        if (p == 0.0) continue;
        std::uint64_t key = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j)
            key |= ((idx >> qubits[j]) & 1u) << j;
        out[key] += p;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalence checking
//
// The transpiled side may be much wider than the original (all physical
// qubits of an architecture), so it is evolved with a sparse amplitude map
// keyed by basis index. Starting from |0...0>, superposition only ever
// spreads along wires carrying logical state: routing CX chains permute
// basis states without growing support, so the map stays at most
// 2^(original qubits) entries.

namespace sim_detail {

using SparseState = std::unordered_map<std::uint64_t, cplx>;

inline void sparse_apply_1q(SparseState& s, std::uint32_t q, const Mat2& u) {
    const std::uint64_t bit = std::uint64_t(1) << q;
    SparseState out;
    out.reserve(s.size() * 2);
    for (const auto& [idx, amp] : s) {
        if (idx & bit) {
            out[idx & ~bit] += u.m[1] * amp;
            out[idx] += u.m[3] * amp;
        } else {
            out[idx] += u.m[0] * amp;
            out[idx | bit] += u.m[2] * amp;
        }
    }
    for (auto it = out.begin(); it != out.end();) {
        if (std::norm(it->second) < 1e-32)
            it = out.erase(it);
        else
            ++it;
    }
    s = std::move(out);
}

inline void sparse_apply_permutation(SparseState& s, const Op& op) {
    SparseState out;
    out.reserve(s.size());
    if (op.kind == GateKind::CX) {
        const std::uint64_t cb = std::uint64_t(1) << op.qubits[0];
        const std::uint64_t tb = std::uint64_t(1) << op.qubits[1];
        for (const auto& [idx, amp] : s) out[(idx & cb) ? idx ^ tb : idx] += amp;
    } else {  // Swap
        const std::uint64_t pb = std::uint64_t(1) << op.qubits[0];
        const std::uint64_t qb = std::uint64_t(1) << op.qubits[1];
        for (const auto& [idx, amp] : s) {
            bool p = idx & pb, q = idx & qb;
            std::uint64_t j = idx;
            if (p != q) j = (idx ^ pb) ^ qb;
            out[j] += amp;
        }
    }
    s = std::move(out);
}

inline void sparse_apply(SparseState& s, const Op& op) {
    switch (op.kind) {
        case GateKind::RZ: {
            const std::uint64_t bit = std::uint64_t(1) << op.qubits[0];
            const cplx p0 = std::polar(1.0, -op.params[0] / 2);
            const cplx p1 = std::polar(1.0, op.params[0] / 2);
            for (auto& [idx, amp] : s) amp *= (idx & bit) ? p1 : p0;
            break;
        }
        case GateKind::CP: {
            const std::uint64_t cb = std::uint64_t(1) << op.qubits[0];
            const std::uint64_t tb = std::uint64_t(1) << op.qubits[1];
            const cplx ph = std::polar(1.0, op.params[0]);
            for (auto& [idx, amp] : s)
                if ((idx & cb) && (idx & tb)) amp *= ph;
            break;
        }
        case GateKind::CX:
        case GateKind::Swap:
            sparse_apply_permutation(s, op);
            break;
        case GateKind::Measure:
        case GateKind::Barrier:
            break;
        default:
            sparse_apply_1q(s, op.qubits[0], gate_unitary_1q(op.kind, op.params));
    }
}

}  // namespace sim_detail

// |<psi_orig | P' psi_trans>| with P' the final-layout permutation; wires
// outside the layout image must end in |0> or the overlap (and hence the
// fidelity) drops. Global phase is ignored by the modulus.
inline double equivalence(const Circuit& original, const Circuit& transpiled,
                          const Layout& final_layout) {
    if (final_layout.num_logical != original.num_qubits)
        throw Error("equivalence: layout has " + std::to_string(final_layout.num_logical) +
                    " logical qubits, original circuit has " +
                    std::to_string(original.num_qubits));
    if (transpiled.num_qubits > 64)
        throw Error("equivalence: transpiled circuit too wide (> 64 wires)");
    for (std::uint32_t l = 0; l < final_layout.num_logical; ++l)
        if (final_layout.to_phys[l] >= transpiled.num_qubits)
            throw Error("equivalence: layout maps outside the transpiled circuit");

    SimResult ref = simulate(original, 0);

    sim_detail::SparseState st;
    st[0] = cplx(1);
    for (const auto& op : transpiled.ops) sim_detail::sparse_apply(st, op);

    cplx overlap(0);
    for (std::uint64_t x = 0; x < ref.state.amps.size(); ++x) {
        const cplx& a = ref.state.amps[x];
        if (a == cplx(0)) continue;
        std::uint64_t y = 0;
        for (std::uint32_t l = 0; l < original.num_qubits; ++l)
            if ((x >> l) & 1u) y |= std::uint64_t(1) << final_layout.to_phys[l];
        auto it = st.find(y);
        if (it != st.end()) overlap += std::conj(a) * it->second;
    }
    double f = std::abs(overlap);
    return f > 1.0 ? 1.0 : f;
}

// Wires actually used by ops, plus any the caller pins (e.g. layout images).
inline std::vector<std::uint32_t> used_wires(const Circuit& c,
                                             const std::vector<std::uint32_t>& pinned = {}) {
    std::vector<bool> used(c.num_qubits, false);
    for (const auto& op : c.ops)
        for (auto q : op.qubits) used[q] = true;
    for (auto q : pinned)
        if (q < c.num_qubits) used[q] = true;
    std::vector<std::uint32_t> out;
    for (std::uint32_t q = 0; q < c.num_qubits; ++q)
        if (used[q]) out.push_back(q);
    return out;
}

// Relabel onto the used wires only (ascending), dropping idle ones; the
// simulation cost of a routed circuit then depends on the wires it really
// touches, not the architecture width.
inline Circuit compact_to_used(const Circuit& c, std::vector<std::uint32_t>* wire_map = nullptr) {
    auto wires = used_wires(c);
    std::vector<std::uint32_t> slot(c.num_qubits, 0);
    for (std::uint32_t i = 0; i < wires.size(); ++i) slot[wires[i]] = i;
    Circuit out(static_cast<std::uint32_t>(wires.size()), c.num_clbits);
    out.ops.reserve(c.ops.size());
    for (const auto& op : c.ops) {
        Op m = op;
        for (auto& q : m.qubits) q = slot[q];
        out.ops.push_back(std::move(m));
    }
    if (wire_map) *wire_map = wires;
    return out;
}

}  // namespace qabench
