#pragma once

// Circuit rewriting for a target coupling map, in four stages:
//   decompose_to_native  gate vocabulary -> {RZ, SX, X, CX} (+ measure/barrier)
//   initial_layout       logical -> physical placement
//   route                SWAP insertion so two-qubit gates sit on couplers
//   optimize             peephole cleanup at levels 0..3
//
// Routed SWAPs are emitted as three CX gates. Layouts are stored as full
// bijections over the physical qubits; entries at or above the circuit's
// qubit count belong to virtual (unused) logicals.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "qabench/arch.hpp"
#include "qabench/circuit.hpp"
#include "qabench/gates.hpp"

namespace qabench {

enum class Router { Basic, Sabre };

inline const char* router_name(Router r) { return r == Router::Basic ? "basic" : "sabre"; }

inline Router router_from_name(std::string_view s) {
    if (s == "basic") return Router::Basic;
    if (s == "sabre") return Router::Sabre;
    throw Error("unknown router '" + std::string(s) + "'");
}

enum class LayoutStrategy { Auto, Trivial, SabreRefined };

inline LayoutStrategy layout_from_name(std::string_view s) {
    if (s == "auto") return LayoutStrategy::Auto;
    if (s == "trivial") return LayoutStrategy::Trivial;
    if (s == "sabre-refined") return LayoutStrategy::SabreRefined;
    throw Error("unknown layout strategy '" + std::string(s) + "'");
}

struct SabreParams {
    std::uint32_t extended_set_size = 20;
    double extended_set_weight = 0.5;
    double decay_increment = 0.001;
    std::uint32_t decay_reset_interval = 5;
    // Refined layout search: independent random starts per seed, and
    // forward/backward routing cycles run on each before it is scored.
    std::uint32_t layout_restarts = 8;
    std::uint32_t layout_cycles = 2;
};

struct Layout {
    std::uint32_t num_logical = 0;
    std::vector<std::uint32_t> to_phys;  // index: logical (virtual above num_logical)

    std::uint32_t phys(std::uint32_t logical) const { return to_phys[logical]; }

    std::vector<std::uint32_t> inverse() const {
        std::vector<std::uint32_t> inv(to_phys.size());
        for (std::uint32_t l = 0; l < to_phys.size(); ++l) inv[to_phys[l]] = l;
        return inv;
    }

    static Layout trivial(std::uint32_t num_logical, std::uint32_t num_physical) {
        if (num_logical > num_physical)
            throw Error("layout: circuit has " + std::to_string(num_logical) +
                        " qubits but architecture only " + std::to_string(num_physical));
        Layout l;
        l.num_logical = num_logical;
        l.to_phys.resize(num_physical);
        for (std::uint32_t i = 0; i < num_physical; ++i) l.to_phys[i] = i;
        return l;
    }

    void check(std::uint32_t num_physical) const {
        if (num_logical > num_physical) throw Error("layout: more logicals than physicals");
        if (to_phys.size() != num_physical)
            throw Error("layout: map must cover all physical qubits");
        std::vector<bool> seen(num_physical, false);
        for (auto p : to_phys) {
            if (p >= num_physical) throw Error("layout: physical index out of range");
            if (seen[p]) throw Error("layout: not injective");
            seen[p] = true;
        }
    }
};

struct TranspileConfig {
    Router router = Router::Sabre;
    int opt_level = 1;
    std::uint64_t seed = 0;
    LayoutStrategy layout = LayoutStrategy::Auto;
    SabreParams sabre;
};

struct TranspileOutcome {
    Circuit circuit;
    Layout initial_layout;
    Layout final_layout;
    double t_trans_s = 0.0;
    std::uint32_t swaps_inserted = 0;
    TranspileConfig config;
};

// ---------------------------------------------------------------------------
// Decomposition

inline Circuit decompose_to_native(const Circuit& c) {
    Circuit out(c.num_qubits, c.num_clbits);
    auto push_rz = [&](double a, std::uint32_t q) {
        a = wrap_angle(a);
        if (std::abs(a) <= kAngleTol) return;
        out.rz(a, q);
    };
    for (const auto& op : c.ops) {
        switch (op.kind) {
            case GateKind::X:
            case GateKind::SX:
            case GateKind::RZ:
            case GateKind::CX:
            case GateKind::Measure:
            case GateKind::Barrier:
                out.append(op);
                break;
            case GateKind::H:
            case GateKind::RX:
            case GateKind::U:
                synthesize_1q(gate_unitary_1q(op.kind, op.params), op.qubits[0], out.ops);
                break;
            case GateKind::CP: {
                double th = op.params[0];
                std::uint32_t a = op.qubits[0], b = op.qubits[1];
                push_rz(th / 2, a);
                out.cx(a, b);
                push_rz(-th / 2, b);
                out.cx(a, b);
                push_rz(th / 2, b);
                break;
            }
            case GateKind::Swap: {
                std::uint32_t a = op.qubits[0], b = op.qubits[1];
                out.cx(a, b);
                out.cx(b, a);
                out.cx(a, b);
                break;
            }
        }
    }
    return out;
}

inline bool routed_ok(const Circuit& c, const Architecture& arch) {
    for (const auto& op : c.ops)
        if (op.qubits.size() == 2 && is_unitary(op.kind))
            if (!arch.has_edge(op.qubits[0], op.qubits[1])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Routing

namespace transpiler_detail {

struct Mapping {
    std::vector<std::uint32_t> to_phys;  // logical -> physical
    std::vector<std::uint32_t> to_log;   // physical -> logical

    explicit Mapping(const Layout& l) : to_phys(l.to_phys), to_log(l.inverse()) {}

    void swap_physical(std::uint32_t p, std::uint32_t q) {
        std::uint32_t lp = to_log[p], lq = to_log[q];
        std::swap(to_log[p], to_log[q]);
        to_phys[lp] = q;
        to_phys[lq] = p;
    }
};

inline void emit_swap(Circuit& out, std::uint32_t p, std::uint32_t q) {
    out.cx(p, q);
    out.cx(q, p);
    out.cx(p, q);
}

inline void emit_mapped(Circuit& out, const Op& op, const Mapping& map) {
    Op m = op;
    for (auto& q : m.qubits) q = map.to_phys[q];
    if (m.kind == GateKind::Barrier) std::sort(m.qubits.begin(), m.qubits.end());
    out.append(std::move(m));
}

// Walk p toward target until adjacent, swapping along a shortest path,
// lowest-index next hop first. Returns the final position of p.
inline std::uint32_t swap_toward(Circuit& out, Mapping& map, const Architecture& arch,
                                 const DistanceMatrix& dm, std::uint32_t p, std::uint32_t target,
                                 std::uint32_t& swaps) {
    while (dm.at(p, target) > 1) {
        std::uint32_t next = arch.num_qubits;
        for (auto m : arch.adjacency()[p])
            if (dm.at(m, target) == dm.at(p, target) - 1) {
                next = m;
                break;
            }
        if (next >= arch.num_qubits)
            throw Error("route: no shortest-path step found (disconnected graph?)");
        emit_swap(out, p, next);
        map.swap_physical(p, next);
        ++swaps;
        p = next;
    }
    return p;
}

// Gates are routed one at a time in program order. A gate at distance d
// costs d-1 swaps along a shortest path; the only freedom is how far each
// endpoint walks before the two meet. Every split is tried and scored by
// the distances it leaves for the next few two-qubit gates, nearer gates
// weighted heavier; the lowest score wins, ties to the first operand
// staying put.
inline void route_basic(const Circuit& c, const Architecture& arch, const DistanceMatrix& dm,
                        Mapping& map, Circuit& out, std::uint32_t& swaps) {
    constexpr std::size_t kWindow = 4;
    auto step_toward = [&](std::uint32_t from, std::uint32_t target) {
        for (auto m : arch.adjacency()[from])
            if (dm.at(m, target) == dm.at(from, target) - 1) return m;
        throw Error("route: no shortest-path step found (disconnected graph?)");
    };
    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        const Op& op = c.ops[i];
        if (!(op.qubits.size() == 2 && is_unitary(op.kind))) {
            emit_mapped(out, op, map);
            continue;
        }
        std::uint32_t d = dm.at(map.to_phys[op.qubits[0]], map.to_phys[op.qubits[1]]);
        if (d > 1) {
            std::vector<const Op*> pending;
            for (std::size_t j = i + 1; j < c.ops.size() && pending.size() < kWindow; ++j)
                if (c.ops[j].qubits.size() == 2 && is_unitary(c.ops[j].kind))
                    pending.push_back(&c.ops[j]);

            // Walk the first operand asteps hops toward the second, then the
            // second the rest of the way. Each hop shortens the gap by one,
            // so any split emits exactly d-1 swaps.
            auto walk = [&](Mapping& m, std::uint32_t asteps, Circuit* rec) {
                std::uint32_t pa = m.to_phys[op.qubits[0]];
                std::uint32_t pb = m.to_phys[op.qubits[1]];
                while (dm.at(pa, pb) > 1) {
                    bool move_a = asteps > 0;
                    std::uint32_t from = move_a ? pa : pb;
                    std::uint32_t next = step_toward(from, move_a ? pb : pa);
                    if (rec) emit_swap(*rec, from, next);
                    m.swap_physical(from, next);
                    if (move_a) {
                        pa = next;
                        --asteps;
                    } else {
                        pb = next;
                    }
                }
            };

            std::uint32_t best_k = 0;
            double best_score = 0.0;
            for (std::uint32_t k = 0; k < d; ++k) {
                Mapping trial = map;
                walk(trial, k, nullptr);
                double score = 0.0, w = 1.0;
                for (const Op* g : pending) {
                    score += w * dm.at(trial.to_phys[g->qubits[0]], trial.to_phys[g->qubits[1]]);
                    w *= 0.5;
                }
                if (k == 0 || score < best_score) {
                    best_k = k;
                    best_score = score;
                }
            }
            walk(map, best_k, &out);
            swaps += d - 1;
        }
        Op m = op;
        m.qubits = {map.to_phys[op.qubits[0]], map.to_phys[op.qubits[1]]};
        out.append(std::move(m));
    }
}

struct Dag {
    std::vector<std::vector<std::uint32_t>> succs;
    std::vector<std::uint32_t> npred;

    explicit Dag(const Circuit& c) : succs(c.ops.size()), npred(c.ops.size(), 0) {
        std::vector<std::int64_t> last_q(c.num_qubits, -1), last_c(c.num_clbits, -1);
        std::vector<std::uint32_t> preds;
        for (std::uint32_t i = 0; i < c.ops.size(); ++i) {
            preds.clear();
            const Op& op = c.ops[i];
            for (auto q : op.qubits) {
                if (last_q[q] >= 0) preds.push_back(static_cast<std::uint32_t>(last_q[q]));
                last_q[q] = i;
            }
            if (op.clbit >= 0) {
                if (last_c[op.clbit] >= 0)
                    preds.push_back(static_cast<std::uint32_t>(last_c[op.clbit]));
                last_c[op.clbit] = i;
            }
            std::sort(preds.begin(), preds.end());
            preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
            for (auto p : preds) {
                succs[p].push_back(i);
                ++npred[i];
            }
        }
    }
};

// Front-layer lookahead router. The heuristic for a candidate swap is
//   max(decay[p], decay[q]) * (sum_F D + w/|E| * sum_E D)
// evaluated under the hypothetically swapped mapping; ties break toward the
// lexicographically smallest physical pair. Decay rises by a fixed increment
// on swapped qubits and resets every reset_interval swaps, steering
// consecutive swaps away from the same wires.
inline void route_sabre(const Circuit& c, const Architecture& arch, const DistanceMatrix& dm,
                        Mapping& map, const SabreParams& params, Circuit& out,
                        std::uint32_t& swaps) {
    Dag dag(c);
    std::set<std::uint32_t> ready;
    std::vector<std::uint32_t> npred = dag.npred;
    for (std::uint32_t i = 0; i < c.ops.size(); ++i)
        if (npred[i] == 0) ready.insert(i);

    std::vector<double> decay(arch.num_qubits, 1.0);
    std::uint32_t swaps_since_reset = 0;
    std::uint32_t stuck = 0;
    const std::uint32_t stuck_limit = std::max<std::uint32_t>(16, 4 * arch.num_qubits);

    auto is_blocked_2q = [&](std::uint32_t i) {
        const Op& op = c.ops[i];
        return op.qubits.size() == 2 && is_unitary(op.kind) &&
               dm.at(map.to_phys[op.qubits[0]], map.to_phys[op.qubits[1]]) > 1;
    };

    auto release = [&](std::uint32_t i) {
        for (auto s : dag.succs[i])
            if (--npred[s] == 0) ready.insert(s);
    };

    auto execute_ready = [&]() {
        bool progressed = false;
        bool again = true;
        while (again) {
            again = false;
            for (auto it = ready.begin(); it != ready.end();) {
                if (!is_blocked_2q(*it)) {
                    std::uint32_t i = *it;
                    it = ready.erase(it);
                    emit_mapped(out, c.ops[i], map);
                    release(i);
                    progressed = true;
                    again = true;
                } else {
                    ++it;
                }
            }
        }
        return progressed;
    };

    while (true) {
        if (execute_ready()) stuck = 0;
        if (ready.empty()) break;

        // Front layer: every ready op is a blocked two-qubit gate.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> front;
        for (auto i : ready) front.emplace_back(c.ops[i].qubits[0], c.ops[i].qubits[1]);

        // Extended set: next two-qubit gates downstream of the front.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> extended;
        {
            std::vector<std::uint32_t> frontier(ready.begin(), ready.end());
            std::vector<bool> seen(c.ops.size(), false);
            for (auto i : frontier) seen[i] = true;
            while (!frontier.empty() && extended.size() < params.extended_set_size) {
                std::vector<std::uint32_t> next;
                for (auto i : frontier)
                    for (auto s : dag.succs[i])
                        if (!seen[s]) {
                            seen[s] = true;
                            next.push_back(s);
                        }
                std::sort(next.begin(), next.end());
                for (auto s : next) {
                    const Op& op = c.ops[s];
                    if (op.qubits.size() == 2 && is_unitary(op.kind)) {
                        extended.emplace_back(op.qubits[0], op.qubits[1]);
                        if (extended.size() >= params.extended_set_size) break;
                    }
                }
                frontier = std::move(next);
            }
        }

        // Candidate swaps: coupler edges touching a front gate's qubits.
        std::set<std::pair<std::uint32_t, std::uint32_t>> candidates;
        for (const auto& [a, b] : front)
            for (auto l : {a, b}) {
                std::uint32_t p = map.to_phys[l];
                for (auto m : arch.adjacency()[p])
                    candidates.insert({std::min(p, m), std::max(p, m)});
            }

        double best_score = 0;
        std::pair<std::uint32_t, std::uint32_t> best{0, 0};
        bool first = true;
        for (const auto& [p, q] : candidates) {
            std::uint32_t lp = map.to_log[p], lq = map.to_log[q];
            auto pos = [&](std::uint32_t l) -> std::uint32_t {
                if (l == lp) return q;
                if (l == lq) return p;
                return map.to_phys[l];
            };
            double sum_front = 0;
            for (const auto& [a, b] : front) sum_front += dm.at(pos(a), pos(b));
            double sum_ext = 0;
            for (const auto& [a, b] : extended) sum_ext += dm.at(pos(a), pos(b));
            double h = sum_front;
            if (!extended.empty())
                h += params.extended_set_weight * sum_ext / static_cast<double>(extended.size());
            double score = std::max(decay[p], decay[q]) * h;
            if (first || score < best_score) {
                first = false;
                best_score = score;
                best = {p, q};
            }
        }
        if (first) throw Error("route: no swap candidates (disconnected graph?)");

        emit_swap(out, best.first, best.second);
        map.swap_physical(best.first, best.second);
        ++swaps;
        decay[best.first] += params.decay_increment;
        decay[best.second] += params.decay_increment;
        if (++swaps_since_reset >= params.decay_reset_interval) {
            std::fill(decay.begin(), decay.end(), 1.0);
            swaps_since_reset = 0;
        }

        // Safety valve: if the heuristic keeps swapping without freeing any
        // gate, force the lowest-index front gate along a shortest path.
        if (++stuck > stuck_limit) {
            std::uint32_t i = *ready.begin();
            const Op& op = c.ops[i];
            std::uint32_t pa = map.to_phys[op.qubits[0]];
            std::uint32_t pb = map.to_phys[op.qubits[1]];
            swap_toward(out, map, arch, dm, pa, pb, swaps);
            stuck = 0;
        }
    }
}

}  // namespace transpiler_detail

inline TranspileOutcome route(const Circuit& c, const Architecture& arch, const Layout& layout,
                              Router router, std::uint64_t seed = 0,
                              const SabreParams& params = {},
                              const DistanceMatrix* dm_shared = nullptr) {
    (void)seed;  // routing is deterministic; seeds act through the layout
    if (c.num_qubits > arch.num_qubits)
        throw Error("route: circuit has " + std::to_string(c.num_qubits) +
                    " qubits but architecture only " + std::to_string(arch.num_qubits));
    layout.check(arch.num_qubits);
    std::optional<DistanceMatrix> dm_local;
    if (!dm_shared) dm_local.emplace(arch);
    const DistanceMatrix& dm = dm_shared ? *dm_shared : *dm_local;

    auto t0 = std::chrono::steady_clock::now();
    TranspileOutcome res;
    res.initial_layout = layout;
    res.circuit = Circuit(arch.num_qubits, c.num_clbits);

    // A measure with nothing after it on its wire is emitted once routing is
    // done, reading wherever its logical qubit ended up; otherwise a later
    // SWAP chain crossing that physical wire would sit behind the measure.
    // Mid-circuit measures keep their place.
    std::vector<char> deferred(c.ops.size(), 0);
    {
        std::vector<char> touched_later(c.num_qubits, 0);
        for (std::size_t i = c.ops.size(); i-- > 0;) {
            const Op& op = c.ops[i];
            if (op.kind == GateKind::Barrier) continue;
            if (op.kind == GateKind::Measure && !touched_later[op.qubits[0]]) deferred[i] = 1;
            for (auto q : op.qubits) touched_later[q] = 1;
        }
    }
    Circuit body(c.num_qubits, c.num_clbits);
    body.ops.reserve(c.ops.size());
    std::vector<Op> tail;
    for (std::size_t i = 0; i < c.ops.size(); ++i)
        (deferred[i] ? tail : body.ops).push_back(c.ops[i]);

    transpiler_detail::Mapping map(layout);
    if (router == Router::Basic)
        transpiler_detail::route_basic(body, arch, dm, map, res.circuit, res.swaps_inserted);
    else
        transpiler_detail::route_sabre(body, arch, dm, map, params, res.circuit,
                                       res.swaps_inserted);
    for (const Op& m : tail) {
        Op mapped = m;
        mapped.qubits[0] = map.to_phys[m.qubits[0]];
        res.circuit.ops.push_back(std::move(mapped));
    }
    res.final_layout.num_logical = c.num_qubits;
    res.final_layout.to_phys = map.to_phys;
    res.t_trans_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

// ---------------------------------------------------------------------------
// Layout selection

inline Layout initial_layout(const Circuit& c, const Architecture& arch, LayoutStrategy strategy,
                             std::uint64_t seed = 0, const SabreParams& params = {},
                             const DistanceMatrix* dm = nullptr) {
    if (c.num_qubits > arch.num_qubits)
        throw Error("initial_layout: circuit has " + std::to_string(c.num_qubits) +
                    " qubits but architecture only " + std::to_string(arch.num_qubits));
    if (strategy == LayoutStrategy::Trivial || strategy == LayoutStrategy::Auto)
        return Layout::trivial(c.num_qubits, arch.num_qubits);

    // Refined placement: from each seeded random bijection, alternate
    // forward and backward routing passes; each pass's final mapping seeds
    // the next, pulling interacting logicals onto nearby physicals. The
    // candidate whose forward routing inserts the fewest swaps wins.
    std::optional<DistanceMatrix> dm_local;
    if (!dm) {
        dm_local.emplace(arch);
        dm = &*dm_local;
    }
    std::mt19937_64 rng(seed);

    Circuit reversed(c.num_qubits, c.num_clbits);
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) reversed.ops.push_back(*it);

    // Two kinds of starting point alternate: a shuffled assignment inside a
    // breadth-first ball around a random physical qubit (keeps a small
    // circuit inside one dense region of a big device), and a plain shuffle
    // over the whole device for diversity.
    auto ball_start = [&](Layout& l) {
        std::uniform_int_distribution<std::uint32_t> pick(0, arch.num_qubits - 1);
        std::vector<char> seen(arch.num_qubits, 0);
        std::vector<std::uint32_t> ball{pick(rng)};
        seen[ball[0]] = 1;
        for (std::size_t h = 0; h < ball.size() && ball.size() < c.num_qubits; ++h)
            for (auto m : arch.adjacency()[ball[h]]) {
                if (ball.size() >= c.num_qubits) break;
                if (!seen[m]) {
                    seen[m] = 1;
                    ball.push_back(m);
                }
            }
        std::shuffle(ball.begin(), ball.end(), rng);
        std::vector<std::uint32_t> rest;
        for (std::uint32_t p = 0; p < arch.num_qubits; ++p)
            if (!seen[p]) rest.push_back(p);
        for (std::uint32_t q = 0; q < c.num_qubits; ++q) l.to_phys[q] = ball[q];
        for (std::uint32_t v = c.num_qubits; v < arch.num_qubits; ++v)
            l.to_phys[v] = rest[v - c.num_qubits];
    };

    Layout best;
    std::uint32_t best_swaps = 0;
    std::uint32_t restarts = std::max<std::uint32_t>(1, params.layout_restarts);
    for (std::uint32_t r = 0; r < restarts; ++r) {
        Layout l = Layout::trivial(c.num_qubits, arch.num_qubits);
        if (r % 2 == 0)
            ball_start(l);
        else
            std::shuffle(l.to_phys.begin(), l.to_phys.end(), rng);
        for (std::uint32_t cycle = 0; cycle < params.layout_cycles; ++cycle) {
            for (int pass = 0; pass < 2; ++pass) {
                const Circuit& dir = (pass == 0) ? c : reversed;
                auto out = route(dir, arch, l, Router::Sabre, seed, params, dm);
                l.to_phys = out.final_layout.to_phys;
            }
        }
        std::uint32_t probe = route(c, arch, l, Router::Sabre, seed, params, dm).swaps_inserted;
        if (r == 0 || probe < best_swaps) {
            best = l;
            best_swaps = probe;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Optimization

struct OptimizeResult {
    Circuit circuit;
    // wire_of[declared qubit] = wire the optimized circuit uses for it;
    // identity unless level 3 absorbed swaps.
    std::vector<std::uint32_t> wire_of;

    bool relabeled() const {
        for (std::uint32_t i = 0; i < wire_of.size(); ++i)
            if (wire_of[i] != i) return true;
        return false;
    }
};

namespace transpiler_detail {

inline bool commutes_with_x(const Mat2& u, double tol = kAngleTol) {
    return std::abs(u.m[0] - u.m[3]) <= tol && std::abs(u.m[1] - u.m[2]) <= tol;
}

// One peephole sweep: accumulate one-qubit runs and resynthesize them (kept
// only when not longer than the raw run), cancel equal adjacent CX pairs,
// and at level >= 2 let diagonal unitaries ride through a CX control and
// X-commuting unitaries through a CX target.
inline bool peephole_pass(Circuit& c, int level) {
    struct Pending {
        Mat2 u;
        std::vector<Op> raw;
        bool active = false;
    };
    std::vector<Pending> pending(c.num_qubits);
    std::vector<Op> emitted;
    emitted.reserve(c.ops.size());
    std::vector<char> dead;
    dead.reserve(c.ops.size());
    std::vector<std::vector<std::uint32_t>> hist(c.num_qubits);

    auto emit = [&](Op op) {
        for (auto q : op.qubits) hist[q].push_back(static_cast<std::uint32_t>(emitted.size()));
        emitted.push_back(std::move(op));
        dead.push_back(0);
    };

    auto flush = [&](std::uint32_t q) {
        Pending& p = pending[q];
        if (!p.active) return;
        std::vector<Op> synth;
        synthesize_1q(p.u, q, synth);
        const std::vector<Op>& pick = (synth.size() <= p.raw.size()) ? synth : p.raw;
        for (const auto& op : pick) emit(op);
        p.active = false;
        p.raw.clear();
    };

    for (const auto& op : c.ops) {
        if (op.qubits.size() == 1 && is_unitary(op.kind)) {
            Pending& p = pending[op.qubits[0]];
            if (!p.active) {
                p.u = Mat2::identity();
                p.active = true;
            }
            p.u = gate_unitary_1q(op.kind, op.params) * p.u;
            p.raw.push_back(op);
            continue;
        }
        if (op.kind == GateKind::CX) {
            std::uint32_t ctl = op.qubits[0], tgt = op.qubits[1];
            bool hold_ctl = level >= 2 && pending[ctl].active && is_diagonal(pending[ctl].u);
            bool hold_tgt = level >= 2 && pending[tgt].active && commutes_with_x(pending[tgt].u);
            if (pending[ctl].active && !hold_ctl) flush(ctl);
            if (pending[tgt].active && !hold_tgt) flush(tgt);
            bool cancelled = false;
            if (!hist[ctl].empty() && !hist[tgt].empty() && hist[ctl].back() == hist[tgt].back()) {
                std::uint32_t e = hist[ctl].back();
                const Op& prev = emitted[e];
                if (!dead[e] && prev.kind == GateKind::CX && prev.qubits[0] == ctl &&
                    prev.qubits[1] == tgt) {
                    dead[e] = 1;
                    hist[ctl].pop_back();
                    hist[tgt].pop_back();
                    cancelled = true;
                }
            }
            if (!cancelled) emit(op);
            continue;
        }
        // Measure, barrier, or a non-native two-qubit gate: flush and copy.
        for (auto q : op.qubits) flush(q);
        emit(op);
    }
    for (std::uint32_t q = 0; q < c.num_qubits; ++q) flush(q);

    std::vector<Op> result;
    result.reserve(emitted.size());
    for (std::size_t i = 0; i < emitted.size(); ++i)
        if (!dead[i]) result.push_back(std::move(emitted[i]));

    bool changed = result.size() != c.ops.size();
    if (!changed) {
        for (std::size_t i = 0; i < result.size(); ++i) {
            const Op &a = result[i], &b = c.ops[i];
            if (a.kind != b.kind || a.qubits != b.qubits || a.params != b.params ||
                a.clbit != b.clbit) {
                changed = true;
                break;
            }
        }
    }
    c.ops = std::move(result);
    return changed;
}

// Absorb literal 3-CX swap triples into a wire relabeling applied to the
// rest of the circuit. With an architecture given, an absorption is only
// taken when every later two-qubit gate still lands on a coupler under the
// new labels; this keeps routed circuits valid.
inline bool absorb_pass(Circuit& c, std::vector<std::uint32_t>& sigma,
                        const Architecture* arch) {
    std::size_t n = c.ops.size();
    // Relabeling local to this pass; composed into the caller's map at the
    // end so repeated passes never re-permute already moved gates.
    std::vector<std::uint32_t> run(c.num_qubits);
    for (std::uint32_t q = 0; q < c.num_qubits; ++q) run[q] = q;
    // next_on_wire[i] for each qubit slot of op i.
    std::vector<std::array<std::int64_t, 2>> next(n, {-1, -1});
    {
        std::vector<std::int64_t> last(c.num_qubits, -1);
        for (std::size_t i = n; i-- > 0;) {
            const Op& op = c.ops[i];
            if (op.qubits.size() > 2) {
                for (auto q : op.qubits) last[q] = static_cast<std::int64_t>(i);
                continue;
            }
            for (std::size_t s = 0; s < op.qubits.size(); ++s) {
                next[i][s] = last[op.qubits[s]];
                last[op.qubits[s]] = static_cast<std::int64_t>(i);
            }
        }
    }
    auto is_cx = [&](std::size_t i, std::uint32_t a, std::uint32_t b) {
        const Op& op = c.ops[i];
        return op.kind == GateKind::CX && op.qubits[0] == a && op.qubits[1] == b;
    };

    std::vector<char> skip(n, 0);
    std::vector<Op> out;
    out.reserve(n);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip[i]) continue;
        const Op& op = c.ops[i];
        bool absorbed = false;
        if (op.kind == GateKind::CX) {
            std::uint32_t a = op.qubits[0], b = op.qubits[1];
            std::int64_t j = next[i][0];
            if (j >= 0 && j == next[i][1] && is_cx(static_cast<std::size_t>(j), b, a)) {
                std::int64_t k = next[j][0];
                if (k >= 0 && k == next[j][1] && is_cx(static_cast<std::size_t>(k), a, b)) {
                    bool legal = true;
                    if (arch) {
                        auto sig = run;
                        std::swap(sig[a], sig[b]);
                        for (std::size_t m = static_cast<std::size_t>(k) + 1; m < n && legal;
                             ++m) {
                            if (skip[m]) continue;
                            const Op& later = c.ops[m];
                            if (later.qubits.size() == 2 && is_unitary(later.kind) &&
                                (later.touches(a) || later.touches(b)))
                                legal = arch->has_edge(sig[later.qubits[0]],
                                                       sig[later.qubits[1]]);
                        }
                    }
                    if (legal) {
                        skip[i] = skip[j] = skip[k] = 1;
                        std::swap(run[a], run[b]);
                        changed = true;
                        absorbed = true;
                    }
                }
            }
        }
        if (absorbed) continue;
        Op m = c.ops[i];
        for (auto& q : m.qubits) q = run[q];
        if (m.kind == GateKind::Barrier) std::sort(m.qubits.begin(), m.qubits.end());
        out.push_back(std::move(m));
    }
    c.ops = std::move(out);
    for (auto& v : sigma) v = run[v];
    return changed;
}

}  // namespace transpiler_detail

// Tracked form: at level 3 the returned circuit may act on relabeled wires,
// with the permutation reported in wire_of instead of trailing swap gates.
// Pass the architecture to forbid absorptions that would take later gates
// off couplers.
inline OptimizeResult optimize_tracked(const Circuit& c, int level,
                                       const Architecture* arch = nullptr) {
    if (level < 0 || level > 3) throw Error("optimize: level must be 0..3");
    OptimizeResult res;
    res.circuit = c;
    res.wire_of.resize(c.num_qubits);
    for (std::uint32_t i = 0; i < c.num_qubits; ++i) res.wire_of[i] = i;
    if (level == 0) return res;

    for (int round = 0; round < 20; ++round) {
        bool changed = false;
        if (level >= 3)
            changed |= transpiler_detail::absorb_pass(res.circuit, res.wire_of, arch);
        changed |= transpiler_detail::peephole_pass(res.circuit, level);
        if (!changed) break;
    }
    return res;
}

// Plain form: unitary-equivalent output on the original wire labels. Any
// absorbed permutation is restored with trailing swaps (3 CX each); a
// k-cycle needs k-1 swaps, never more than the absorptions removed.
inline Circuit optimize(const Circuit& c, int level) {
    OptimizeResult r = optimize_tracked(c, level, nullptr);
    if (!r.relabeled()) return std::move(r.circuit);
    auto arr = r.wire_of;
    for (std::uint32_t p = 0; p < arr.size(); ++p) {
        while (arr[p] != p) {
            std::uint32_t w = arr[p];
            transpiler_detail::emit_swap(r.circuit, w, p);
            std::swap(arr[p], arr[w]);
        }
    }
    return std::move(r.circuit);
}

// ---------------------------------------------------------------------------
// Full pipeline

inline TranspileOutcome transpile(const Circuit& c, const Architecture& arch,
                                  const TranspileConfig& config,
                                  const DistanceMatrix* dm = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    Circuit native = decompose_to_native(c);
    LayoutStrategy strategy = config.layout;
    if (strategy == LayoutStrategy::Auto)
        strategy = config.router == Router::Sabre ? LayoutStrategy::SabreRefined
                                                  : LayoutStrategy::Trivial;
    Layout l = initial_layout(native, arch, strategy, config.seed, config.sabre, dm);
    TranspileOutcome out =
        route(native, arch, l, config.router, config.seed, config.sabre, dm);
    if (config.opt_level > 0) {
        OptimizeResult opt = optimize_tracked(out.circuit, config.opt_level, &arch);
        out.circuit = std::move(opt.circuit);
        for (auto& p : out.final_layout.to_phys) p = opt.wire_of[p];
    }
    out.config = config;
    out.t_trans_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace qabench
