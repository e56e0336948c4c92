#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "bruteforce.hpp"
#include "oracle.hpp"
#include "qabench/benchgen.hpp"
#include "qabench/qasm.hpp"
#include "qabench/simulator.hpp"
#include "qabench/transpiler.hpp"

using namespace qabench;

namespace {

Architecture line(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
    return Architecture("line" + std::to_string(n), n, Family::Custom, n * (n - 1), pairs);
}

Architecture ring(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
    pairs.push_back({0, n - 1});
    return Architecture("ring" + std::to_string(n), n, Family::Custom, n * (n - 1), pairs);
}

Circuit random_native(std::mt19937_64& rng, std::uint32_t n, int gates) {
    Circuit c(n);
    std::uniform_real_distribution<double> angle(-6.4, 6.4);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<std::uint32_t> qd(0, n - 1);
    for (int g = 0; g < gates; ++g) {
        std::uint32_t a = qd(rng), b = qd(rng);
        while (b == a) b = qd(rng);
        switch (kind(rng)) {
            case 0: c.rz(angle(rng), a); break;
            case 1: c.sx(a); break;
            case 2: c.x(a); break;
            case 3: c.cx(a, b); break;
        }
    }
    return c;
}

Circuit random_rich(std::mt19937_64& rng, std::uint32_t n, int gates) {
    Circuit c(n);
    std::uniform_real_distribution<double> angle(-6.4, 6.4);
    std::uniform_int_distribution<int> kind(0, 8);
    std::uniform_int_distribution<std::uint32_t> qd(0, n - 1);
    for (int g = 0; g < gates; ++g) {
        std::uint32_t a = qd(rng), b = qd(rng);
        while (b == a) b = qd(rng);
        switch (kind(rng)) {
            case 0: c.h(a); break;
            case 1: c.x(a); break;
            case 2: c.sx(a); break;
            case 3: c.rz(angle(rng), a); break;
            case 4: c.rx(angle(rng), a); break;
            case 5: c.u(angle(rng), angle(rng), angle(rng), a); break;
            case 6: c.cx(a, b); break;
            case 7: c.cp(angle(rng), a, b); break;
            case 8: c.swap(a, b); break;
        }
    }
    return c;
}

bool native_only(const Circuit& c) {
    for (const auto& op : c.ops)
        if (is_unitary(op.kind) && !is_native(op.kind)) return false;
    return true;
}

}  // namespace

TEST_CASE("decomposition emits native gates and preserves the unitary") {
    std::mt19937_64 rng(42);
    for (int iter = 0; iter < 20; ++iter) {
        Circuit c = random_rich(rng, 4, 25);
        Circuit native = decompose_to_native(c);
        REQUIRE(native_only(native));
        for (std::size_t basis = 0; basis < 16; ++basis)
            REQUIRE(oracle::equal_up_to_phase(oracle::run(c, basis), oracle::run(native, basis),
                                              1e-9));
    }
}

TEST_CASE("one-qubit resynthesis hits the documented op budgets") {
    auto count_for = [](double t, double p, double l) {
        Circuit c(1);
        c.u(t, p, l, 0);
        Circuit native = decompose_to_native(c);
        for (std::size_t b = 0; b < 2; ++b)
            REQUIRE(oracle::equal_up_to_phase(oracle::run(c, b), oracle::run(native, b), 1e-9));
        return native.ops.size();
    };
    const double pi = 3.14159265358979323846;
    CHECK(count_for(0, 0, 0) == 0);        // identity vanishes
    CHECK(count_for(0, 0.4, 0.3) == 1);    // pure phase: one rz
    CHECK(count_for(pi / 2, 0.2, 0.9) == 3);
    CHECK(count_for(pi, 0.0, 0.0) <= 2);   // x-like
    CHECK(count_for(1.234, 0.5, -0.7) <= 5);

    Circuit h(1);
    h.h(0);
    CHECK(decompose_to_native(h).ops.size() == 3);
}

TEST_CASE("cp and swap decompositions are exact") {
    Circuit c(2);
    c.cp(0.77, 0, 1);
    c.swap(0, 1);
    Circuit native = decompose_to_native(c);
    CHECK(native_only(native));
    auto counts = gate_counts(native);
    CHECK(counts[GateKind::CX] == 5);
    for (std::size_t b = 0; b < 4; ++b)
        REQUIRE(oracle::equal_up_to_phase(oracle::run(c, b), oracle::run(native, b), 1e-10));
}

TEST_CASE("measures and barriers survive decomposition") {
    Circuit c(2, 2);
    c.h(0);
    c.barrier({0, 1});
    c.cx(0, 1);
    c.measure(0, 0);
    c.measure(1, 1);
    Circuit native = decompose_to_native(c);
    auto counts = gate_counts(native);
    CHECK(counts[GateKind::Measure] == 2);
    CHECK(counts[GateKind::Barrier] == 1);
}

TEST_CASE("basic router on a line inserts the textbook swap chain") {
    Architecture a = line(4);
    Circuit c(4);
    c.cx(0, 3);
    TranspileOutcome out = route(c, a, Layout::trivial(4, 4), Router::Basic);
    CHECK(out.swaps_inserted == 2);
    CHECK(routed_ok(out.circuit, a));
    auto counts = gate_counts(out.circuit);
    CHECK(counts[GateKind::CX] == 1 + 3 * 2);
    CHECK(oracle::equal_under_layout(oracle::run(c, 9), oracle::run(out.circuit, 9), 4,
                                     out.final_layout.to_phys, 1e-9));
}

TEST_CASE("adjacent gates route without swaps") {
    Architecture a = line(4);
    Circuit c(4);
    c.cx(0, 1);
    c.cx(1, 2);
    c.cx(2, 3);
    for (Router r : {Router::Basic, Router::Sabre}) {
        TranspileOutcome out = route(c, a, Layout::trivial(4, 4), r);
        INFO(router_name(r));
        CHECK(out.swaps_inserted == 0);
        CHECK(out.final_layout.to_phys == Layout::trivial(4, 4).to_phys);
    }
}

TEST_CASE("routers preserve semantics up to the tracked permutation") {
    std::mt19937_64 rng(7);
    for (const Architecture& a : {line(5), ring(5), line(6)}) {
        for (int iter = 0; iter < 8; ++iter) {
            Circuit c = random_native(rng, a.num_qubits, 18);
            for (Router r : {Router::Basic, Router::Sabre}) {
                TranspileOutcome out = route(c, a, Layout::trivial(a.num_qubits, a.num_qubits), r);
                INFO(a.name << " " << router_name(r) << " iter " << iter);
                REQUIRE(routed_ok(out.circuit, a));
                std::size_t basis = rng() & ((1u << a.num_qubits) - 1);
                REQUIRE(oracle::equal_under_layout(oracle::run(c, basis),
                                                   oracle::run(out.circuit, basis),
                                                   a.num_qubits, out.final_layout.to_phys,
                                                   1e-8));
            }
        }
    }
}

TEST_CASE("terminal measures are read at the final physical position") {
    Architecture a = line(4);
    Circuit c(4, 2);
    c.cx(0, 3);
    c.measure(0, 0);
    c.measure(3, 1);
    for (Router r : {Router::Basic, Router::Sabre}) {
        TranspileOutcome out = route(c, a, Layout::trivial(4, 4), r);
        // All measures sit behind the unitary part, on the final wires.
        std::size_t first_measure = out.circuit.ops.size();
        for (std::size_t i = 0; i < out.circuit.ops.size(); ++i)
            if (out.circuit.ops[i].kind == GateKind::Measure)
                first_measure = std::min(first_measure, i);
        for (std::size_t i = first_measure; i < out.circuit.ops.size(); ++i)
            CHECK(out.circuit.ops[i].kind == GateKind::Measure);
        std::vector<std::uint32_t> want = {out.final_layout.to_phys[0],
                                           out.final_layout.to_phys[3]};
        std::vector<std::uint32_t> got;
        for (const auto& op : out.circuit.ops)
            if (op.kind == GateKind::Measure) got.push_back(op.qubits[0]);
        CHECK(got == want);
        CHECK_NOTHROW(simulate(out.circuit));
    }
}

TEST_CASE("mid-circuit measures stay in place") {
    Architecture a = line(3);
    Circuit c(3, 2);
    c.measure(0, 0);
    c.h(0);
    c.measure(0, 1);
    TranspileOutcome out = route(c, a, Layout::trivial(3, 3), Router::Basic);
    std::vector<GateKind> kinds;
    for (const auto& op : out.circuit.ops) kinds.push_back(op.kind);
    REQUIRE(kinds.size() == 3);
    CHECK(kinds[0] == GateKind::Measure);
    CHECK(kinds[1] == GateKind::H);
    CHECK(kinds[2] == GateKind::Measure);
}

TEST_CASE("basic router swap counts stay within twice the optimum") {
    std::mt19937_64 rng(2026);
    int checked = 0;
    for (const Architecture& a : {line(4), line(5), ring(5)}) {
        for (int iter = 0; iter < 25; ++iter) {
            std::uniform_int_distribution<int> gd(1, 4);
            int gates = gd(rng);
            std::uniform_int_distribution<std::uint32_t> qd(0, a.num_qubits - 1);
            std::vector<bruteforce::Gate> pairs;
            Circuit c(a.num_qubits);
            for (int g = 0; g < gates; ++g) {
                std::uint32_t p = qd(rng), q = qd(rng);
                while (q == p) q = qd(rng);
                pairs.push_back({p, q});
                c.cx(p, q);
            }
            int best = bruteforce::min_swaps(a, pairs, a.num_qubits);
            TranspileOutcome out =
                route(c, a, Layout::trivial(a.num_qubits, a.num_qubits), Router::Basic);
            INFO(a.name << " iter " << iter << " best " << best << " got "
                        << out.swaps_inserted);
            REQUIRE(out.swaps_inserted >= static_cast<std::uint32_t>(best));
            if (best == 0)
                REQUIRE(out.swaps_inserted == 0);
            else
                REQUIRE(out.swaps_inserted <= static_cast<std::uint32_t>(2 * best));
            ++checked;
        }
    }
    CHECK(checked == 75);
}

TEST_CASE("sabre layouts are deterministic per seed") {
    Architecture a = builtin("r4");
    Circuit c = qft(8);
    Layout l1 = initial_layout(c, a, LayoutStrategy::SabreRefined, 5);
    Layout l2 = initial_layout(c, a, LayoutStrategy::SabreRefined, 5);
    CHECK(l1.to_phys == l2.to_phys);
    CHECK_NOTHROW(l1.check(a.num_qubits));

    bool any_differ = false;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Layout l = initial_layout(c, a, LayoutStrategy::SabreRefined, seed);
        if (l.to_phys != l1.to_phys) any_differ = true;
    }
    CHECK(any_differ);
}

TEST_CASE("layouts are bijections onto the physical qubits") {
    Layout t = Layout::trivial(3, 6);
    CHECK(t.to_phys.size() == 6);
    CHECK_NOTHROW(t.check(6));
    auto inv = t.inverse();
    for (std::uint32_t p = 0; p < 6; ++p) CHECK(t.to_phys[inv[p]] == p);

    Layout bad = t;
    bad.to_phys[0] = bad.to_phys[1];
    CHECK_THROWS_AS(bad.check(6), Error);
}

TEST_CASE("peephole merges one-qubit runs") {
    Circuit c(1);
    c.h(0);
    c.h(0);
    CHECK(optimize(c, 1).ops.empty());

    Circuit r(1);
    r.rz(0.4, 0);
    r.rz(0.6, 0);
    r.rz(-1.0, 0);
    CHECK(optimize(r, 1).ops.empty());

    Circuit m(1);
    m.rz(0.4, 0);
    m.rz(0.6, 0);
    Circuit om = optimize(m, 1);
    REQUIRE(om.ops.size() == 1);
    CHECK(om.ops[0].kind == GateKind::RZ);
    CHECK(om.ops[0].params[0] == Catch::Approx(1.0));

    Circuit xs(1);
    xs.x(0);
    xs.x(0);
    CHECK(optimize(xs, 1).ops.empty());
}

TEST_CASE("peephole cancels adjacent inverse cx pairs") {
    Circuit c(3);
    c.cx(0, 1);
    c.cx(0, 1);
    c.cx(1, 2);
    Circuit o = optimize(c, 1);
    REQUIRE(o.ops.size() == 1);
    CHECK(o.ops[0].qubits == std::vector<std::uint32_t>{1, 2});

    // Opposite orientation does not cancel.
    Circuit d(2);
    d.cx(0, 1);
    d.cx(1, 0);
    CHECK(optimize(d, 1).ops.size() == 2);
}

TEST_CASE("level 2 commutes diagonals through controls and x through targets") {
    Circuit c(2);
    c.rz(0.3, 0);
    c.cx(0, 1);
    c.rz(0.5, 0);
    c.cx(0, 1);
    Circuit o2 = optimize(c, 2);
    CHECK(o2.ops.size() <= 1 + 0 + 0 + 0 + 1);  // merged rz, cancelled cx pair

    Circuit x(2);
    x.x(1);
    x.cx(0, 1);
    x.x(1);
    x.cx(0, 1);
    Circuit ox = optimize(x, 2);
    CHECK(ox.ops.empty());

    // Level 1 must leave the interleaved form alone.
    CHECK(optimize(c, 1).ops.size() == 4);
}

TEST_CASE("level 3 folds a swap triple into the following cx") {
    Circuit c(2);
    c.cx(0, 1);
    c.cx(1, 0);
    c.cx(0, 1);
    c.cx(0, 1);

    OptimizeResult res = optimize_tracked(c, 3);
    CHECK(res.relabeled());
    CHECK(res.wire_of == std::vector<std::uint32_t>{1, 0});
    REQUIRE(res.circuit.ops.size() == 1);
    CHECK(res.circuit.ops[0].kind == GateKind::CX);
    CHECK(res.circuit.ops[0].qubits == std::vector<std::uint32_t>{1, 0});

    // The untracked form restores the relabeling with trailing swaps and
    // still wins on gate count or ties.
    Circuit plain = optimize(c, 3);
    CHECK(plain.ops.size() <= c.ops.size());
    for (std::size_t b = 0; b < 4; ++b)
        REQUIRE(oracle::equal_up_to_phase(oracle::run(c, b), oracle::run(plain, b), 1e-9));
}

TEST_CASE("optimize never grows the gate count") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 15; ++iter) {
        Circuit c = random_native(rng, 4, 30);
        std::uint64_t base = tally_gates(c).total();
        for (int level = 0; level <= 3; ++level) {
            Circuit o = optimize(c, level);
            INFO("iter " << iter << " level " << level);
            CHECK(tally_gates(o).total() <= base);
        }
    }
}

TEST_CASE("optimize preserves the unitary at every level") {
    std::mt19937_64 rng(13);
    for (int iter = 0; iter < 12; ++iter) {
        Circuit c = random_native(rng, 4, 24);
        for (int level = 0; level <= 3; ++level) {
            Circuit o = optimize(c, level);
            INFO("iter " << iter << " level " << level);
            for (std::size_t b = 0; b < 16; b += 3)
                REQUIRE(oracle::equal_up_to_phase(oracle::run(c, b), oracle::run(o, b), 1e-8));
        }
    }
}

TEST_CASE("optimize level 0 is the identity") {
    std::mt19937_64 rng(17);
    Circuit c = random_native(rng, 3, 15);
    Circuit o = optimize(c, 0);
    CHECK(serialize_qasm(o) == serialize_qasm(c));
    CHECK_THROWS_AS(optimize(c, 4), Error);
    CHECK_THROWS_AS(optimize(c, -1), Error);
}

TEST_CASE("tracked optimization keeps routed circuits on couplers") {
    std::mt19937_64 rng(19);
    Architecture a = builtin("r5");
    for (int iter = 0; iter < 6; ++iter) {
        Circuit c = random_native(rng, 7, 30);
        TranspileConfig cfg;
        cfg.router = Router::Sabre;
        cfg.opt_level = 3;
        cfg.seed = iter;
        TranspileOutcome out = transpile(c, a, cfg);
        INFO("iter " << iter);
        REQUIRE(routed_ok(out.circuit, a));
        REQUIRE(equivalence(c, out.circuit, out.final_layout) >= 1.0 - 1e-9);
    }
}

TEST_CASE("transpile pipeline is deterministic") {
    Architecture a = builtin("s4");
    Circuit c = qft(7);
    TranspileConfig cfg;
    cfg.router = Router::Sabre;
    cfg.opt_level = 2;
    cfg.seed = 3;
    TranspileOutcome o1 = transpile(c, a, cfg);
    TranspileOutcome o2 = transpile(c, a, cfg);
    CHECK(serialize_qasm(o1.circuit) == serialize_qasm(o2.circuit));
    CHECK(o1.final_layout.to_phys == o2.final_layout.to_phys);
    CHECK(o1.swaps_inserted == o2.swaps_inserted);
}

TEST_CASE("transpile maps small circuits onto every builtin") {
    Circuit c = qft(6);
    for (const auto& name : builtin_names()) {
        Architecture a = builtin(name);
        for (Router r : {Router::Basic, Router::Sabre}) {
            TranspileConfig cfg;
            cfg.router = r;
            cfg.opt_level = 1;
            cfg.seed = 1;
            TranspileOutcome out = transpile(c, a, cfg);
            INFO(name << " " << router_name(r));
            REQUIRE(routed_ok(out.circuit, a));
            REQUIRE(native_only(out.circuit));
            REQUIRE(equivalence(c, out.circuit, out.final_layout) >= 1.0 - 1e-9);
        }
    }
}

TEST_CASE("transpile rejects circuits wider than the architecture") {
    Circuit c(6, 0);
    c.h(0);
    Architecture a = line(4);
    TranspileConfig cfg;
    CHECK_THROWS_AS(transpile(c, a, cfg), Error);
}

TEST_CASE("auto layout follows the router") {
    Circuit c = qft(5);
    Architecture a = builtin("r3");
    TranspileConfig cfg;
    cfg.opt_level = 0;
    cfg.seed = 9;

    cfg.router = Router::Basic;
    TranspileOutcome basic = transpile(c, a, cfg);
    CHECK(basic.initial_layout.to_phys == Layout::trivial(5, 32).to_phys);

    cfg.router = Router::Sabre;
    cfg.layout = LayoutStrategy::Trivial;
    TranspileOutcome pinned = transpile(c, a, cfg);
    CHECK(pinned.initial_layout.to_phys == Layout::trivial(5, 32).to_phys);
}

TEST_CASE("swap emission uses three cx gates") {
    Architecture a = line(3);
    Circuit c(3);
    c.cx(0, 2);
    TranspileOutcome out = route(c, a, Layout::trivial(3, 3), Router::Basic);
    CHECK(out.swaps_inserted == 1);
    CHECK(gate_counts(out.circuit)[GateKind::CX] == 4);
    CHECK(gate_counts(out.circuit)[GateKind::Swap] == 0);
}
