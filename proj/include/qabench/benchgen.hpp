#pragma once

// Benchmark circuit generators. The default suite is nine circuits:
// qft_12, qft_16, qft_30, qft_32, qpe_15, steane_25, surface_15,
// surface_25, ising_6 (name suffix = qubit count).

#include <cstdint>
#include <string>
#include <vector>

#include "qabench/circuit.hpp"
#include "qabench/gates.hpp"

namespace qabench {

// Little-endian convention throughout: qubit 0 is the least-significant bit
// of a register value.

inline Circuit qft(std::uint32_t n) {
    if (n < 1) throw Error("qft: need at least 1 qubit");
    Circuit c(n);
    for (std::uint32_t j = n; j-- > 0;) {
        c.h(j);
        for (std::uint32_t k = j; k-- > 0;) c.cp(kPi / double(1u << (j - k)), j, k);
    }
    for (std::uint32_t i = 0; i < n / 2; ++i) c.swap(i, n - 1 - i);
    return c;
}

namespace benchgen_detail {

// Inverse of qft(n) emitted onto qubits 0..n-1 of c: reversed gate order
// with negated controlled-phase angles.
inline void append_inverse_qft(Circuit& c, std::uint32_t n) {
    Circuit f = qft(n);
    for (auto it = f.ops.rbegin(); it != f.ops.rend(); ++it) {
        Op op = *it;
        if (op.kind == GateKind::CP) op.params[0] = -op.params[0];
        c.append(std::move(op));
    }
}

}  // namespace benchgen_detail

// Phase estimation of the single-qubit phase gate diag(1, e^{2*pi*i*theta}).
// Qubits 0..n-2 count, qubit n-1 holds the |1> eigenstate; the counting
// register is measured, clbit j = counting qubit j.
inline Circuit qpe(std::uint32_t n, double theta = 0.15) {
    if (n < 2) throw Error("qpe: need at least 2 qubits");
    if (theta < 0.0 || theta >= 1.0) throw Error("qpe: theta must lie in [0,1)");
    std::uint32_t t = n - 1;
    Circuit c(n, t);
    c.x(n - 1);
    for (std::uint32_t j = 0; j < t; ++j) c.h(j);
    for (std::uint32_t j = 0; j < t; ++j)
        c.cp(2 * kPi * theta * double(1ull << j), j, n - 1);
    benchgen_detail::append_inverse_qft(c, t);
    for (std::uint32_t j = 0; j < t; ++j) c.measure(j, j);
    return c;
}

// First-order Trotterization of H = -J sum Z_i Z_{i+1} - h sum X_i on an
// open chain. Per step: (n-1) ZZ blocks CX.RZ(2Jt/steps).CX, then n RX.
inline Circuit ising(std::uint32_t n, double J = 1.0, double h = 1.0, double t = 1.0,
                     std::uint32_t steps = 3) {
    if (n < 2) throw Error("ising: need at least 2 qubits");
    if (steps < 1) throw Error("ising: need at least 1 step");
    Circuit c(n);
    double zz = 2 * J * t / steps;
    double xx = 2 * h * t / steps;
    for (std::uint32_t s = 0; s < steps; ++s) {
        for (std::uint32_t i = 0; i + 1 < n; ++i) {
            c.cx(i, i + 1);
            c.rz(zz, i + 1);
            c.cx(i, i + 1);
        }
        for (std::uint32_t i = 0; i < n; ++i) c.rx(xx, i);
    }
    return c;
}

// Surface-code syndrome extraction on a rows x cols checkerboard. Data
// qubits sit at (i+j) even, ancillas at (i+j) odd; even-row ancillas are
// X-type, odd-row ancillas Z-type. Each round: H on X-ancillas, one CX
// sweep per direction in N, W, E, S order, H again, then measurement of
// every ancilla. Qubit id at (i,j) is i*cols + j.
inline Circuit surface(std::uint32_t rows, std::uint32_t cols, std::uint32_t rounds = 1) {
    if (rows % 2 == 0 || cols % 2 == 0) throw Error("surface: rows and cols must be odd");
    if (rows < 3 || cols < 3) throw Error("surface: lattice must be at least 3x3");
    if (rounds < 1) throw Error("surface: need at least 1 round");
    auto id = [&](std::uint32_t i, std::uint32_t j) { return i * cols + j; };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ancillas;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j)
            if ((i + j) % 2 == 1) ancillas.emplace_back(i, j);
    std::uint32_t na = static_cast<std::uint32_t>(ancillas.size());
    Circuit c(rows * cols, na * rounds);
    auto x_type = [&](std::uint32_t i) { return i % 2 == 0; };
    for (std::uint32_t r = 0; r < rounds; ++r) {
        for (auto [i, j] : ancillas)
            if (x_type(i)) c.h(id(i, j));
        const int dirs[4][2] = {{-1, 0}, {0, -1}, {0, 1}, {1, 0}};  // N, W, E, S
        for (const auto& d : dirs)
            for (auto [i, j] : ancillas) {
                int ni = static_cast<int>(i) + d[0], nj = static_cast<int>(j) + d[1];
                if (ni < 0 || nj < 0 || ni >= static_cast<int>(rows) ||
                    nj >= static_cast<int>(cols))
                    continue;
                std::uint32_t anc = id(i, j), data = id(ni, nj);
                if (x_type(i))
                    c.cx(anc, data);
                else
                    c.cx(data, anc);
            }
        for (auto [i, j] : ancillas)
            if (x_type(i)) c.h(id(i, j));
        for (std::uint32_t a = 0; a < na; ++a)
            c.measure(id(ancillas[a].first, ancillas[a].second), r * na + a);
    }
    return c;
}

// One syndrome-extraction round for a CSS code: stabilizer k is read out
// on ancilla ancilla_base+k into clbit clbit_base+k. X-type stabilizers use
// an H-conjugated ancilla controlling CX into the data; Z-type use data
//-controlled CX into the ancilla.
inline void append_stabilizer_round(Circuit& c, std::uint32_t num_data,
                                    const std::vector<std::string>& stabilizers,
                                    std::uint32_t ancilla_base, std::uint32_t clbit_base) {
    for (std::size_t k = 0; k < stabilizers.size(); ++k) {
        const std::string& s = stabilizers[k];
        if (s.size() != num_data)
            throw Error("stabilizer '" + s + "': length " + std::to_string(s.size()) +
                        " does not match data count " + std::to_string(num_data));
        bool has_x = false, has_z = false;
        for (char ch : s) {
            if (ch == 'X') has_x = true;
            else if (ch == 'Z') has_z = true;
            else if (ch != 'I')
                throw Error(std::string("stabilizer '") + s + "': unsupported character '" + ch +
                            "' (expected I, X or Z)");
        }
        if (has_x && has_z)
            throw Error("stabilizer '" + s + "' mixes X and Z (not a CSS generator)");
        if (!has_x && !has_z)
            throw Error("stabilizer '" + s + "' has no support");
        std::uint32_t anc = ancilla_base + static_cast<std::uint32_t>(k);
        if (has_x) c.h(anc);
        for (std::uint32_t q = 0; q < num_data; ++q) {
            if (s[q] == 'I') continue;
            if (has_x)
                c.cx(anc, q);
            else
                c.cx(q, anc);
        }
        if (has_x) c.h(anc);
        c.measure(anc, clbit_base + static_cast<std::uint32_t>(k));
    }
}

// Standalone one-round CSS syndrome circuit: data qubits 0..num_data-1,
// one fresh ancilla per stabilizer, one clbit per stabilizer.
inline Circuit stabilizer_round(std::uint32_t num_data,
                                const std::vector<std::string>& stabilizers) {
    if (num_data == 0) throw Error("stabilizer_round: need data qubits");
    if (stabilizers.empty()) throw Error("stabilizer_round: need at least one stabilizer");
    Circuit c(num_data + static_cast<std::uint32_t>(stabilizers.size()),
              static_cast<std::uint32_t>(stabilizers.size()));
    append_stabilizer_round(c, num_data, stabilizers, num_data, 0);
    return c;
}

// Steane [[7,1,3]] |0>_L encoder followed by syndrome rounds on fresh
// ancillas: 7 + 6*rounds qubits, 6*rounds clbits. The encoder puts an H on
// each X-stabilizer pivot and fans out with CX across the row support.
inline Circuit steane(std::uint32_t rounds = 3) {
    if (rounds < 1) throw Error("steane: need at least 1 round");
    Circuit c(7 + 6 * rounds, 6 * rounds);
    const std::vector<std::string> x_rows = {"IIIXXXX", "IXXIIXX", "XIXIXIX"};
    const std::vector<std::string> z_rows = {"IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"};
    const std::uint32_t pivots[3] = {3, 1, 0};
    for (std::size_t r = 0; r < 3; ++r) {
        std::uint32_t p = pivots[r];
        c.h(p);
        for (std::uint32_t q = 0; q < 7; ++q)
            if (x_rows[r][q] == 'X' && q != p) c.cx(p, q);
    }
    std::vector<std::string> all = x_rows;
    all.insert(all.end(), z_rows.begin(), z_rows.end());
    for (std::uint32_t r = 0; r < rounds; ++r)
        append_stabilizer_round(c, 7, all, 7 + 6 * r, 6 * r);
    return c;
}

// ---------------------------------------------------------------------------
// Named benchmarks

struct BenchmarkSpec {
    std::string name;
    std::string family;
    std::uint32_t qubits = 0;
    double theta = 0.15;                       // qpe
    double J = 1.0, h = 1.0, t = 1.0;          // ising
    std::uint32_t steps = 3;                   // ising
    std::uint32_t rows = 0, cols = 0;          // surface
    std::uint32_t rounds = 1;                  // surface / steane

    Circuit build() const {
        if (family == "qft") return qft(qubits);
        if (family == "qpe") return qpe(qubits, theta);
        if (family == "ising") return ising(qubits, J, h, t, steps);
        if (family == "surface") return surface(rows, cols, rounds);
        if (family == "steane") return steane(rounds);
        throw Error("unknown benchmark family '" + family + "'");
    }
};

inline BenchmarkSpec benchmark_spec(const std::string& name) {
    auto us = name.rfind('_');
    if (us == std::string::npos || us + 1 >= name.size())
        throw Error("benchmark name '" + name + "' is not of the form family_N");
    std::string family = name.substr(0, us);
    std::uint32_t n = 0;
    try {
        n = static_cast<std::uint32_t>(std::stoul(name.substr(us + 1)));
    } catch (...) {
        throw Error("benchmark name '" + name + "' has a bad qubit count");
    }
    BenchmarkSpec s;
    s.name = name;
    s.family = family;
    s.qubits = n;
    if (family == "qft" || family == "qpe" || family == "ising") return s;
    if (family == "surface") {
        if (n == 15) {
            s.rows = 5;
            s.cols = 3;
        } else if (n == 25) {
            s.rows = 5;
            s.cols = 5;
        } else {
            throw Error("surface benchmark sizes supported: 15, 25");
        }
        s.rounds = 1;
        return s;
    }
    if (family == "steane") {
        if (n != 25) throw Error("steane benchmark size supported: 25");
        s.rounds = 3;
        return s;
    }
    throw Error("unknown benchmark family '" + family + "'");
}

inline std::vector<std::string> default_suite_names() {
    return {"qft_12", "qft_16", "qft_30", "qft_32", "qpe_15",
            "steane_25", "surface_15", "surface_25", "ising_6"};
}

inline Circuit make_benchmark(const std::string& name) {
    BenchmarkSpec s = benchmark_spec(name);
    Circuit c = s.build();
    if (c.num_qubits != s.qubits)
        throw Error("benchmark '" + name + "' generated " + std::to_string(c.num_qubits) +
                    " qubits, expected " + std::to_string(s.qubits));
    return c;
}

}  // namespace qabench
