// Acceptance gate for the toolkit. Each numbered check prints one PASS or
// FAIL line with the measured values; the exit status is the number of
// failures. The CLI binary path is argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "bruteforce.hpp"
#include "oracle.hpp"
#include "qabench/benchgen.hpp"
#include "qabench/harness.hpp"
#include "qabench/qasm.hpp"

using namespace qabench;

namespace {

int failures = 0;

void report_line(int id, bool pass, const std::string& what) {
    std::printf("[%s] %d %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
    CmdResult r;
    FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// --------------------------------------------------------------------------
// 1. The architecture table from the CLI.

void check_architecture_table(const std::string& cli) {
    struct Row {
        std::uint32_t n_con;
        double c;
    };
    const std::map<std::string, Row> expect = {
        {"r1", {188, 1.00}}, {"r2", {148, 0.79}}, {"r3", {104, 0.55}},
        {"r4", {80, 0.43}},  {"r5", {80, 0.43}},  {"s1", {188, 1.00}},
        {"s2", {152, 0.81}}, {"s3", {104, 0.55}}, {"s4", {78, 0.41}},
        {"s5", {78, 0.41}},
    };

    Timer t;
    CmdResult res = run_cmd("\"" + cli + "\" list-archs");
    double elapsed = t.s();

    int good = 0;
    std::istringstream is(res.out);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name, family;
        std::uint32_t qubits = 0, n_con = 0, n_full = 0;
        double c = -1;
        ls >> name >> family >> qubits >> n_con >> n_full >> c;
        auto it = expect.find(name);
        if (it == expect.end()) continue;
        double rounded = std::round(c * 100.0) / 100.0;
        if (n_con == it->second.n_con && qubits == 32 && n_full == 188 &&
            std::abs(rounded - it->second.c) <= 0.005)
            ++good;
    }
    bool pass = good == 10 && res.status == 0 && elapsed < 1.0;
    report_line(1, pass,
                "architecture table: " + std::to_string(good) +
                    "/10 rows match (n_con exact, c within 0.005 of the published "
                    "2-decimal values), list-archs exit " +
                    std::to_string(res.status) + " in " + fmt(elapsed) + "s");
}

// --------------------------------------------------------------------------
// 2. Full suite routing validity.

void check_routing_validity() {
    std::vector<NamedCircuit> benches;
    for (const auto& name : default_suite_names()) benches.push_back({name, make_benchmark(name)});
    std::vector<Architecture> archs;
    for (const auto& name : builtin_names()) archs.push_back(builtin(name));

    Protocol p;
    p.verify = true;  // every output is coupler-checked, selections are replayed
    p.timing = TimingMode::Off;
    p.jobs = 1;

    Timer t;
    std::size_t errors = 0, selected = 0, total = 0;
    std::string first_error;
    try {
        auto records = run_suite(benches, archs, p);
        total = records.size();
        for (const auto& r : records) {
            if (r.status.rfind("error:", 0) == 0) {
                ++errors;
                if (first_error.empty())
                    first_error = r.benchmark + "/" + r.arch + ": " + r.status;
            }
            if (r.selected && r.ok()) ++selected;
        }
    } catch (const std::exception& e) {
        report_line(2, false, std::string("routing validity: suite threw: ") + e.what());
        return;
    }
    double elapsed = t.s();
    std::size_t pairs = benches.size() * archs.size();
    bool pass = errors == 0 && selected == pairs && total == pairs * p.outputs_per_pair() &&
                elapsed < 600.0;
    std::string what = "routing validity: " + std::to_string(total) + " outputs over " +
                       std::to_string(pairs) + " pairs, " + std::to_string(errors) +
                       " coupler/equivalence errors, " + std::to_string(selected) +
                       " clean selections, " + fmt(elapsed) + "s";
    if (!first_error.empty()) what += " (first: " + first_error + ")";
    report_line(2, pass, what);
}

// --------------------------------------------------------------------------
// 3. Semantic equivalence across every arch, router and level.

void check_equivalence() {
    Circuit mini(7, 4);
    mini.h(0);
    mini.cx(0, 1);
    mini.cx(1, 2);
    append_stabilizer_round(mini, 3, {"ZZI", "IZZ"}, 3, 0);
    append_stabilizer_round(mini, 3, {"ZZI", "IZZ"}, 5, 2);

    std::vector<NamedCircuit> benches = {{"ising_6", ising(6)},
                                         {"qft_8", qft(8)},
                                         {"qpe_6", qpe(6, 1.0 / 8)},
                                         {"repetition_7", mini}};

    double worst = 1.0;
    std::string worst_at = "none";
    std::size_t checked = 0;
    for (const auto& name : builtin_names()) {
        Architecture arch = builtin(name);
        DistanceMatrix dm(arch);
        for (const auto& bench : benches) {
            for (Router router : {Router::Basic, Router::Sabre}) {
                for (int level = 0; level <= 3; ++level) {
                    TranspileConfig cfg;
                    cfg.router = router;
                    cfg.opt_level = level;
                    cfg.seed = checked;
                    TranspileOutcome out = transpile(bench.circuit, arch, cfg, &dm);
                    double f = equivalence(bench.circuit, out.circuit, out.final_layout);
                    ++checked;
                    if (f < worst) {
                        worst = f;
                        worst_at = bench.name + "/" + name + "/" +
                                   router_name(router) + "/l" + std::to_string(level);
                    }
                }
            }
        }
    }
    bool pass = worst >= 1.0 - 1e-9 && checked == 320;
    report_line(3, pass,
                "equivalence: " + std::to_string(checked) +
                    " transpilations, worst fidelity " + fmt(worst) + " at " + worst_at +
                    " (threshold 1-1e-9)");
}

// --------------------------------------------------------------------------
// 4. Score ordering across the connectivity ladder.

void check_score_ordering() {
    auto family_chain = [](const std::vector<std::string>& names, std::string& shown,
                           bool& ordered) {
        std::vector<NamedCircuit> benches = {{"qft_12", make_benchmark("qft_12")}};
        std::vector<Architecture> archs;
        for (const auto& n : names) archs.push_back(builtin(n));
        Protocol p;
        p.timing = TimingMode::Off;
        p.jobs = 1;
        auto records = run_suite(benches, archs, p);

        std::vector<double> norm(names.size(), 0.0);
        std::vector<double> gates(names.size(), 0.0), depths(names.size(), 0.0);
        for (const auto& r : records)
            if (r.selected)
                for (std::size_t i = 0; i < names.size(); ++i)
                    if (r.arch == names[i]) {
                        norm[i] = r.norm_score;
                        gates[i] = r.norm_gates;
                        depths[i] = r.norm_depth;
                    }
        ordered = true;
        for (std::size_t i = 0; i + 1 < norm.size(); ++i)
            if (norm[i] > norm[i + 1] * 1.05) ordered = false;
        std::ostringstream os;
        for (std::size_t i = 0; i < norm.size(); ++i)
            os << (i ? " <= " : "") << names[i] << ":" << fmt(norm[i]);
        shown = os.str();
        return std::make_pair(gates.back(), depths.back());
    };

    std::string r_chain, s_chain;
    bool r_ok = false, s_ok = false;
    auto [r4_gates, r4_depth] = family_chain({"r1", "r2", "r3", "r4"}, r_chain, r_ok);
    family_chain({"s1", "s2", "s3", "s4"}, s_chain, s_ok);

    report_line(4, r_ok && s_ok,
                "qft_12 selected norm score rises as connectivity drops (5% slack per "
                "step): " +
                    r_chain + " | " + s_chain);
    std::printf("       qft_12 on r4: gate ratio %s (loose expectation > ~5), depth ratio %s "
                "(> ~4); informational only\n",
                fmt(r4_gates).c_str(), fmt(r4_depth).c_str());
}

// --------------------------------------------------------------------------
// 5. Error model anchors.

void check_error_model() {
    Circuit one_cx(2);
    one_cx.cx(0, 1);
    bool cx_ok = score_simplified(one_cx) == 6.4e-3;

    bool close = true;
    double worst_rel = 0.0;
    for (int d = 1; d <= 15; ++d) {
        Circuit c(2);
        for (int i = 0; i < d; ++i) c.cx(0, 1);
        double simp = score_simplified(c);
        if (simp > 0.01) break;
        double full = score_full(c);
        double rel = std::abs(full - simp) / simp;
        worst_rel = std::max(worst_rel, rel);
        if (rel > 0.01) close = false;
    }
    Circuit mixed(3);
    mixed.h(0);
    mixed.cx(0, 1);
    mixed.sx(2);
    mixed.rz(0.4, 1);
    double simp = score_simplified(mixed);
    double rel = std::abs(score_full(mixed) - simp) / simp;
    worst_rel = std::max(worst_rel, rel);
    if (simp <= 0.01 && rel > 0.01) close = false;

    report_line(5, cx_ok && close,
                "error model: single cx scores " + fmt(score_simplified(one_cx)) +
                    " (want 0.0064 exactly); exponential vs linear score agree within " +
                    fmt(worst_rel * 100) + "% while depth*error <= 0.01 (limit 1%)");
}

// --------------------------------------------------------------------------
// 6. Simulator and basic-router oracles.

void check_oracles() {
    std::mt19937_64 rng(20260816);

    double worst_amp = 0.0;
    for (int iter = 0; iter < 10; ++iter) {
        Circuit c(6);
        std::uniform_real_distribution<double> angle(-6.3, 6.3);
        std::uniform_int_distribution<int> kind(0, 8);
        std::uniform_int_distribution<std::uint32_t> qd(0, 5);
        for (int g = 0; g < 40; ++g) {
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
        SimResult sim = simulate(c, 0);
        oracle::Vec ref = oracle::run(c, 0);
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst_amp = std::max(worst_amp, std::abs(sim.state.amps[i] - ref[i]));
    }
    bool sim_ok = worst_amp <= 1e-10;

    auto line = [](std::uint32_t n) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::uint32_t i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
        return Architecture("line" + std::to_string(n), n, Family::Custom, n * (n - 1), pairs);
    };
    auto ring = [](std::uint32_t n) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        for (std::uint32_t i = 0; i + 1 < n; ++i) pairs.push_back({i, i + 1});
        pairs.push_back({0, n - 1});
        return Architecture("ring" + std::to_string(n), n, Family::Custom, n * (n - 1), pairs);
    };

    double worst_ratio = 1.0;
    bool router_ok = true;
    int instances = 0;
    for (const Architecture& arch : {line(4), line(5), ring(5)}) {
        for (int iter = 0; iter < 12; ++iter) {
            std::uniform_int_distribution<int> gd(1, 4);
            std::uniform_int_distribution<std::uint32_t> qd(0, arch.num_qubits - 1);
            int gates = gd(rng);
            std::vector<bruteforce::Gate> pairs;
            Circuit c(arch.num_qubits);
            for (int g = 0; g < gates; ++g) {
                std::uint32_t a = qd(rng), b = qd(rng);
                while (b == a) b = qd(rng);
                pairs.push_back({a, b});
                c.cx(a, b);
            }
            int best = bruteforce::min_swaps(arch, pairs, arch.num_qubits);
            TranspileOutcome out =
                route(c, arch, Layout::trivial(arch.num_qubits, arch.num_qubits),
                      Router::Basic);
            ++instances;
            if (best == 0) {
                if (out.swaps_inserted != 0) router_ok = false;
            } else {
                double ratio = double(out.swaps_inserted) / double(best);
                worst_ratio = std::max(worst_ratio, ratio);
                if (ratio > 2.0) router_ok = false;
            }
        }
    }

    report_line(6, sim_ok && router_ok,
                "oracles: worst amplitude gap vs full-matrix reference " + fmt(worst_amp) +
                    " over 10 random 6-qubit circuits (limit 1e-10); basic router within " +
                    fmt(worst_ratio) + "x of brute-force minimum swaps on " +
                    std::to_string(instances) + " instances (limit 2x)");
}

// --------------------------------------------------------------------------
// 7. Wide benchmarks transpile and score but are not simulated.

void check_wide_benchmarks() {
    std::vector<NamedCircuit> benches = {{"qft_30", make_benchmark("qft_30")},
                                         {"qft_32", make_benchmark("qft_32")},
                                         {"ising_6", make_benchmark("ising_6")}};
    std::vector<Architecture> archs = {builtin("r3")};
    Protocol p;
    p.opt_levels = {1};
    p.trials = 1;
    p.simulate = true;
    p.jobs = 1;

    bool pass = true;
    std::string note;
    try {
        auto records = run_suite(benches, archs, p);
        CsvTable t = to_csv_table(records);
        int cb = t.column("benchmark"), cs = t.column("status"), csel = t.column("selected");
        int ct = t.column("t_sim_s"), cn = t.column("norm_t_sim"), cg = t.column("n_gate"),
            cc = t.column("score");
        for (const auto& row : t.rows) {
            if (row[csel] != "1") continue;
            bool wide = row[cb] == "qft_30" || row[cb] == "qft_32";
            if (wide) {
                if (row[cs] != "capacity" || !row[ct].empty() || !row[cn].empty()) pass = false;
                if (row[cg] == "0" || std::strtod(row[cc].c_str(), nullptr) <= 0) pass = false;
                note += row[cb] + ":" + row[cs] + " ";
            } else {
                if (row[cs] != "ok" || row[ct].empty()) pass = false;
                note += row[cb] + ":t_sim=" + row[ct] + "s ";
            }
        }
        if (t.rows.size() != 6) pass = false;
    } catch (const std::exception& e) {
        pass = false;
        note = std::string("suite threw: ") + e.what();
    }
    report_line(7, pass,
                "capacity handling: qft_30/qft_32 transpiled and scored with empty timing "
                "cells, ising_6 simulated; " +
                    note);
}

// --------------------------------------------------------------------------
// 8. Byte-identical reruns.

void check_determinism(const std::string& cli) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qabench_accept";
    fs::create_directories(dir);
    std::string a = (dir / "det_a.csv").string();
    std::string b = (dir / "det_b.csv").string();

    std::string flags = " run --benches ising_6,qft_12 --archs r2,s4 --trials 2 --seed 7"
                        " --timing off --quiet --out ";
    CmdResult ra = run_cmd("\"" + cli + "\"" + flags + a);
    CmdResult rb = run_cmd("\"" + cli + "\"" + flags + b);

    std::string ca = slurp_file(a), cb = slurp_file(b);
    bool pass = ra.status == 0 && rb.status == 0 && !ca.empty() && ca == cb;
    report_line(8, pass,
                "determinism: two identical runs wrote " + std::to_string(ca.size()) +
                    " and " + std::to_string(cb.size()) +
                    " bytes, byte-identical: " + (ca == cb ? "yes" : "no") +
                    " (exit " + std::to_string(ra.status) + "/" + std::to_string(rb.status) +
                    ")");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "qabench";
    std::printf("acceptance checks (cli: %s)\n", cli.c_str());

    check_architecture_table(cli);
    check_routing_validity();
    check_equivalence();
    check_score_ordering();
    check_error_model();
    check_oracles();
    check_wide_benchmarks();
    check_determinism(cli);

    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
