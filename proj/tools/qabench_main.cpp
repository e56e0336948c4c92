// qabench command line tool.
//
// Subcommands: list-archs, show-arch, gen-bench, transpile, simulate,
// run, report. `run` drives the full benchmark-by-architecture protocol
// and writes the results CSV; `report` turns such a CSV into plot tables.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qabench/arch.hpp"
#include "qabench/benchgen.hpp"
#include "qabench/harness.hpp"
#include "qabench/qasm.hpp"
#include "qabench/simulator.hpp"
#include "qabench/transpiler.hpp"

namespace {

using namespace qabench;

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

bool looks_like_path(const std::string& s) {
    return s.find('/') != std::string::npos || s.find('.') != std::string::npos;
}

Architecture resolve_arch(const std::string& spec) {
    if (!looks_like_path(spec)) return builtin(spec);
    std::ifstream is(spec);
    if (!is) throw Error("cannot open architecture file '" + spec + "'");
    std::vector<std::string> warnings;
    Architecture a = load_architecture(is, &warnings);
    for (const auto& w : warnings) std::cerr << spec << ": warning: " << w << "\n";
    return a;
}

Circuit load_circuit(const std::string& path) {
    ParseResult res = parse_qasm(slurp(path));
    for (const auto& d : res.diagnostics) std::cerr << path << ":" << d.str() << "\n";
    if (!res.circuit) throw Error("failed to parse '" + path + "'");
    return *res.circuit;
}

NamedCircuit resolve_bench(const std::string& spec) {
    if (!looks_like_path(spec)) return {spec, make_benchmark(spec)};
    std::string name = spec;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    if (name.size() > 5 && name.substr(name.size() - 5) == ".qasm")
        name = name.substr(0, name.size() - 5);
    return {name, load_circuit(spec)};
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void apply_model_file(const std::string& path, ErrorModel& model) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open model file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, value;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        key = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));
        if (key == "e1q") model.e1q = std::stod(value);
        else if (key == "e2q") model.e2q = std::stod(value);
        else if (key == "beta") model.beta = std::stod(value);
        else if (key == "include_measure") model.include_measure = value == "1" || value == "true";
        else throw Error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

int cmd_list_archs() {
    std::cout << "# name family qubits n_con n_full c\n";
    for (const auto& name : builtin_names()) {
        Architecture a = builtin(name);
        std::cout << a.name << ' ' << family_name(a.family) << ' ' << a.num_qubits << ' '
                  << a.n_con() << ' ' << a.n_full << ' ' << fmt9(connectivity(a)) << "\n";
    }
    return 0;
}

int cmd_show_arch(const std::string& name, bool dot) {
    Architecture a = resolve_arch(name);
    if (dot)
        std::cout << to_dot(a);
    else
        save_architecture(a, std::cout);
    return 0;
}

int cmd_gen_bench(const std::string& family, std::uint32_t qubits, const std::string& out,
                  double theta, std::uint32_t steps, std::uint32_t rounds, double J, double h,
                  double t, bool have_rounds) {
    BenchmarkSpec spec = benchmark_spec(family + "_" + std::to_string(qubits));
    spec.theta = theta;
    spec.steps = steps;
    spec.J = J;
    spec.h = h;
    spec.t = t;
    if (have_rounds) spec.rounds = rounds;
    Circuit c = spec.build();
    std::string text = serialize_qasm(c);
    if (out == "-") {
        std::cout << text;
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw Error("cannot write '" + out + "'");
        os << text;
        std::cerr << "wrote " << out << " (" << c.num_qubits << " qubits, " << c.ops.size()
                  << " ops)\n";
    }
    return 0;
}

int cmd_transpile(const std::string& input, const std::string& arch_spec,
                  const std::string& router, int opt, std::uint64_t seed,
                  const std::string& layout, const std::string& out,
                  const ErrorModel& model) {
    Circuit c = load_circuit(input);
    Architecture arch = resolve_arch(arch_spec);
    TranspileConfig cfg;
    cfg.router = router_from_name(router);
    cfg.opt_level = opt;
    cfg.seed = seed;
    cfg.layout = layout_from_name(layout);
    TranspileOutcome res = transpile(c, arch, cfg);

    Circuit baseline = decompose_to_native(c);
    GateTally tb = tally_gates(baseline), tt = tally_gates(res.circuit);
    std::uint64_t d0 = depth(baseline), d1 = depth(res.circuit);
    double s0 = score_simplified(baseline, model), s1 = score_simplified(res.circuit, model);

    std::cout << "arch=" << arch.name << "\n";
    std::cout << "router=" << router_name(cfg.router) << "\n";
    std::cout << "opt_level=" << cfg.opt_level << "\n";
    std::cout << "seed=" << cfg.seed << "\n";
    std::cout << "n_gate_orig=" << tb.total() << "\n";
    std::cout << "n_gate=" << tt.total() << "\n";
    std::cout << "n_2q=" << tt.two_qubit << "\n";
    std::cout << "swaps_inserted=" << res.swaps_inserted << "\n";
    std::cout << "depth_orig=" << d0 << "\n";
    std::cout << "depth=" << d1 << "\n";
    std::cout << "score_orig=" << fmt9(s0) << "\n";
    std::cout << "score=" << fmt9(s1) << "\n";
    std::cout << "norm_gates=" << fmt9(tb.total() ? double(tt.total()) / tb.total() : 0.0) << "\n";
    std::cout << "norm_depth=" << fmt9(d0 ? double(d1) / d0 : 0.0) << "\n";
    std::cout << "norm_score=" << fmt9(s0 > 0 ? s1 / s0 : 0.0) << "\n";
    std::cout << "t_trans_s=" << fmt9(res.t_trans_s) << "\n";
    std::cout << "routed_ok=" << (routed_ok(res.circuit, arch) ? 1 : 0) << "\n";
    {
        std::cout << "final_layout=";
        for (std::size_t i = 0; i < res.final_layout.to_phys.size(); ++i) {
            if (i) std::cout << ' ';
            std::cout << res.final_layout.to_phys[i];
        }
        std::cout << "\n";
    }
    if (!out.empty()) {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw Error("cannot write '" + out + "'");
        os << serialize_qasm(res.circuit);
    }
    return 0;
}

int cmd_simulate(const std::string& input, std::uint32_t top, std::uint64_t initial) {
    Circuit c = load_circuit(input);
    SimResult res = simulate(c, initial);
    std::cout << "qubits=" << c.num_qubits << "\n";
    std::cout << "t_sim_s=" << fmt9(res.t_sim_s) << "\n";
    std::vector<std::pair<double, std::uint64_t>> probs;
    const auto& amps = res.state.amps;
    probs.reserve(amps.size());
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        double p = std::norm(amps[i]);
        if (p > 1e-12) probs.push_back({p, i});
    }
    std::sort(probs.begin(), probs.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (probs.size() > top) probs.resize(top);
    for (const auto& [p, idx] : probs) {
        std::string bits(c.num_qubits, '0');
        for (std::uint32_t q = 0; q < c.num_qubits; ++q)
            if ((idx >> q) & 1u) bits[c.num_qubits - 1 - q] = '1';
        std::cout << "p[" << bits << "]=" << fmt9(p) << "\n";
    }
    return 0;
}

int cmd_run(const std::string& archs_arg, const std::string& benches_arg, Protocol protocol,
            const ErrorModel& model, const std::string& out_path, bool quiet) {
    std::vector<Architecture> archs;
    if (archs_arg == "all") {
        for (const auto& name : builtin_names()) archs.push_back(builtin(name));
    } else {
        for (const auto& s : split_list(archs_arg)) archs.push_back(resolve_arch(s));
    }
    std::vector<NamedCircuit> benches;
    if (benches_arg == "default") {
        for (const auto& name : default_suite_names()) benches.push_back({name, make_benchmark(name)});
    } else {
        for (const auto& s : split_list(benches_arg)) benches.push_back(resolve_bench(s));
    }

    std::vector<BenchmarkRecord> records =
        run_suite(benches, archs, protocol, model, quiet ? nullptr : &std::cerr);

    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw Error("cannot write '" + out_path + "'");
    write_records_csv(records, os);
    if (!quiet)
        std::cerr << "wrote " << out_path << " (" << records.size() << " records)\n";
    return 0;
}

int cmd_report(const std::string& input, const std::string& out_dir,
               const std::string& aggregate) {
    std::ifstream is(input, std::ios::binary);
    if (!is) throw Error("cannot open '" + input + "'");
    CsvTable table = read_csv(is);
    Aggregate agg;
    if (aggregate == "best") agg = Aggregate::Best;
    else if (aggregate == "mean") agg = Aggregate::Mean;
    else throw Error("unknown aggregate '" + aggregate + "' (expected best or mean)");
    ReportFiles files = report(table, out_dir, agg);
    for (const auto& f : files.written) std::cerr << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum architecture benchmarking toolkit"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list-archs", "list built-in architectures");

    std::string sa_name;
    bool sa_dot = false;
    auto* show_cmd = app.add_subcommand("show-arch", "print one architecture");
    show_cmd->add_option("name", sa_name, "built-in name or .arch file")->required();
    show_cmd->add_flag("--dot", sa_dot, "emit Graphviz instead of the arch format");

    std::string gb_family, gb_out = "-";
    std::uint32_t gb_qubits = 0, gb_steps = 3, gb_rounds = 1;
    double gb_theta = 0.15, gb_J = 1.0, gb_h = 1.0, gb_t = 1.0;
    auto* gen_cmd = app.add_subcommand("gen-bench", "generate a benchmark circuit");
    gen_cmd->add_option("family", gb_family, "qft, qpe, ising, surface or steane")->required();
    gen_cmd->add_option("--qubits", gb_qubits, "qubit count")->required();
    gen_cmd->add_option("-o,--out", gb_out, "output file ('-' for stdout)");
    gen_cmd->add_option("--theta", gb_theta, "phase for qpe");
    gen_cmd->add_option("--steps", gb_steps, "Trotter steps for ising");
    auto* gb_rounds_opt =
        gen_cmd->add_option("--rounds", gb_rounds, "measurement rounds for surface/steane");
    gen_cmd->add_option("--coupling", gb_J, "ising J");
    gen_cmd->add_option("--field", gb_h, "ising h");
    gen_cmd->add_option("--duration", gb_t, "ising evolution time");

    std::string tp_input, tp_arch, tp_router = "sabre", tp_layout = "auto", tp_out;
    int tp_opt = 1;
    std::uint64_t tp_seed = 0;
    auto* tp_cmd = app.add_subcommand("transpile", "map a circuit onto an architecture");
    tp_cmd->add_option("input", tp_input, "input .qasm file")->required();
    tp_cmd->add_option("--arch", tp_arch, "built-in name or .arch file")->required();
    tp_cmd->add_option("--router", tp_router, "basic or sabre");
    tp_cmd->add_option("--opt", tp_opt, "optimization level 0-3");
    tp_cmd->add_option("--seed", tp_seed, "layout seed");
    tp_cmd->add_option("--layout", tp_layout, "auto, trivial or sabre-refined");
    tp_cmd->add_option("-o,--out", tp_out, "write transpiled circuit here");

    std::string sim_input;
    std::uint32_t sim_top = 8;
    std::uint64_t sim_initial = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "run the statevector simulator");
    sim_cmd->add_option("input", sim_input, "input .qasm file")->required();
    sim_cmd->add_option("--top", sim_top, "how many outcome probabilities to print");
    sim_cmd->add_option("--initial", sim_initial, "initial basis state index");

    std::string run_archs = "all", run_benches = "default", run_out = "results.csv";
    std::string run_routers = "both", run_opts = "0,1,2,3", run_timing = "wall";
    Protocol protocol;
    bool run_quiet = false;
    auto* run_cmd = app.add_subcommand("run", "run the full benchmark protocol");
    run_cmd->add_option("--archs", run_archs, "'all' or comma list of names/.arch files");
    run_cmd->add_option("--benches", run_benches, "'default' or comma list of names/.qasm files");
    run_cmd->add_option("--trials", protocol.trials, "trials per router and opt level");
    run_cmd->add_option("--seed", protocol.seed_base, "seed base");
    run_cmd->add_option("--out", run_out, "output CSV path");
    run_cmd->add_flag("--simulate", protocol.simulate, "time simulation of selected outputs");
    run_cmd->add_flag("--verify", protocol.verify,
                      "check routing validity and, where simulable, equivalence");
    run_cmd->add_option("--routers", run_routers, "both, basic or sabre");
    run_cmd->add_option("--opts", run_opts, "comma list of opt levels");
    run_cmd->add_option("--jobs", protocol.jobs, "worker threads (0 = hardware)");
    run_cmd->add_option("--timing", run_timing, "wall or off (off leaves time cells empty)");
    run_cmd->add_flag("--quiet", run_quiet, "suppress progress output");

    std::string rp_input, rp_out_dir = "report", rp_aggregate = "best";
    auto* rp_cmd = app.add_subcommand("report", "write plot tables from a results CSV");
    rp_cmd->add_option("input", rp_input, "results CSV from `run`")->required();
    rp_cmd->add_option("--out-dir", rp_out_dir, "output directory");
    rp_cmd->add_option("--aggregate", rp_aggregate, "best or mean");

    ErrorModel model;
    std::string model_file;
    for (auto* cmd : {tp_cmd, run_cmd}) {
        cmd->add_option("--e1q", model.e1q, "one-qubit gate error rate");
        cmd->add_option("--e2q", model.e2q, "two-qubit gate error rate");
        cmd->add_option("--beta", model.beta, "score scale factor");
        cmd->add_flag("--include-measure", model.include_measure,
                      "count measurements as one-qubit gates");
        cmd->add_option("--model", model_file, "key=value error model file");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!model_file.empty()) {
            ErrorModel from_file;
            apply_model_file(model_file, from_file);
            // Explicit flags win over the file.
            ErrorModel defaults;
            if (model.e1q == defaults.e1q) model.e1q = from_file.e1q;
            if (model.e2q == defaults.e2q) model.e2q = from_file.e2q;
            if (model.beta == defaults.beta) model.beta = from_file.beta;
            if (!model.include_measure) model.include_measure = from_file.include_measure;
        }
        model.check();

        if (list_cmd->parsed()) return cmd_list_archs();
        if (show_cmd->parsed()) return cmd_show_arch(sa_name, sa_dot);
        if (gen_cmd->parsed())
            return cmd_gen_bench(gb_family, gb_qubits, gb_out, gb_theta, gb_steps, gb_rounds,
                                 gb_J, gb_h, gb_t, gb_rounds_opt->count() > 0);
        if (tp_cmd->parsed())
            return cmd_transpile(tp_input, tp_arch, tp_router, tp_opt, tp_seed, tp_layout,
                                 tp_out, model);
        if (sim_cmd->parsed()) return cmd_simulate(sim_input, sim_top, sim_initial);
        if (run_cmd->parsed()) {
            protocol.routers.clear();
            if (run_routers == "both") {
                protocol.routers = {Router::Basic, Router::Sabre};
            } else {
                for (const auto& r : split_list(run_routers))
                    protocol.routers.push_back(router_from_name(r));
            }
            protocol.opt_levels.clear();
            for (const auto& l : split_list(run_opts)) protocol.opt_levels.push_back(std::stoi(l));
            if (run_timing == "wall") protocol.timing = TimingMode::Wall;
            else if (run_timing == "off") protocol.timing = TimingMode::Off;
            else throw Error("unknown timing mode '" + run_timing + "'");
            return cmd_run(run_archs, run_benches, protocol, model, run_out, run_quiet);
        }
        if (rp_cmd->parsed()) return cmd_report(rp_input, rp_out_dir, rp_aggregate);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
