#pragma once

// Experiment driver: for every (benchmark, architecture) pair it runs
// routers x opt levels x trials transpilations with derived seeds, scores
// each output, marks the best record selected, optionally times simulation
// of the selected output, and serializes everything as CSV plus per-metric
// plot tables.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qabench/arch.hpp"
#include "qabench/benchgen.hpp"
#include "qabench/circuit.hpp"
#include "qabench/scoring.hpp"
#include "qabench/simulator.hpp"
#include "qabench/transpiler.hpp"

namespace qabench {

enum class TimingMode { Wall, Off };

struct Protocol {
    std::vector<Router> routers = {Router::Basic, Router::Sabre};
    std::vector<int> opt_levels = {0, 1, 2, 3};
    std::uint32_t trials = 10;
    bool simulate = false;
    bool verify = false;
    std::uint64_t seed_base = 0;
    std::uint32_t jobs = 0;  // 0: hardware concurrency
    TimingMode timing = TimingMode::Wall;

    void check() const {
        if (routers.empty()) throw Error("protocol: no routers");
        if (opt_levels.empty()) throw Error("protocol: no opt levels");
        for (int l : opt_levels)
            if (l < 0 || l > 3) throw Error("protocol: opt level out of range");
        if (trials < 1) throw Error("protocol: trials must be at least 1");
    }

    std::size_t outputs_per_pair() const { return routers.size() * opt_levels.size() * trials; }
};

struct BenchmarkRecord {
    std::string benchmark;
    std::string arch;
    double c = 0.0;
    Router router = Router::Basic;
    int opt_level = 0;
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::uint64_t n_gate_orig = 0, n_gate = 0;
    std::uint64_t depth_orig = 0, depth = 0;
    double score_orig = 0.0, score = 0.0;
    double norm_gates = 0.0, norm_depth = 0.0, norm_score = 0.0;
    std::optional<double> t_trans_s, t_sim_s, norm_t_sim;
    bool selected = false;

    bool ok() const { return status == "ok" || status == "capacity"; }
};

struct NamedCircuit {
    std::string name;
    Circuit circuit;
};

namespace harness_detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

// Status lands in a comma-separated file; keep it one clean token.
inline std::string sanitize_status(std::string s) {
    for (auto& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

inline double median3(double a, double b, double c) {
    double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    return a + b + c - lo - hi;
}

}  // namespace harness_detail

inline const char* csv_header() {
    return "benchmark,arch,c,router,opt_level,trial,seed,status,n_gate_orig,n_gate,"
           "depth_orig,depth,score_orig,score,norm_gates,norm_depth,norm_score,"
           "t_trans_s,t_sim_s,norm_t_sim,selected";
}

inline void write_records_csv(const std::vector<BenchmarkRecord>& records, std::ostream& os) {
    using harness_detail::fmt_double;
    using harness_detail::fmt_opt;
    os << csv_header() << "\n";
    for (const auto& r : records) {
        os << r.benchmark << ',' << r.arch << ',' << fmt_double(r.c) << ','
           << router_name(r.router) << ',' << r.opt_level << ',' << r.trial << ',' << r.seed
           << ',' << harness_detail::sanitize_status(r.status) << ',' << r.n_gate_orig << ','
           << r.n_gate << ',' << r.depth_orig << ',' << r.depth << ','
           << fmt_double(r.score_orig) << ',' << fmt_double(r.score) << ','
           << fmt_double(r.norm_gates) << ',' << fmt_double(r.norm_depth) << ','
           << fmt_double(r.norm_score) << ',' << fmt_opt(r.t_trans_s) << ','
           << fmt_opt(r.t_sim_s) << ',' << fmt_opt(r.norm_t_sim) << ','
           << (r.selected ? '1' : '0') << "\n";
    }
}

// Raw string table, so a read-write cycle reproduces the file byte for byte.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && is.peek() == EOF) break;
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        cells.push_back(std::move(cur));
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

inline void write_csv(const CsvTable& t, std::ostream& os) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << "\n";
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
}

inline CsvTable to_csv_table(const std::vector<BenchmarkRecord>& records) {
    std::ostringstream os;
    write_records_csv(records, os);
    std::istringstream is(os.str());
    return read_csv(is);
}

// ---------------------------------------------------------------------------
// Suite execution

namespace harness_detail {

struct Baseline {
    Circuit native;
    std::uint64_t n_gate = 0, depth = 0;
    double score = 0.0;
    std::optional<double> t_sim_s;
    bool sim_capacity = false;
};

inline Baseline make_baseline(const Circuit& c, const ErrorModel& model, bool simulate_it,
                              TimingMode timing) {
    Baseline b;
    b.native = decompose_to_native(c);
    b.n_gate = tally_gates(b.native).total();
    b.depth = qabench::depth(b.native);
    b.score = score_simplified(b.native, model);
    if (simulate_it && timing == TimingMode::Wall) {
        if (b.native.num_qubits > max_sim_qubits()) {
            b.sim_capacity = true;
        } else {
            double t[3];
            for (int i = 0; i < 3; ++i) t[i] = simulate(b.native, 0).t_sim_s;
            b.t_sim_s = median3(t[0], t[1], t[2]);
        }
    }
    return b;
}

}  // namespace harness_detail

inline std::vector<BenchmarkRecord> run_suite(const std::vector<NamedCircuit>& benchmarks,
                                              const std::vector<Architecture>& architectures,
                                              const Protocol& protocol,
                                              const ErrorModel& model = {},
                                              std::ostream* log = nullptr) {
    protocol.check();
    model.check();
    if (benchmarks.empty()) throw Error("run_suite: no benchmarks");
    if (architectures.empty()) throw Error("run_suite: no architectures");
    for (const auto& b : benchmarks)
        for (const auto& a : architectures)
            if (b.circuit.num_qubits > a.num_qubits)
                throw Error("run_suite: benchmark '" + b.name + "' (" +
                            std::to_string(b.circuit.num_qubits) + " qubits) does not fit on '" +
                            a.name + "' (" + std::to_string(a.num_qubits) + ")");

    std::uint32_t jobs = protocol.jobs ? protocol.jobs
                                       : std::max(1u, std::thread::hardware_concurrency());
    std::vector<BenchmarkRecord> all;
    all.reserve(benchmarks.size() * architectures.size() * protocol.outputs_per_pair());

    std::vector<DistanceMatrix> dms;
    dms.reserve(architectures.size());
    for (const auto& a : architectures) dms.emplace_back(a);

    for (const auto& bench : benchmarks) {
        harness_detail::Baseline base = harness_detail::make_baseline(
            bench.circuit, model, protocol.simulate, protocol.timing);
        for (std::size_t ai = 0; ai < architectures.size(); ++ai) {
            const Architecture& arch = architectures[ai];
            const DistanceMatrix& dm = dms[ai];
            const std::size_t npair = protocol.outputs_per_pair();
            std::vector<BenchmarkRecord> records(npair);

            // In-flight best tracking keeps only one output circuit alive.
            // Everything the comparison needs lives under the mutex; the
            // records slots themselves are written without it.
            std::mutex best_mu;
            std::size_t best_idx = npair;
            double best_score = 0.0;
            std::uint64_t best_gates = 0, best_seed = 0;
            Circuit best_circuit;
            Layout best_final;
            auto better = [&](const BenchmarkRecord& r) {
                if (best_idx == npair) return true;
                if (r.score != best_score) return r.score < best_score;
                if (r.n_gate != best_gates) return r.n_gate < best_gates;
                return r.seed < best_seed;
            };

            auto run_job = [&](std::size_t j) {
                std::size_t ri = j / (protocol.opt_levels.size() * protocol.trials);
                std::size_t rest = j % (protocol.opt_levels.size() * protocol.trials);
                std::size_t li = rest / protocol.trials;
                std::uint32_t trial = static_cast<std::uint32_t>(rest % protocol.trials);

                BenchmarkRecord r;
                r.benchmark = bench.name;
                r.arch = arch.name;
                r.c = connectivity(arch);
                r.router = protocol.routers[ri];
                r.opt_level = protocol.opt_levels[li];
                r.trial = trial;
                r.seed = protocol.seed_base + j;
                r.n_gate_orig = base.n_gate;
                r.depth_orig = base.depth;
                r.score_orig = base.score;
                try {
                    TranspileConfig cfg;
                    cfg.router = r.router;
                    cfg.opt_level = r.opt_level;
                    cfg.seed = r.seed;
                    TranspileOutcome out = transpile(bench.circuit, arch, cfg, &dm);
                    r.n_gate = tally_gates(out.circuit).total();
                    r.depth = qabench::depth(out.circuit);
                    r.score = score_simplified(out.circuit, model);
                    r.norm_gates = base.n_gate ? double(r.n_gate) / double(base.n_gate) : 0.0;
                    r.norm_depth = base.depth ? double(r.depth) / double(base.depth) : 0.0;
                    r.norm_score = base.score > 0 ? r.score / base.score : 0.0;
                    if (protocol.timing == TimingMode::Wall) r.t_trans_s = out.t_trans_s;
                    if (protocol.verify && !routed_ok(out.circuit, arch))
                        r.status = "error:uncoupled-gate";
                    if (r.status == "ok") {
                        std::lock_guard<std::mutex> lock(best_mu);
                        if (better(r)) {
                            best_idx = j;
                            best_score = r.score;
                            best_gates = r.n_gate;
                            best_seed = r.seed;
                            best_circuit = std::move(out.circuit);
                            best_final = std::move(out.final_layout);
                        }
                    }
                } catch (const CapacityError&) {
                    r.status = "capacity";
                } catch (const std::exception& e) {
                    r.status = std::string("error:") + e.what();
                }
                records[j] = std::move(r);
            };

            if (jobs <= 1) {
                for (std::size_t j = 0; j < npair; ++j) run_job(j);
            } else {
                std::atomic<std::size_t> next{0};
                std::vector<std::thread> pool;
                std::uint32_t nthreads = static_cast<std::uint32_t>(
                    std::min<std::size_t>(jobs, npair));
                pool.reserve(nthreads);
                for (std::uint32_t w = 0; w < nthreads; ++w)
                    pool.emplace_back([&] {
                        for (std::size_t j = next.fetch_add(1); j < npair;
                             j = next.fetch_add(1))
                            run_job(j);
                    });
                for (auto& th : pool) th.join();
            }

            if (best_idx == npair)
                throw Error("run_suite: no successful outcome for '" + bench.name + "' on '" +
                            arch.name + "'");
            BenchmarkRecord& sel = records[best_idx];
            sel.selected = true;

            if (protocol.verify && bench.circuit.num_qubits <= max_sim_qubits()) {
                double f = equivalence(base.native, best_circuit, best_final);
                if (f < 1.0 - 1e-9)
                    sel.status = "error:equivalence-" + harness_detail::fmt_double(f);
            }

            if (protocol.simulate && protocol.timing == TimingMode::Wall &&
                sel.status == "ok") {
                if (base.sim_capacity) {
                    sel.status = "capacity";
                } else {
                    Circuit compacted = compact_to_used(best_circuit);
                    if (compacted.num_qubits > max_sim_qubits()) {
                        sel.status = "capacity";
                    } else {
                        double t[3];
                        for (int i = 0; i < 3; ++i) t[i] = simulate(compacted, 0).t_sim_s;
                        sel.t_sim_s = harness_detail::median3(t[0], t[1], t[2]);
                        if (base.t_sim_s && *base.t_sim_s > 0)
                            sel.norm_t_sim = *sel.t_sim_s / *base.t_sim_s;
                    }
                }
            }

            if (log)
                (*log) << bench.name << " on " << arch.name << ": selected "
                       << router_name(sel.router) << " opt " << sel.opt_level << " trial "
                       << sel.trial << " score " << harness_detail::fmt_double(sel.score)
                       << " norm " << harness_detail::fmt_double(sel.norm_score) << "\n";

            for (auto& r : records) all.push_back(std::move(r));
        }
    }
    return all;
}

// ---------------------------------------------------------------------------
// Report generation

enum class Aggregate { Best, Mean };

struct ReportFiles {
    std::vector<std::string> written;
};

namespace harness_detail {

struct PlotRow {
    std::string benchmark;
    std::string arch;
    double c = 0.0;
    std::optional<double> value;
};

inline void write_plot(const std::string& path, const std::vector<PlotRow>& rows, bool log10_of,
                       ReportFiles& out) {
    std::ofstream os(path);
    if (!os) throw Error("report: cannot write '" + path + "'");
    os << "benchmark,arch,c,value\n";
    for (const auto& r : rows) {
        std::string v;
        if (r.value) {
            if (log10_of) {
                if (*r.value > 0) v = fmt_double(std::log10(*r.value));
            } else {
                v = fmt_double(*r.value);
            }
        }
        os << r.benchmark << ',' << r.arch << ',' << fmt_double(r.c) << ',' << v << "\n";
    }
    out.written.push_back(path);
}

}  // namespace harness_detail

inline ReportFiles report(const CsvTable& table, const std::string& out_dir,
                          Aggregate aggregate = Aggregate::Best) {
    namespace fs = std::filesystem;
    if (table.rows.empty()) throw Error("report: no records");
    int c_bench = table.column("benchmark"), c_arch = table.column("arch"),
        c_c = table.column("c"), c_sel = table.column("selected"),
        c_status = table.column("status");
    if (c_bench < 0 || c_arch < 0 || c_c < 0 || c_sel < 0 || c_status < 0)
        throw Error("report: CSV is missing required columns");

    struct Metric {
        const char* column;
        const char* file;
        bool also_log;
    };
    const Metric metrics[] = {
        {"norm_gates", "plot_norm_gates.csv", false},
        {"norm_depth", "plot_norm_depth.csv", false},
        {"norm_score", "plot_norm_score.csv", false},
        {"t_trans_s", "plot_t_trans.csv", true},
        {"norm_t_sim", "plot_norm_t_sim.csv", true},
    };

    fs::create_directories(out_dir);
    ReportFiles files;

    {
        std::string path = (fs::path(out_dir) / "results.csv").string();
        std::ofstream os(path);
        if (!os) throw Error("report: cannot write '" + path + "'");
        write_csv(table, os);
        files.written.push_back(path);
    }

    // Group rows by (benchmark, arch) in first-appearance order.
    struct Group {
        std::string bench, arch;
        double c = 0.0;
        std::vector<std::size_t> rows;
        std::size_t selected_row = SIZE_MAX;
    };
    std::vector<Group> groups;
    auto find_group = [&](const std::string& b, const std::string& a) -> Group& {
        for (auto& g : groups)
            if (g.bench == b && g.arch == a) return g;
        groups.push_back({b, a, 0.0, {}, SIZE_MAX});
        return groups.back();
    };
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.size() != table.header.size())
            throw Error("report: ragged CSV row " + std::to_string(i + 2));
        Group& g = find_group(row[c_bench], row[c_arch]);
        g.c = std::strtod(row[c_c].c_str(), nullptr);
        g.rows.push_back(i);
        if (row[c_sel] == "1") g.selected_row = i;
    }
    bool any_selected = false;
    for (const auto& g : groups) any_selected |= g.selected_row != SIZE_MAX;
    if (!any_selected) throw Error("report: no selected records");

    for (const auto& m : metrics) {
        int col = table.column(m.column);
        if (col < 0) throw Error(std::string("report: CSV is missing column ") + m.column);
        std::vector<harness_detail::PlotRow> rows;
        for (const auto& g : groups) {
            harness_detail::PlotRow pr;
            pr.benchmark = g.bench;
            pr.arch = g.arch;
            pr.c = g.c;
            if (aggregate == Aggregate::Best) {
                if (g.selected_row == SIZE_MAX) continue;
                const std::string& cell = table.rows[g.selected_row][col];
                if (!cell.empty()) pr.value = std::strtod(cell.c_str(), nullptr);
            } else {
                double sum = 0;
                std::size_t n = 0;
                for (auto ri : g.rows) {
                    if (table.rows[ri][c_status] != "ok" &&
                        table.rows[ri][c_status] != "capacity")
                        continue;
                    const std::string& cell = table.rows[ri][col];
                    if (cell.empty()) continue;
                    sum += std::strtod(cell.c_str(), nullptr);
                    ++n;
                }
                if (n) pr.value = sum / double(n);
            }
            rows.push_back(std::move(pr));
        }
        std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
            if (a.benchmark != b.benchmark) return a.benchmark < b.benchmark;
            if (a.c != b.c) return a.c > b.c;
            return a.arch < b.arch;
        });
        harness_detail::write_plot((fs::path(out_dir) / m.file).string(), rows, false, files);
        if (m.also_log) {
            std::string logname = m.file;
            logname.insert(logname.size() - 4, "_log10");
            harness_detail::write_plot((fs::path(out_dir) / logname).string(), rows, true,
                                       files);
        }
    }
    return files;
}

inline ReportFiles report(const std::vector<BenchmarkRecord>& records, const std::string& out_dir,
                          Aggregate aggregate = Aggregate::Best) {
    return report(to_csv_table(records), out_dir, aggregate);
}

}  // namespace qabench
