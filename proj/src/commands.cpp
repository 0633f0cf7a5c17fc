#include "gatecraft/commands.hpp"

#include "gatecraft/errors.hpp"
#include "gatecraft/perturbation.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <variant>

namespace gatecraft {

using nlohmann::json;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out,
                                         const ExperimentConfig& cfg) {
    if (cli_out && !cli_out->empty()) return *cli_out;
    if (!cfg.output.empty()) return cfg.output;
    if (const char* env = std::getenv("GATECRAFT_OUT"); env && *env) return env;
    return std::filesystem::current_path();
}

std::vector<std::string> assumption_ledger(const ExperimentConfig& cfg) {
    std::vector<std::string> a;
    a.push_back("envelope=gaussian_flat_top t_gate_ns=" + format_number(cfg.gate.t_gate) +
                " t_rise_ns=" + format_number(cfg.gate.t_rise));
    a.push_back("resonance_rule=" + to_string(cfg.gate.rule));
    if (cfg.gate.tone_count == 2)
        a.push_back(cfg.gate.fixed_frequencies.empty()
                        ? "two_tone_frequencies=seed and seed+1/t_gate, held fixed, amplitudes optimized"
                        : "two_tone_frequencies=fixed by config, amplitudes optimized");
    a.push_back("truncation=charge_cutoff " + std::to_string(cfg.truncation.charge_cutoff) +
                ", levels_per_qubit " + std::to_string(cfg.truncation.levels_per_qubit));
    a.push_back("frame=dressed, single-qubit Z corrections applied virtually");
    a.push_back("tolerance=rtol " + format_number(cfg.optimizer.propagation.rtol) + ", atol " +
                format_number(cfg.optimizer.propagation.atol));
    if (cfg.lindblad)
        a.push_back("rate_convention=" + to_string(cfg.lindblad->rate_convention) +
                    " level_truncation=" + std::to_string(cfg.lindblad->level_truncation));
    if (!cfg.notes.empty()) a.push_back("notes=" + cfg.notes);
    return a;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"spectrum", "optimize", "sweep",
                                                "sensitivity", "lindblad", "zz-estimate"};
    return names;
}

namespace {

using Cell = std::variant<double, int, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const RunContext& ctx,
              const std::vector<std::string>& columns, const std::vector<std::string>& extra = {})
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot write " + path.string());
        out_ << "# gatecraft " << path.filename().string() << "\n";
        out_ << "# config_hash " << config_hash_hex(ctx.config) << "\n";
        for (const auto& a : assumption_ledger(ctx.config)) out_ << "# assumption " << a << "\n";
        for (const auto& e : extra) out_ << "# " << e << "\n";
        write_line(columns);
    }

    void row(const std::vector<Cell>& cells) {
        std::vector<std::string> s;
        for (const auto& c : cells) {
            if (const double* d = std::get_if<double>(&c)) s.push_back(format_number(*d));
            else if (const int* i = std::get_if<int>(&c)) s.push_back(std::to_string(*i));
            else s.push_back(std::get<std::string>(c));
        }
        write_line(s);
    }

    ~CsvWriter() { out_.flush(); }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    void write_line(const std::vector<std::string>& fields) {
        for (size_t k = 0; k < fields.size(); ++k) out_ << (k ? "," : "") << fields[k];
        out_ << "\n";
    }

    std::filesystem::path path_;
    std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + path.string());
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const GateMetrics& m) {
    const auto& b = m.error_budget;
    return {{"fidelity", m.fidelity},
            {"zeta_phase", number_or_null(m.zeta_phase)},
            {"leakage_angle", m.leakage_angle},
            {"rotation_angle", m.rotation_angle},
            {"swap_angle", m.swap_angle},
            {"vz_angles", m.vz_angles},
            {"error_budget",
             {{"total_err", b.total_err},
              {"phase_err", b.phase_err},
              {"leakage_err", b.leakage_err},
              {"rotation_err", b.rotation_err}}}};
}

void log(const RunContext& ctx, const std::string& msg) {
    if (ctx.log) *ctx.log << msg << std::endl;
}

void prepare_dir(const RunContext& ctx) {
    std::error_code ec;
    std::filesystem::create_directories(ctx.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
}

// Runs fn(k) for k in [0, n) on up to jobs threads; results stay in index order.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
    const int workers = std::clamp(jobs, 1, std::max(1, n));
    if (workers == 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int k = next++; k < n; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

OptimizationResult obtain_pulse(const CoupledSystem& sys, const ExperimentConfig& cfg) {
    if (cfg.params) {
        OptimizationResult r;
        r.best_params = *cfg.params;
        r.metrics = evaluate_pulse(sys, cfg.gate, r.best_params, cfg.optimizer.propagation);
        r.converged = true;
        r.evaluations = 1;
        return r;
    }
    return optimize_pulse(sys, cfg.gate, cfg.optimizer);
}

std::vector<std::string> param_columns(const GateSpec& g) {
    std::vector<std::string> c;
    for (int k = 0; k < g.tone_count; ++k) {
        c.push_back("delta_ej_" + std::to_string(k));
        c.push_back("omega_p_" + std::to_string(k));
    }
    return c;
}

void append_params(std::vector<Cell>& row, const GateSpec& g, const PulseParams* p) {
    for (int k = 0; k < g.tone_count; ++k) {
        const bool ok = p && static_cast<int>(p->delta_ej.size()) > k;
        row.emplace_back(ok ? p->delta_ej[k] : std::nan(""));
        row.emplace_back(ok ? p->omega_p[k] : std::nan(""));
    }
}

const SweepConfig& require_sweep(const ExperimentConfig& cfg, std::initializer_list<SweepAxis> axes,
                                 const char* command) {
    if (!cfg.sweep) throw InvalidParameter(std::string("sweep: required by ") + command);
    for (SweepAxis a : axes)
        if (cfg.sweep->axis == a) return *cfg.sweep;
    throw InvalidParameter("sweep.axis: '" + to_string(cfg.sweep->axis) + "' not supported by " + command);
}

// Two-tone frequencies come from the first sweep point and stay fixed.
GateSpec sweep_gate(const ExperimentConfig& cfg, double first_j_c) {
    GateSpec g = cfg.gate;
    if (g.tone_count == 2 && g.fixed_frequencies.empty()) {
        CircuitParams cp = cfg.circuit;
        cp.j_c = first_j_c;
        g.fixed_frequencies = seed_frequencies(CoupledSystem(cp, cfg.truncation), g);
    }
    return g;
}

struct SweepRow {
    bool ok = false;
    std::string status;
    OptimizationResult result;
};

std::string error_status(const std::exception& e) {
    std::string s = e.what();
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return "error: " + s;
}

}  // namespace

int cmd_spectrum(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const CoupledSystem sys(cfg.circuit, cfg.truncation);
    {
        CsvWriter w(ctx.out_dir / "spectrum_single.csv", ctx, {"qubit", "transition", "freq_ghz"});
        for (int q = 0; q < 2; ++q) {
            const auto& spec = (q == 0 ? sys.fixed_qubit() : sys.tunable_qubit()).spectrum;
            for (size_t i = 0; i < spec.transitions.size(); ++i)
                w.row({q == 0 ? "fixed" : "tunable",
                       std::to_string(i) + "->" + std::to_string(i + 1), spec.transitions[i]});
        }
        w.close();
    }
    {
        CsvWriter w(ctx.out_dir / "spectrum_coupled.csv", ctx, {"pair", "freq_ghz"});
        const std::pair<BareLabel, BareLabel> pairs[] = {
            {{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}, {{1, 1}, {2, 2}}, {{1, 2}, {2, 1}},
            {{0, 2}, {1, 1}}, {{1, 0}, {2, 1}}, {{1, 1}, {2, 0}}, {{0, 1}, {1, 2}}};
        for (const auto& [a, b] : pairs)
            w.row({a.str() + "<->" + b.str(), std::abs(transition_frequency(sys, a, b))});
        w.close();
    }
    write_json(ctx.out_dir / "static_zz.json",
               {{"rate_mhz", static_zz_rate(sys) * 1e3},
                {"j_c_mhz", cfg.circuit.j_c * 1e3},
                {"config_hash", config_hash_hex(cfg)},
                {"assumptions", assumption_ledger(cfg)}});
    return exit_ok;
}

int cmd_optimize(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const CoupledSystem sys(cfg.circuit, cfg.truncation);
    log(ctx, "optimizing " + to_string(cfg.gate.rule) + " pulse");
    const OptimizationResult r = obtain_pulse(sys, cfg);
    write_json(ctx.out_dir / "optimum.json",
               {{"converged", r.converged},
                {"evaluations", r.evaluations},
                {"params", {{"delta_ej", r.best_params.delta_ej}, {"omega_p", r.best_params.omega_p}}},
                {"metrics", metrics_json(r.metrics)},
                {"error_budget", metrics_json(r.metrics)["error_budget"]},
                {"config_hash", config_hash_hex(cfg)},
                {"assumptions", assumption_ledger(cfg)}});

    const DriveSchedule s = make_schedule(sys, cfg.gate, r.best_params);
    std::vector<std::string> cols{"t_ns", "initial"};
    for (int i = 0; i < sys.levels(); ++i)
        for (int j = 0; j < sys.levels(); ++j) cols.push_back("p_" + BareLabel{i, j}.str());
    CsvWriter w(ctx.out_dir / "populations.csv", ctx, cols);
    for (BareLabel init : {BareLabel{1, 0}, BareLabel{1, 1}}) {
        for (const auto& ps : population_trace(sys, s, init, 0.25, cfg.optimizer.propagation)) {
            std::vector<Cell> row{ps.t, init.str()};
            for (double p : ps.populations) row.emplace_back(p);
            w.row(row);
        }
    }
    w.close();
    return r.converged ? exit_ok : exit_nonconvergence;
}

int cmd_sweep(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const auto& sw = require_sweep(cfg, {SweepAxis::j_c}, "sweep");
    const GateSpec gate = sweep_gate(cfg, sw.values.front());
    const int n = static_cast<int>(sw.values.size());
    std::vector<SweepRow> rows(n);
    parallel_for(n, ctx.jobs, [&](int k) {
        ExperimentConfig pc = cfg;
        pc.circuit.j_c = sw.values[k];
        pc.gate = gate;
        try {
            const CoupledSystem sys(pc.circuit, pc.truncation);
            rows[k].result = obtain_pulse(sys, pc);
            rows[k].ok = true;
            rows[k].status = rows[k].result.converged ? "ok" : "not_converged";
        } catch (const Error& e) {
            rows[k].status = error_status(e);
        }
        log(ctx, "sweep point j_c=" + format_number(sw.values[k]) + " " + rows[k].status);
    });

    std::vector<std::string> cols{"j_c_mhz",    "total_err", "phase_err", "leakage_err",
                                  "rotation_err", "zeta_rad_unwrapped", "zeta_rad", "fidelity",
                                  "converged", "status"};
    for (const auto& c : param_columns(gate)) cols.push_back(c);
    CsvWriter w(ctx.out_dir / "sweep.csv", ctx, cols);
    double prev = std::nan(""), unwrapped = std::nan("");
    bool all_converged = true;
    for (int k = 0; k < n; ++k) {
        const auto& r = rows[k];
        const auto& m = r.result.metrics;
        const auto& b = m.error_budget;
        const double nan = std::nan("");
        if (r.ok && std::isfinite(m.zeta_phase)) {
            unwrapped = std::isfinite(prev) ? unwrapped + wrap_angle(m.zeta_phase - prev) : m.zeta_phase;
            prev = m.zeta_phase;
        }
        const bool z_ok = r.ok && std::isfinite(m.zeta_phase);
        std::vector<Cell> row{sw.values[k] * 1e3,
                              r.ok ? b.total_err : nan,
                              r.ok ? b.phase_err : nan,
                              r.ok ? b.leakage_err : nan,
                              r.ok ? b.rotation_err : nan,
                              z_ok ? unwrapped : nan,
                              z_ok ? m.zeta_phase : nan,
                              r.ok ? m.fidelity : nan,
                              r.ok && r.result.converged ? 1 : 0,
                              r.status};
        append_params(row, gate, r.ok ? &r.result.best_params : nullptr);
        w.row(row);
        all_converged = all_converged && r.ok && r.result.converged;
    }
    w.close();
    return all_converged ? exit_ok : exit_nonconvergence;
}

int cmd_sensitivity(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const auto& sw = require_sweep(cfg, {SweepAxis::delta_ej, SweepAxis::j_c}, "sensitivity");
    const CoupledSystem sys(cfg.circuit, cfg.truncation);
    const OptimizationResult r = obtain_pulse(sys, cfg);
    const auto axis = sw.axis == SweepAxis::j_c ? SensitivityAxis::j_c : SensitivityAxis::delta_ej;
    const auto pts = sensitivity_scan(sys, cfg.gate, r.best_params, axis, sw.values,
                                      cfg.optimizer.propagation);
    CsvWriter w(ctx.out_dir / "sensitivity.csv", ctx,
                {"offset_ghz", "axis_value_ghz", "total_err", "phase_err", "leakage_err",
                 "rotation_err", "status"},
                {"axis " + to_string(sw.axis), "optimum_total_err " + format_number(r.metrics.error_budget.total_err)});
    for (const auto& p : pts) {
        const auto& b = p.metrics.error_budget;
        const double nan = std::nan("");
        w.row({p.offset, p.axis_value, p.failed ? nan : b.total_err, p.failed ? nan : b.phase_err,
               p.failed ? nan : b.leakage_err, p.failed ? nan : b.rotation_err,
               p.failed ? "failed" : "ok"});
    }
    w.close();
    return r.converged ? exit_ok : exit_nonconvergence;
}

int cmd_lindblad(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const auto& sw = require_sweep(cfg, {SweepAxis::t1}, "lindblad");
    std::vector<double> grid = sw.values;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const CoupledSystem sys(cfg.circuit, cfg.truncation);
    const OptimizationResult r = obtain_pulse(sys, cfg);
    const DriveSchedule s = make_schedule(sys, cfg.gate, r.best_params);
    const LindbladConfig base = cfg.lindblad.value_or(LindbladConfig{});
    validate(base, cfg.truncation);
    const T1Scan scan = t1_threshold_scan(sys, s, cfg.gate.target, grid, base, cfg.optimizer.propagation);
    CsvWriter w(ctx.out_dir / "lindblad.csv", ctx, {"t1_us", "one_minus_f", "analytic_ref"},
                {"unitary_one_minus_f " + format_number(scan.unitary_infidelity),
                 "threshold_1e-3_us " + format_number(scan.threshold_1e3),
                 "threshold_5.7e-3_us " + format_number(scan.threshold_5_7e3)});
    for (size_t k = 0; k < scan.t1.size(); ++k)
        w.row({scan.t1[k], scan.infidelity[k], scan.analytic[k]});
    w.close();
    return r.converged ? exit_ok : exit_nonconvergence;
}

int cmd_zz_estimate(const RunContext& ctx) {
    prepare_dir(ctx);
    const auto& cfg = ctx.config;
    const auto& sw = require_sweep(cfg, {SweepAxis::j_c}, "zz-estimate");
    if (cfg.gate.tone_count != 1) throw UnsupportedSchedule("zz-estimate: needs a one-tone gate");
    const int n = static_cast<int>(sw.values.size());
    struct Point {
        SweepRow sweep;
        ZZEstimate est;
    };
    std::vector<Point> pts(n);
    parallel_for(n, ctx.jobs, [&](int k) {
        ExperimentConfig pc = cfg;
        pc.circuit.j_c = sw.values[k];
        auto& p = pts[k];
        try {
            const CoupledSystem sys(pc.circuit, pc.truncation);
            p.sweep.result = obtain_pulse(sys, pc);
            const DriveSchedule s = make_schedule(sys, pc.gate, p.sweep.result.best_params);
            p.est = zz_rate_estimate(interaction_table(sys, s), s.tones[0].omega_p, pc.gate.t_gate);
            p.sweep.ok = true;
            p.sweep.status = p.sweep.result.converged ? "ok" : "not_converged";
        } catch (const Error& e) {
            p.sweep.status = error_status(e);
        }
        log(ctx, "zz-estimate point j_c=" + format_number(sw.values[k]) + " " + p.sweep.status);
    });
    // The estimator sums phases -E t; the simulated conditional phase has the opposite sign.
    CsvWriter w(ctx.out_dir / "zz_estimate.csv", ctx,
                {"j_c_mhz", "zeta_rate_sim_mhz", "zeta_rate_est_mhz", "m0_part", "m1_part",
                 "divergent_terms", "status"});
    bool all_converged = true;
    const double nan = std::nan("");
    for (int k = 0; k < n; ++k) {
        const auto& p = pts[k];
        const double sim = p.sweep.ok ? p.sweep.result.metrics.zeta_phase / (kTwoPi * cfg.gate.t_gate) * 1e3 : nan;
        w.row({sw.values[k] * 1e3, sim, p.sweep.ok ? -p.est.zeta_rate * 1e3 : nan,
               p.sweep.ok ? -p.est.zeta_rate_m0 * 1e3 : nan, p.sweep.ok ? -p.est.zeta_rate_m1 * 1e3 : nan,
               static_cast<int>(p.est.divergent.size()), p.sweep.status});
        all_converged = all_converged && p.sweep.ok && p.sweep.result.converged;
    }
    w.close();
    return all_converged ? exit_ok : exit_nonconvergence;
}

int run_command(const std::string& name, const RunContext& ctx, std::ostream& err) {
    static const std::map<std::string, int (*)(const RunContext&)> table{
        {"spectrum", cmd_spectrum},       {"optimize", cmd_optimize}, {"sweep", cmd_sweep},
        {"sensitivity", cmd_sensitivity}, {"lindblad", cmd_lindblad}, {"zz-estimate", cmd_zz_estimate}};
    const auto it = table.find(name);
    if (it == table.end()) {
        err << "unknown command '" << name << "'\n";
        return exit_validation;
    }
    try {
        return it->second(ctx);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io;
    } catch (const InvalidParameter& e) {
        err << "invalid configuration: " << e.what() << "\n";
        return exit_validation;
    } catch (const UnsupportedSchedule& e) {
        err << "unsupported: " << e.what() << "\n";
        return exit_validation;
    } catch (const NonConvergence& e) {
        err << "did not converge: " << e.what() << "\n";
        return exit_nonconvergence;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return exit_io;
    }
}

}  // namespace gatecraft
