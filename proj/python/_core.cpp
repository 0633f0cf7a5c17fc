#include "gatecraft/commands.hpp"
#include "gatecraft/config.hpp"
#include "gatecraft/errors.hpp"
#include "gatecraft/gate_metrics.hpp"
#include "gatecraft/open_system.hpp"
#include "gatecraft/optimizer.hpp"
#include "gatecraft/perturbation.hpp"
#include "gatecraft/spectrum.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gatecraft;

namespace {

BareLabel label(std::pair<int, int> p) { return {p.first, p.second}; }

py::dict budget_dict(const GateMetrics& m) {
    py::dict d;
    d["fidelity"] = m.fidelity;
    d["zeta_phase"] = m.zeta_phase;
    d["leakage_angle"] = m.leakage_angle;
    d["rotation_angle"] = m.rotation_angle;
    d["swap_angle"] = m.swap_angle;
    d["vz_angles"] = m.vz_angles;
    d["total_err"] = m.error_budget.total_err;
    d["phase_err"] = m.error_budget.phase_err;
    d["leakage_err"] = m.error_budget.leakage_err;
    d["rotation_err"] = m.error_budget.rotation_err;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Parametric two-qubit gate simulation core";

    auto base = py::register_exception<Error>(m, "GatecraftError");
    py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<LabelingError>(m, "LabelingError", base.ptr());
    py::register_exception<UnsupportedSchedule>(m, "UnsupportedSchedule", base.ptr());
    py::register_exception<UndefinedPhase>(m, "UndefinedPhase", base.ptr());

    py::class_<QubitParams>(m, "QubitParams")
        .def(py::init([](double e_c, double e_j) { return QubitParams{e_c, e_j}; }), py::arg("e_c"),
             py::arg("e_j"))
        .def_readwrite("e_c", &QubitParams::e_c)
        .def_readwrite("e_j", &QubitParams::e_j);

    py::class_<CircuitParams>(m, "CircuitParams")
        .def(py::init([](QubitParams f, QubitParams t, double j_c) { return CircuitParams{f, t, j_c}; }),
             py::arg("fixed"), py::arg("tunable"), py::arg("j_c"))
        .def_readwrite("fixed", &CircuitParams::fixed)
        .def_readwrite("tunable", &CircuitParams::tunable)
        .def_readwrite("j_c", &CircuitParams::j_c);

    py::class_<TruncationConfig>(m, "TruncationConfig")
        .def(py::init([](int cutoff, int levels) { return TruncationConfig{cutoff, levels}; }),
             py::arg("charge_cutoff") = 20, py::arg("levels_per_qubit") = 6)
        .def_readwrite("charge_cutoff", &TruncationConfig::charge_cutoff)
        .def_readwrite("levels_per_qubit", &TruncationConfig::levels_per_qubit);

    m.def("qubit_transitions", [](const QubitParams& q, const TruncationConfig& t) {
        return diagonalize_qubit(q, t).spectrum.transitions;
    }, py::arg("qubit"), py::arg("truncation") = TruncationConfig{});

    py::class_<CoupledSystem>(m, "CoupledSystem")
        .def(py::init<const CircuitParams&, const TruncationConfig&>(), py::arg("params"),
             py::arg("truncation") = TruncationConfig{})
        .def_property_readonly("dim", &CoupledSystem::dim)
        .def_property_readonly("dressed_energies", &CoupledSystem::dressed_energies)
        .def("energy", [](const CoupledSystem& s, std::pair<int, int> b) { return s.energy(label(b)); })
        .def("transition_frequency", [](const CoupledSystem& s, std::pair<int, int> a, std::pair<int, int> b) {
            return transition_frequency(s, label(a), label(b));
        })
        .def("static_zz_rate", [](const CoupledSystem& s) { return static_zz_rate(s); });

    py::class_<GateTarget>(m, "GateTarget")
        .def(py::init([](double theta, double zeta) { return GateTarget{theta, zeta}; }),
             py::arg("theta"), py::arg("zeta"))
        .def_static("cz", &GateTarget::cz)
        .def_static("iswap", &GateTarget::iswap)
        .def_static("sqrt_iswap", &GateTarget::sqrt_iswap)
        .def_readwrite("theta", &GateTarget::theta)
        .def_readwrite("zeta", &GateTarget::zeta)
        .def("ideal", &GateTarget::ideal);

    m.def("gate_fidelity", &gate_fidelity, py::arg("u"), py::arg("target"));
    m.def("z_phase_gate", &z_phase_gate);
    m.def("conditional_zz_phase", &conditional_zz_phase, py::arg("u"), py::arg("target"));
    m.def("virtual_z_reduce", [](const Matrix4c& u, const GateTarget& t) {
        const auto r = virtual_z_reduce(u, t);
        return py::make_tuple(r.angles, r.fidelity, r.reduced);
    });
    m.def("extract_error_budget", [](const Matrix4c& u, const GateTarget& t) {
        return budget_dict(extract_error_budget(u, t));
    });

    py::enum_<ResonanceRule>(m, "ResonanceRule")
        .value("cz_via_11_02", ResonanceRule::cz_via_11_02)
        .value("cz_via_20_11", ResonanceRule::cz_via_20_11)
        .value("swap_resonant", ResonanceRule::swap_resonant);

    py::class_<GateSpec>(m, "GateSpec")
        .def(py::init([](GateTarget target, int tones, double t_gate, double t_rise, ResonanceRule rule) {
                 GateSpec g;
                 g.target = target;
                 g.tone_count = tones;
                 g.t_gate = t_gate;
                 g.t_rise = t_rise;
                 g.rule = rule;
                 return g;
             }),
             py::arg("target") = GateTarget::cz(), py::arg("tones") = 1, py::arg("t_gate") = 75.0,
             py::arg("t_rise") = 10.0, py::arg("rule") = ResonanceRule::cz_via_11_02)
        .def_readwrite("target", &GateSpec::target)
        .def_readwrite("fixed_frequencies", &GateSpec::fixed_frequencies);

    py::class_<PulseParams>(m, "PulseParams")
        .def(py::init([](std::vector<double> a, std::vector<double> w) { return PulseParams{a, w}; }),
             py::arg("delta_ej"), py::arg("omega_p"))
        .def_readwrite("delta_ej", &PulseParams::delta_ej)
        .def_readwrite("omega_p", &PulseParams::omega_p);

    m.def("seed_frequencies", &seed_frequencies);
    m.def("propagate_computational", [](const CoupledSystem& sys, const GateSpec& g, const PulseParams& p) {
        return propagate_computational(sys, make_schedule(sys, g, p));
    });
    m.def("evaluate_pulse", [](const CoupledSystem& sys, const GateSpec& g, const PulseParams& p) {
        return budget_dict(evaluate_pulse(sys, g, p));
    });
    m.def("optimize_pulse", [](const CoupledSystem& sys, const GateSpec& g, int budget) {
        py::gil_scoped_release release;
        const auto r = optimize_pulse(sys, g, budget);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(r.best_params, budget_dict(r.metrics), r.converged);
    }, py::arg("system"), py::arg("gate"), py::arg("budget") = 400);

    m.def("bessel_weight", &bessel_weight, py::arg("n"), py::arg("omega1"), py::arg("omega_p"));
    m.def("rabi_offres_unitary", &rabi_offres_unitary, py::arg("g_eff"), py::arg("delta"), py::arg("t"));
    m.def("swap_condition_lhs", &swap_condition_lhs, py::arg("g_eff"), py::arg("delta"), py::arg("t"));
    m.def("local_equivalence_reduce", [](const Eigen::Matrix2cd& u) {
        const auto r = local_equivalence_reduce(u);
        return py::make_tuple(r.swap_magnitude, r.gamma);
    });
    m.def("zz_rate_estimate", [](const CoupledSystem& sys, const GateSpec& g, const PulseParams& p) {
        const auto s = make_schedule(sys, g, p);
        const auto e = zz_rate_estimate(interaction_table(sys, s), s.tones.at(0).omega_p, g.t_gate);
        return py::make_tuple(e.zeta_rate, e.zeta_rate_m0, e.zeta_rate_m1);
    });

    m.def("unitary_process_fidelity", [](const Matrix4c& u, const GateTarget& t) {
        const auto pm = unitary_process_map(u);
        return py::make_tuple(process_fidelity_of(pm, t), pm.trace_chi, average_fidelity_of(pm, t));
    });
    m.def("process_fidelity", [](const CoupledSystem& sys, const GateSpec& g, const PulseParams& p,
                                 double t1_us) {
        LindbladConfig cfg;
        cfg.t1_fixed = cfg.t1_tunable = t1_us;
        py::gil_scoped_release release;
        const auto r = process_fidelity(sys, make_schedule(sys, g, p), cfg, g.target);
        py::gil_scoped_acquire acquire;
        return py::make_tuple(r.f_p, r.map.trace_chi, r.fidelity);
    }, py::arg("system"), py::arg("gate"), py::arg("params"), py::arg("t1_us"));

    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); });
    m.def("config_hash", [](const std::string& text) { return config_hash_hex(parse_config(text)); });
}
