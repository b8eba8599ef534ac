#include <memory>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dicke/app/commands.hpp"
#include "dicke/measures.hpp"
#include "dicke/semiclassical.hpp"

namespace py = pybind11;
using namespace dicke;

namespace {

// Owns everything the evaluator points into.
struct System {
    SpaceConfig space;
    FloquetBasis basis;
    DissipatorData dissipator;
    std::unique_ptr<NonMarkovEvaluator> evaluator;

    System(const ModelParams& p, int photon_cutoff, const SpectralModel& s, const FloquetNumerics& num,
           const GridSpec& grid, bool force_driven)
        : space(photon_cutoff, p.n_emitters),
          basis(build_floquet_basis(p, space, num, force_driven)),
          dissipator(assemble_dissipator(basis, build_coupling_channels(space), s)),
          evaluator(std::make_unique<NonMarkovEvaluator>(basis, space, dissipator, grid, p.omega0)) {}

    Eigen::VectorXd steady() const { return steady_state(dissipator.rates); }
    DenseOperator cavity_state() const {
        return stationary_cavity_state(basis, steady(), space, dissipator.coherence).rho.matrix();
    }
};

}  // namespace

PYBIND11_MODULE(pydicke, m) {
    m.doc() = "Driven Dicke model: Floquet-Born-Markov dynamics, non-Markovianity and mean-field tools.";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<app::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_static("resonant", &ModelParams::resonant, py::arg("n_emitters"), py::arg("g"),
                    py::arg("drive_amplitude"), py::arg("omega0") = 1.0)
        .def_readwrite("n_emitters", &ModelParams::n_emitters)
        .def_readwrite("omega0", &ModelParams::omega0)
        .def_readwrite("omega_c", &ModelParams::omega_c)
        .def_readwrite("omega_x", &ModelParams::omega_x)
        .def_readwrite("omega_d", &ModelParams::omega_d)
        .def_readwrite("g", &ModelParams::g)
        .def_readwrite("drive_amplitude", &ModelParams::drive_amplitude);

    py::class_<SpectralModel>(m, "SpectralModel")
        .def(py::init<>())
        .def_readwrite("gamma", &SpectralModel::gamma)
        .def_readwrite("omega0", &SpectralModel::omega0)
        .def_readwrite("temperature", &SpectralModel::temperature)
        .def_readwrite("lamb_shift", &SpectralModel::lamb_shift)
        .def_readwrite("lamb_cutoff", &SpectralModel::lamb_cutoff);

    py::class_<FloquetNumerics>(m, "FloquetNumerics")
        .def(py::init<>())
        .def_readwrite("n_steps", &FloquetNumerics::n_steps)
        .def_readwrite("magnus_order", &FloquetNumerics::magnus_order)
        .def_readwrite("nu_max", &FloquetNumerics::nu_max)
        .def_readwrite("degeneracy_tol", &FloquetNumerics::degeneracy_tol);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_readwrite("steps_per_period", &GridSpec::steps_per_period)
        .def_readwrite("horizon_factor", &GridSpec::horizon_factor)
        .def_readwrite("max_periods", &GridSpec::max_periods);

    m.def("hamiltonian", [](const ModelParams& p, int cutoff) {
        return build_dicke_hamiltonian(p, SpaceConfig(cutoff, p.n_emitters));
    }, py::arg("params"), py::arg("photon_cutoff"));
    m.def("spectrum", &spectrum);
    m.def("chi", &chi);
    m.def("trace_distance", &trace_distance);

    py::enum_<PairKind>(m, "PairKind")
        .value("canonical", PairKind::canonical)
        .value("random_pure", PairKind::random_pure)
        .value("random_product", PairKind::random_product);

    py::class_<StatePair>(m, "StatePair")
        .def_readonly("rho1", &StatePair::rho1)
        .def_readonly("rho2", &StatePair::rho2)
        .def_readonly("kind", &StatePair::kind)
        .def_readonly("seed", &StatePair::seed);
    m.def("canonical_pair", &canonical_pair);
    m.def("random_pure_pair", &random_pure_pair);
    m.def("random_product_pair", &random_product_pair);

    py::class_<NonMarkovResult>(m, "NonMarkovResult")
        .def_readonly("value", &NonMarkovResult::value)
        .def_readonly("distances", &NonMarkovResult::distances)
        .def_readonly("dt", &NonMarkovResult::dt)
        .def_readonly("coarse_value", &NonMarkovResult::coarse_value)
        .def_readonly("grid_delta", &NonMarkovResult::grid_delta)
        .def_readonly("converged", &NonMarkovResult::converged);

    py::class_<System>(m, "System")
        .def(py::init<const ModelParams&, int, const SpectralModel&, const FloquetNumerics&, const GridSpec&, bool>(),
             py::arg("params"), py::arg("photon_cutoff"), py::arg("bath") = SpectralModel{},
             py::arg("numerics") = FloquetNumerics{}, py::arg("grid") = GridSpec{}, py::arg("force_driven") = false)
        .def_property_readonly("quasienergies", [](const System& s) { return s.basis.energies; })
        .def_property_readonly("mean_energies", [](const System& s) { return s.basis.mean_energies(); })
        .def_property_readonly("driven", [](const System& s) { return s.basis.driven; })
        .def_property_readonly("rates", [](const System& s) { return s.dissipator.rates; })
        .def_property_readonly("coherence", [](const System& s) { return s.dissipator.coherence; })
        .def_property_readonly("warnings", [](const System& s) { return s.dissipator.warnings; })
        .def("states_at", [](const System& s, double t) { return s.basis.states_at(t); })
        .def("steady_state", &System::steady)
        .def("cavity_state", &System::cavity_state)
        .def("horizon", [](const System& s) { return s.evaluator->horizon(); })
        .def("nonmarkovianity", [](const System& s, const StatePair& p) { return s.evaluator->evaluate(p); })
        .def("max_nonmarkovianity", [](const System& s, int n_samples, std::uint64_t seed) {
            return maximize_nonmarkovianity(*s.evaluator, n_samples, seed).best;
        }, py::arg("n_samples"), py::arg("seed") = 1);

    m.def("husimi", [](const DenseOperator& rho, double range, int points) {
        HusimiGrid g{-range, range, -range, range, points, points};
        return husimi(rho, g).q;
    }, py::arg("rho_cavity"), py::arg("range") = 5.0, py::arg("points") = 101);
    m.def("detect_modes", [](const DenseOperator& rho, double range, int points) {
        HusimiGrid g{-range, range, -range, range, points, points};
        std::vector<std::pair<double, double>> out;
        for (const auto& mode : detect_modes(husimi(rho, g))) out.emplace_back(mode.re, mode.im);
        return out;
    }, py::arg("rho_cavity"), py::arg("range") = 5.0, py::arg("points") = 101);

    auto sc = m.def_submodule("semiclassical");
    py::class_<semiclassical::Params>(sc, "Params")
        .def(py::init<>())
        .def_readwrite("n_emitters", &semiclassical::Params::n_emitters)
        .def_readwrite("g", &semiclassical::Params::g)
        .def_readwrite("drive_amplitude", &semiclassical::Params::drive_amplitude)
        .def_readwrite("kappa", &semiclassical::Params::kappa)
        .def_readwrite("detuning_cavity", &semiclassical::Params::detuning_cavity)
        .def_readwrite("detuning_emitter", &semiclassical::Params::detuning_emitter);
    py::class_<semiclassical::State>(sc, "State")
        .def(py::init<>())
        .def_readwrite("alpha", &semiclassical::State::alpha)
        .def_readwrite("beta", &semiclassical::State::beta)
        .def_readwrite("zeta", &semiclassical::State::zeta)
        .def("total_pseudospin", &semiclassical::State::total_pseudospin);
    sc.def("integrate", [](const semiclassical::State& s0, const semiclassical::Params& p, double t_end, double dt,
                           int sample_every) {
        const auto traj = semiclassical::integrate(s0, p, t_end, dt, sample_every);
        std::vector<double> t;
        std::vector<cplx> alpha;
        for (const auto& smp : traj.samples) {
            t.push_back(smp.t);
            alpha.push_back(smp.state.alpha);
        }
        return py::make_tuple(t, alpha, traj.max_total_drift);
    }, py::arg("state"), py::arg("params"), py::arg("t_end"), py::arg("dt"), py::arg("sample_every") = 1);
    sc.def("branch_state", &semiclassical::branch_state);
    sc.def("critical_amplitude", &semiclassical::critical_amplitude);

    m.def("config_hash", [](const std::string& text) { return app::config_hash(app::parse_config_text(text)); });
    m.def("run", [](const std::string& command, const std::string& text, const std::string& output_dir,
                    int threads) {
        app::RunConfig cfg = app::parse_config_text(text);
        cfg.output_dir = output_dir;
        cfg.cache_dir = "";
        cfg.threads = threads;
        const auto r = app::run_command(command, cfg);
        return py::make_tuple(r.exit_code, r.csv.string());
    }, py::arg("command"), py::arg("config_text"), py::arg("output_dir"), py::arg("threads") = 1);
}
