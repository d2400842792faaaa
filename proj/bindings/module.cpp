#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bjjcat/dynamics.hpp"
#include "bjjcat/observables.hpp"
#include "bjjcat/runner.hpp"
#include "bjjcat/schedules.hpp"
#include "bjjcat/spectrum.hpp"
#include "bjjcat/spin_ops.hpp"

namespace py = pybind11;
using namespace bjjcat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "collective-spin dynamics engine: accelerated adiabatic cat-state generation";

  py::register_exception<ScheduleError>(m, "ScheduleError", PyExc_RuntimeError);
  py::register_exception<CriticalPointPole>(m, "CriticalPointPole", PyExc_RuntimeError);
  py::register_exception<DegenerateGroundState>(m, "DegenerateGroundState", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<NormDriftError>(m, "NormDriftError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<SpinOperator>(m, "SpinOperator")
      .def_readonly("dim", &SpinOperator::dim)
      .def_readonly("bandwidth", &SpinOperator::bandwidth)
      .def_readonly("diag", &SpinOperator::diag)
      .def_readonly("sub", &SpinOperator::sub)
      .def("spin", &SpinOperator::spin)
      .def("apply", &SpinOperator::apply)
      .def("expectation", &SpinOperator::expectation)
      .def("inf_norm", &SpinOperator::inf_norm);

  m.def("spin_z", &spin_z, py::arg("n_atoms"));
  m.def("spin_x", &spin_x, py::arg("n_atoms"));
  m.def("spin_y", &spin_y, py::arg("n_atoms"));
  m.def("cd_operator", &cd_operator, py::arg("n_atoms"));

  py::class_<RampSpec>(m, "RampSpec")
      .def_static("polynomial", &RampSpec::polynomial, py::arg("coupling") = 1.0,
                  py::arg("duration") = 1.0)
      .def(py::init<double, double, RampSpec::Profile, RampSpec::Profile>(), py::arg("coupling"),
           py::arg("duration"), py::arg("value"), py::arg("slope"))
      .def("field", &RampSpec::field, py::arg("s"))
      .def("field_rate", &RampSpec::field_rate, py::arg("s"))
      .def_property_readonly("coupling", &RampSpec::coupling)
      .def_property_readonly("duration", &RampSpec::duration);

  m.def("frequency_infinite", &frequency_infinite, py::arg("field"), py::arg("coupling"));
  m.def("frequency_finite", &frequency_finite, py::arg("field"), py::arg("coupling"),
        py::arg("n_atoms"));
  m.def("cd_infinite", &cd_infinite, py::arg("s"), py::arg("ramp"));
  m.def("cd_finite", &cd_finite, py::arg("s"), py::arg("ramp"), py::arg("n_atoms"));
  m.def("semiclassical_potential", &semiclassical_potential, py::arg("z"), py::arg("field"),
        py::arg("coupling"), py::arg("n_atoms"));

  py::enum_<CdMode>(m, "CdMode")
      .value("OFF", CdMode::Off)
      .value("ON", CdMode::On)
      .value("AFTER_CRITICAL", CdMode::OnAfterCritical);

  py::enum_<Integrator>(m, "Integrator")
      .value("CRANK_NICOLSON", Integrator::CrankNicolson)
      .value("MAGNUS4", Integrator::Magnus4);

  py::class_<Assembly>(m, "Assembly")
      .def_readonly("n_atoms", &Assembly::n_atoms)
      .def_readonly("sz2_diag", &Assembly::sz2_diag);
  m.def("make_assembly", &make_assembly, py::arg("n_atoms"), py::arg("ramp"));
  m.def(
      "hamiltonian",
      [](const Assembly& a, double t, CdMode mode) { return hamiltonian(a, t, mode); },
      py::arg("assembly"), py::arg("t"), py::arg("mode") = CdMode::On);

  m.def("ground_state", &ground_state, py::arg("h"));

  py::class_<EigenPair>(m, "EigenPair")
      .def_readonly("value", &EigenPair::value)
      .def_readonly("vector", &EigenPair::vector);
  m.def("lowest_eigenpairs", &lowest_eigenpairs, py::arg("h"), py::arg("k"));

  py::class_<GroundSubspace>(m, "GroundSubspace")
      .def_readonly("dim", &GroundSubspace::dim)
      .def_readonly("vectors", &GroundSubspace::vectors);
  m.def("ground_subspace", &ground_subspace, py::arg("h"), py::arg("field"), py::arg("coupling"));
  m.def("populations", &populations, py::arg("psi"));
  m.def("parity_expectation", &parity_expectation, py::arg("psi"));

  py::class_<PropagationResult>(m, "PropagationResult")
      .def_readonly("times", &PropagationResult::times)
      .def_readonly("states", &PropagationResult::states)
      .def_readonly("step_count", &PropagationResult::step_count)
      .def_readonly("norm_drift", &PropagationResult::norm_drift);

  py::class_<PropagateOptions>(m, "PropagateOptions")
      .def(py::init<>())
      .def_readwrite("method", &PropagateOptions::method)
      .def_readwrite("norm_tolerance", &PropagateOptions::norm_tolerance);

  m.def("propagate", &propagate, py::arg("psi0"), py::arg("assembly"), py::arg("t_grid"),
        py::arg("steps"), py::arg("mode"), py::arg("options") = PropagateOptions{});
  m.def("propagate_constant", &propagate_constant, py::arg("psi0"), py::arg("h"),
        py::arg("duration"), py::arg("steps"), py::arg("options") = PropagateOptions{},
        py::arg("sample_count") = 1);
  m.def("evolve_frozen", &evolve_frozen, py::arg("psi_tf"), py::arg("assembly"),
        py::arg("extra_duration"), py::arg("steps"), py::arg("options") = PropagateOptions{},
        py::arg("sample_count") = 5);

  m.def("sz_mean", &sz_mean, py::arg("psi"));
  m.def("sz_second_moment", &sz_second_moment, py::arg("psi"));
  m.def("subspace_fidelity", &subspace_fidelity, py::arg("psi"), py::arg("subspace"));
  m.def("residual_energy", &residual_energy, py::arg("psi"), py::arg("h_final"),
        py::arg("coupling"), py::arg("n_atoms"));
  m.def("order_parameter", &order_parameter, py::arg("psi"), py::arg("n_atoms"));
  m.def("incomplete_magnetization", &incomplete_magnetization, py::arg("psi"), py::arg("n_atoms"));
  m.def("quantum_fisher_information", &quantum_fisher_information, py::arg("psi"));

  py::class_<DiagnosticsSample>(m, "DiagnosticsSample")
      .def_readonly("t", &DiagnosticsSample::t)
      .def_readonly("s", &DiagnosticsSample::s)
      .def_readonly("fidelity", &DiagnosticsSample::fidelity)
      .def_readonly("energy", &DiagnosticsSample::energy)
      .def_readonly("residual_energy", &DiagnosticsSample::residual_energy)
      .def_readonly("order_param", &DiagnosticsSample::order_param)
      .def_readonly("m_inc", &DiagnosticsSample::m_inc)
      .def_readonly("qfi", &DiagnosticsSample::qfi);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("n_atoms", &RunConfig::n_atoms)
      .def_readwrite("coupling", &RunConfig::coupling)
      .def_readwrite("t_f", &RunConfig::t_f)
      .def_readwrite("steps", &RunConfig::steps)
      .def_readwrite("cd_mode", &RunConfig::cd_mode)
      .def_readwrite("sample_count", &RunConfig::sample_count)
      .def_readwrite("horizon_factor", &RunConfig::horizon_factor)
      .def_readwrite("method", &RunConfig::method)
      .def_readwrite("norm_tolerance", &RunConfig::norm_tolerance)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("label", &RunConfig::label);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("trace", &RunResult::trace)
      .def_readonly("final_sample", &RunResult::final_sample)
      .def_readonly("tf_distribution", &RunResult::tf_distribution)
      .def_readonly("final_distribution", &RunResult::final_distribution)
      .def_readonly("final_state", &RunResult::final_state)
      .def_readonly("norm_drift", &RunResult::norm_drift)
      .def_readonly("total_steps", &RunResult::total_steps)
      .def_readonly("files", &RunResult::files);
  m.def("run_single", &run_single, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::enum_<SweepAxis>(m, "SweepAxis")
      .value("DURATION", SweepAxis::Duration)
      .value("ATOMS", SweepAxis::Atoms);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("axis", &SweepRow::axis)
      .def_readonly("mode", &SweepRow::mode)
      .def_readonly("ok", &SweepRow::ok)
      .def_readonly("status", &SweepRow::status)
      .def_readonly("final_sample", &SweepRow::final_sample)
      .def_readonly("norm_drift", &SweepRow::norm_drift);
  m.def("run_sweep", &run_sweep, py::arg("base"), py::arg("axis"), py::arg("values"),
        py::arg("modes"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("write_sweep_csv", &write_sweep_csv, py::arg("base"), py::arg("axis"), py::arg("rows"),
        py::arg("path"));
  m.def("write_schedule_tables", &write_schedule_tables, py::arg("base"), py::arg("grid_points"),
        py::arg("n_list"), py::arg("out_dir"));
}
