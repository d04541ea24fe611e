#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaylab/channel.hpp"
#include "relaylab/sim.hpp"

#include <sstream>

namespace py = pybind11;
using namespace relaylab;

PYBIND11_MODULE(_relaylab, m) {
    m.doc() = "MIMO relay channel rate bounds and achievable-rate schemes";
    m.attr("__version__") = "1.0.0";

    py::register_exception<TopologyDegenerateError>(m, "TopologyDegenerateError",
                                                    PyExc_ValueError);

    py::class_<AntennaConfig>(m, "AntennaConfig")
        .def(py::init<>())
        .def(py::init([](int m1, int n1, int m2, int n2) {
                 AntennaConfig cfg{m1, n1, m2, n2};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("m1"), py::arg("n1"), py::arg("m2"), py::arg("n2"))
        .def_readwrite("m1", &AntennaConfig::m1)
        .def_readwrite("n1", &AntennaConfig::n1)
        .def_readwrite("m2", &AntennaConfig::m2)
        .def_readwrite("n2", &AntennaConfig::n2)
        .def("__repr__", [](const AntennaConfig& c) {
            std::ostringstream os;
            os << "AntennaConfig(m1=" << c.m1 << ", n1=" << c.n1 << ", m2=" << c.m2
               << ", n2=" << c.n2 << ")";
            return os.str();
        });

    py::class_<Topology>(m, "Topology")
        .def(py::init<>())
        .def(py::init([](double dx, double dy, double eta) {
                 return Topology{dx, dy, eta};
             }),
             py::arg("dx") = 1.0 / 3.0, py::arg("dy") = 0.5, py::arg("eta") = 4.0)
        .def_readwrite("dx", &Topology::dx)
        .def_readwrite("dy", &Topology::dy)
        .def_readwrite("eta", &Topology::eta)
        .def("source_relay_dist", &Topology::source_relay_dist)
        .def("relay_dest_dist", &Topology::relay_dest_dist)
        .def("__repr__", [](const Topology& t) {
            std::ostringstream os;
            os << "Topology(dx=" << t.dx << ", dy=" << t.dy << ", eta=" << t.eta << ")";
            return os.str();
        });

    py::class_<PowerConstraints>(m, "PowerConstraints")
        .def(py::init<>())
        .def(py::init([](double p1, double p2) {
                 PowerConstraints pc;
                 pc.p1 = p1;
                 pc.p2 = p2;
                 return pc;
             }),
             py::arg("p1") = 1.0, py::arg("p2") = 1.0)
        .def_readwrite("p1", &PowerConstraints::p1)
        .def_readwrite("p2", &PowerConstraints::p2)
        .def_readwrite("per_antenna_source", &PowerConstraints::per_antenna_source)
        .def_readwrite("per_antenna_relay", &PowerConstraints::per_antenna_relay);

    py::class_<ChannelRealization>(m, "ChannelRealization")
        .def(py::init<>())
        .def_readwrite("h11", &ChannelRealization::h11)
        .def_readwrite("h21", &ChannelRealization::h21)
        .def_readwrite("h12", &ChannelRealization::h12)
        .def_property_readonly("m1", &ChannelRealization::m1)
        .def_property_readonly("n1", &ChannelRealization::n1)
        .def_property_readonly("m2", &ChannelRealization::m2)
        .def_property_readonly("n2", &ChannelRealization::n2);

    m.def("generate_realization", &generate_realization, py::arg("antennas"),
          py::arg("topology"), py::arg("seed"), py::arg("trial"),
          "Seeded Rayleigh fading draw scaled by distance path loss.");
    m.def("realization_checksum", &realization_checksum, py::arg("channel"),
          "Order-independent fingerprint of a realization's entries.");
    m.def("db_to_power", &db_to_power, py::arg("db"));
    m.def("known_schemes", &known_schemes);
    m.def("scheme_uses_bandwidth", &scheme_uses_bandwidth, py::arg("scheme"));

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("antennas", &ExperimentSpec::antennas)
        .def_readwrite("power", &ExperimentSpec::power)
        .def_readwrite("topology", &ExperimentSpec::topology)
        .def_readwrite("dx_grid", &ExperimentSpec::dx_grid)
        .def_readwrite("schemes", &ExperimentSpec::schemes)
        .def_readwrite("trials", &ExperimentSpec::trials)
        .def_readwrite("seed", &ExperimentSpec::seed)
        .def_readwrite("per_antenna", &ExperimentSpec::per_antenna)
        .def_readwrite("tol_nats", &ExperimentSpec::tol_nats)
        .def("validate", &ExperimentSpec::validate);

    py::class_<SchemeValue>(m, "SchemeValue")
        .def_readonly("rate_bits", &SchemeValue::rate_bits)
        .def_readonly("w1", &SchemeValue::w1)
        .def("__repr__", [](const SchemeValue& v) {
            std::ostringstream os;
            os << "SchemeValue(rate_bits=" << v.rate_bits;
            if (v.w1) os << ", w1=" << *v.w1;
            return os.str() + ")";
        });

    m.def("evaluate_scheme", &evaluate_scheme, py::arg("scheme"), py::arg("channel"),
          py::arg("spec"),
          "Rate of one scheme on one realization under the spec's settings.");

    py::class_<TrialFailure>(m, "TrialFailure")
        .def_readonly("scheme", &TrialFailure::scheme)
        .def_readonly("trial", &TrialFailure::trial)
        .def_readonly("message", &TrialFailure::message);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("rates", &ExperimentResult::rates)
        .def_readonly("w1", &ExperimentResult::w1)
        .def_readonly("failures", &ExperimentResult::failures)
        .def_readonly("channel_checksums", &ExperimentResult::channel_checksums)
        .def_property_readonly("trials", &ExperimentResult::trials)
        .def_property_readonly("failed_solves", &ExperimentResult::failed_solves);

    m.def("run", &run, py::arg("spec"), py::call_guard<py::gil_scoped_release>(),
          "Evaluate every requested scheme on shared per-trial realizations.");

    py::class_<CdfPoint>(m, "CdfPoint")
        .def_readonly("rate_bits", &CdfPoint::rate_bits)
        .def_readonly("quantile", &CdfPoint::quantile);

    m.def("empirical_cdf", &empirical_cdf, py::arg("samples"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("dx", &SweepRow::dx)
        .def_readonly("scheme", &SweepRow::scheme)
        .def_readonly("mean_rate_bits", &SweepRow::mean_rate_bits)
        .def_readonly("stderr_bits", &SweepRow::stderr_bits)
        .def_readonly("mean_w1", &SweepRow::mean_w1)
        .def_readonly("samples", &SweepRow::samples);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("rows", &SweepResult::rows)
        .def_readonly("failures", &SweepResult::failures)
        .def_readonly("skipped_dx", &SweepResult::skipped_dx);

    m.def("position_sweep", &position_sweep, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>(),
          "Run the spec once per dx in dx_grid, reusing the fading draws.");
}
