#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sbs/array_geometry.hpp"
#include "sbs/beamforming.hpp"
#include "sbs/config.hpp"
#include "sbs/experiments.hpp"
#include "sbs/frame_scheduler.hpp"
#include "sbs/link_budget.hpp"
#include "sbs/marcum.hpp"
#include "sbs/ofdm_isac.hpp"
#include "sbs/scanning.hpp"

namespace py = pybind11;
using namespace sbs;

PYBIND11_MODULE(_sbs, m) {
  m.doc() = "Sensing base station toolkit core";
  m.attr("__version__") = kToolkitVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::class_<Direction>(m, "Direction")
      .def(py::init<double, double>(), py::arg("phi_deg"), py::arg("theta_deg"))
      .def_readwrite("phi_deg", &Direction::phi_deg)
      .def_readwrite("theta_deg", &Direction::theta_deg)
      .def("__repr__", [](const Direction& d) {
        return "Direction(" + std::to_string(d.phi_deg) + ", " + std::to_string(d.theta_deg) + ")";
      });

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def_static("from_carrier", &ArrayConfig::from_carrier, py::arg("layers"), py::arg("log2_per_layer"),
                  py::arg("carrier_hz"))
      .def_readwrite("layers", &ArrayConfig::layers)
      .def_readwrite("log2_per_layer", &ArrayConfig::log2_per_layer)
      .def_readwrite("spacing_m", &ArrayConfig::spacing_m)
      .def_readwrite("wavelength_m", &ArrayConfig::wavelength_m)
      .def("element_count", &ArrayConfig::element_count);

  m.def("steering_vector", &steering_vector, py::arg("cfg"), py::arg("dir"));
  m.def("single_beam_weights", &single_beam_weights, py::arg("cfg"), py::arg("dir"));
  m.def(
      "beam_pattern_db",
      [](const ArrayConfig& cfg, const CVector& w, const std::vector<Direction>& grid) {
        return beam_pattern(cfg, w, grid).gain_db;
      },
      py::arg("cfg"), py::arg("w"), py::arg("grid"));
  m.def(
      "joint_weights",
      [](const ArrayConfig& cfg, const Direction& fdb, const std::vector<Direction>& dcbs, double beta,
         double grid_step_deg) {
        const BeamSpec spec{fdb, dcbs, beta};
        const JointBeamforming jb =
            design_joint_beams(cfg, spec, DirectionGrid::azimuth_cut(fdb.theta_deg, grid_step_deg));
        return py::make_tuple(jb.solution.w_opt, jb.solution.f_w, jb.superposition);
      },
      py::arg("cfg"), py::arg("fdb"), py::arg("dcbs"), py::arg("beta") = 0.01, py::arg("grid_step_deg") = 1.0,
      "Joint combiner on an azimuth cut; returns (w_opt, f_w, superposition weights).");

  py::class_<RadioParams>(m, "RadioParams")
      .def(py::init<>())
      .def_static("reference", &RadioParams::reference)
      .def_readwrite("transmit_power_w", &RadioParams::transmit_power_w)
      .def_readwrite("rho", &RadioParams::rho)
      .def_readwrite("rician_k", &RadioParams::rician_k)
      .def_readwrite("snr_threshold", &RadioParams::snr_threshold)
      .def_readwrite("outage_threshold", &RadioParams::outage_threshold)
      .def_readwrite("clutter_power_w", &RadioParams::clutter_power_w)
      .def_readwrite("bandwidth_hz", &RadioParams::bandwidth_hz)
      .def_readwrite("path_loss_exp", &RadioParams::path_loss_exp);

  m.def("marcum_q", &marcum_q, py::arg("a"), py::arg("b"));
  m.def("inv_marcum_q", &inv_marcum_q, py::arg("a"), py::arg("q"));
  m.def("outage_probability", &outage_probability, py::arg("params"), py::arg("x_m"));
  m.def("outage_capacity", &outage_capacity, py::arg("params"), py::arg("x_m"));
  m.def("rician_snr_pdf", &rician_snr_pdf, py::arg("params"), py::arg("x_m"), py::arg("w"));
  m.def("max_comm_range", &max_comm_range, py::arg("params"));
  m.def("max_sensing_range", &max_sensing_range, py::arg("params"));
  m.def(
      "range_crossover",
      [](const RadioParams& p) -> py::object {
        const auto c = range_crossover(p);
        if (!c) return py::none();
        return py::make_tuple(c->rho, c->range_m);
      },
      py::arg("params"));

  m.def("p_correct_bin", &p_correct_bin, py::arg("gamma"), py::arg("length"));
  m.def("rmse_velocity_theory", &rmse_velocity_theory, py::arg("velocity_mps"), py::arg("gamma"), py::arg("symbols"));
  m.def("rmse_range_theory", &rmse_range_theory, py::arg("range_m"), py::arg("gamma"), py::arg("subcarriers"));

  m.def(
      "scanning_period",
      [](double height_m, double road_width_m, double max_range_m, double dwell_s, double dtheta, double dphi,
         const std::vector<Direction>& dcbs) {
        const ScanResult r = scanning_period({height_m, road_width_m, max_range_m, dwell_s}, {dtheta, dphi}, dcbs);
        return py::make_tuple(r.period_s, r.dwells);
      },
      py::arg("height_m"), py::arg("road_width_m"), py::arg("max_range_m"), py::arg("dwell_s"),
      py::arg("dtheta_deg"), py::arg("dphi_deg"), py::arg("dcbs") = std::vector<Direction>{},
      "Returns (T_sc seconds, counted dwells).");

  py::class_<ToolkitConfig>(m, "ToolkitConfig")
      .def_property_readonly("radio", [](const ToolkitConfig& c) { return c.radio; })
      .def_property_readonly("carrier_hz", [](const ToolkitConfig& c) { return c.carrier_hz; })
      .def("array_config", &ToolkitConfig::array_config);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("dump_config", &dump_config, py::arg("cfg"));
  m.def("config_hash", &config_hash, py::arg("cfg"));

  m.def(
      "run_experiment",
      [](const ToolkitConfig& cfg, const std::string& experiment, const std::filesystem::path& out_dir,
         std::optional<std::uint64_t> seed, std::optional<int> trials, std::optional<int> symbols,
         std::optional<int> subcarriers, std::optional<std::filesystem::path> requests_csv) {
        ExperimentOptions o;
        o.out_dir = out_dir;
        o.seed = seed;
        o.trials = trials;
        o.symbols = symbols;
        o.subcarriers = subcarriers;
        if (requests_csv) o.requests_csv = *requests_csv;
        py::gil_scoped_release release;
        return run_experiment(cfg, experiment, o).to_json();
      },
      py::arg("cfg"), py::arg("experiment"), py::arg("out_dir"), py::arg("seed") = py::none(),
      py::arg("trials") = py::none(), py::arg("symbols") = py::none(), py::arg("subcarriers") = py::none(),
      py::arg("requests_csv") = py::none(), "Runs one experiment and returns the manifest as JSON text.");
}
