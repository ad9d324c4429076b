#include <sstream>

#include <nlohmann/json.hpp>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddlab/domains.hpp"
#include "ddlab/equalize.hpp"
#include "ddlab/harness.hpp"
#include "ddlab/sparsity.hpp"
#include "ddlab/spectral.hpp"

namespace py = pybind11;
using namespace ddlab;

namespace {

DomainMatrix tagged(const CMatrix& H, MatrixDomain d = MatrixDomain::DelayTime) {
  if (H.rows() != H.cols()) throw ConfigError("channel matrix must be square");
  return {d, H, std::nullopt};
}

spectral::Direction direction(bool inverse) {
  return inverse ? spectral::Direction::Inverse : spectral::Direction::Forward;
}

harness::Scenario scenario_from(const std::string& json_text) {
  return nlohmann::json::parse(json_text).get<harness::Scenario>();
}

}  // namespace

PYBIND11_MODULE(_ddlab, m) {
  m.doc() = "Channel sparsity and equalization-domain toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularSystemError>(m, "SingularSystemError", PyExc_ArithmeticError);

  m.def("unitary_dft", [](const CVector& v, bool inverse) { return spectral::unitary_dft(v, direction(inverse)); },
        py::arg("v"), py::arg("inverse") = false);
  m.def("layered_idft", [](const CVector& v, std::size_t M) {
    return spectral::layered_idft(v, LayeredFactorization::from_total(v.size(), M));
  }, py::arg("v"), py::arg("M"));
  m.def("otfs_precoder", [](const CVector& s, std::size_t M) {
    return spectral::otfs_precoder(s, LayeredFactorization::from_total(s.size(), M));
  }, py::arg("s"), py::arg("M"));

  py::class_<channel::ChannelCaseConfig>(m, "ChannelCaseConfig")
      .def(py::init<>())
      .def_readwrite("case_id", &channel::ChannelCaseConfig::case_id)
      .def_readwrite("L", &channel::ChannelCaseConfig::L)
      .def_readwrite("T_d", &channel::ChannelCaseConfig::T_d)
      .def_readwrite("F_d", &channel::ChannelCaseConfig::F_d)
      .def_readwrite("R_f", &channel::ChannelCaseConfig::R_f)
      .def_readwrite("P", &channel::ChannelCaseConfig::P)
      .def_readwrite("M", &channel::ChannelCaseConfig::M)
      .def_readwrite("N", &channel::ChannelCaseConfig::N)
      .def("validate", &channel::ChannelCaseConfig::validate);
  m.def("case_config", &channel::case_config, py::arg("case_id"), py::arg("P") = 256, py::arg("M") = 16,
        py::arg("N") = 16);

  py::class_<channel::Path>(m, "Path")
      .def(py::init<>())
      .def(py::init([](Complex g, double delay, double doppler) { return channel::Path{g, delay, doppler}; }),
           py::arg("gain"), py::arg("delay"), py::arg("doppler"))
      .def_readwrite("gain", &channel::Path::gain)
      .def_readwrite("delay", &channel::Path::delay)
      .def_readwrite("doppler", &channel::Path::doppler);
  py::class_<channel::PathSet>(m, "PathSet")
      .def(py::init<>())
      .def_readwrite("paths", &channel::PathSet::paths)
      .def_readwrite("seed", &channel::PathSet::seed)
      .def_readwrite("case_id", &channel::PathSet::case_id)
      .def("total_power", &channel::PathSet::total_power)
      .def("to_json", [](const channel::PathSet& p) { return nlohmann::json(p).dump(); })
      .def_static("from_json", [](const std::string& s) { return nlohmann::json::parse(s).get<channel::PathSet>(); });
  m.def("sample_paths", &channel::sample_paths, py::arg("cfg"), py::arg("seed"));
  m.def("build_H_dt", [](const channel::PathSet& p, std::size_t P) { return channel::build_H_dt(p, P).entries; },
        py::arg("paths"), py::arg("P"));

  m.def("to_domain", [](const CMatrix& H_dt, const std::string& domain, std::optional<std::size_t> M) {
    std::optional<LayeredFactorization> fact;
    if (M) fact = LayeredFactorization::from_total(H_dt.rows(), *M);
    return domains::to_domain(tagged(H_dt), parse_matrix_domain(domain), fact).entries;
  }, py::arg("H_dt"), py::arg("domain"), py::arg("M") = std::nullopt);
  m.def("fD_closed_form", [](const channel::PathSet& p, std::size_t P) { return domains::fD_closed_form(p, P).entries; },
        py::arg("paths"), py::arg("P"));

  m.def("lpr", [](const CMatrix& H, std::size_t L_c) { return sparsity::lpr(tagged(H), L_c); }, py::arg("H"),
        py::arg("L_c"));
  m.def("spr", [](const CMatrix& H, std::size_t L_c) { return sparsity::spr(tagged(H), L_c); }, py::arg("H"),
        py::arg("L_c"));
  m.def("ratio_profile", [](const CMatrix& H, std::size_t max_L_c) {
    auto r = sparsity::ratio_profile(tagged(H), max_L_c);
    return py::make_tuple(r.lpr, r.spr);
  }, py::arg("H"), py::arg("max_L_c"));

  m.def("mmse_solve", &equalize::mmse_solve, py::arg("H"), py::arg("y"), py::arg("sigma2"));

  m.def("run_ber_csv", [](const std::string& scenario_json) {
    const auto sc = scenario_from(scenario_json);
    std::vector<harness::BerRecord> recs;
    {
      py::gil_scoped_release release;
      recs = harness::run_ber(sc);
    }
    std::ostringstream os;
    harness::write_ber_csv(os, recs);
    return os.str();
  }, py::arg("scenario_json"));
  m.def("run_sparsity_csv", [](const std::string& scenario_json, const std::vector<std::size_t>& lc_grid) {
    const auto sc = scenario_from(scenario_json);
    std::vector<sparsity::SparsityRecord> recs;
    {
      py::gil_scoped_release release;
      recs = harness::run_sparsity(sc, lc_grid);
    }
    std::ostringstream os;
    harness::write_sparsity_csv(os, recs);
    return os.str();
  }, py::arg("scenario_json"), py::arg("lc_grid"));
  m.def("scenario_defaults", [] { return nlohmann::json(scenario_from(R"({"case": 1})")).dump(); });

  m.def("recommend_domain", [](const channel::ChannelCaseConfig& cfg, std::optional<CMatrix> H_dt, const std::string& mode) {
    equalize::RecommendOptions opts;
    if (mode == "metric") opts.mode = equalize::RecommendMode::Metric;
    else if (mode != "rule") throw ConfigError("mode must be rule or metric");
    std::optional<DomainMatrix> H;
    if (H_dt) {
      H = tagged(*H_dt);
      H->fact = cfg.factorization();
    }
    const auto r = equalize::recommend_domain(cfg, H ? &*H : nullptr, opts);
    return py::make_tuple(std::string(to_string(r.domain)), r.rule_fired, r.metrics);
  }, py::arg("cfg"), py::arg("H_dt") = std::nullopt, py::arg("mode") = "rule");
}
