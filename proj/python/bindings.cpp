#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "authsim/auth_protocol.hpp"
#include "authsim/errors.hpp"
#include "authsim/experiment.hpp"
#include "authsim/metrics.hpp"
#include "authsim/oracle.hpp"
#include "authsim/queue_network.hpp"

namespace py = pybind11;
using namespace authsim;

namespace {

py::dict summary_to_dict(const metrics::SummaryStats& s) {
  py::dict d;
  d["count"] = s.count;
  d["mean"] = s.mean;
  d["stddev"] = s.stddev;
  d["min"] = s.min;
  d["q1"] = s.q1;
  d["median"] = s.median;
  d["q3"] = s.q3;
  d["iqr"] = s.iqr;
  d["whisker_low"] = s.whisker_low;
  d["whisker_high"] = s.whisker_high;
  d["outlier_count"] = s.outlier_count;
  d["max"] = s.max;
  return d;
}

}  // namespace

PYBIND11_MODULE(_authsim, m) {
  m.doc() = "Tandem M/M/1 authentication-latency simulator";

  // Later registrations take precedence, so the base class goes first.
  auto& base_error = py::register_exception<Error>(m, "AuthsimError");
  py::register_exception<ParameterError>(m, "ParameterError", base_error.ptr());
  py::register_exception<StabilityError>(m, "StabilityError", base_error.ptr());
  py::register_exception<EmptySampleError>(m, "EmptySampleError", base_error.ptr());

  py::enum_<ServiceDistribution>(m, "ServiceDistribution")
      .value("exponential", ServiceDistribution::exponential)
      .value("deterministic", ServiceDistribution::deterministic);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init([](double lambda, double link_ms, double service_ms, double duration_s, unsigned replications,
                       std::uint64_t seed, ServiceDistribution dist) {
             ScenarioConfig cfg = ScenarioConfig::from_milliseconds(lambda, link_ms, service_ms);
             cfg.duration = duration_s;
             cfg.replications = replications;
             cfg.seed = seed;
             cfg.service_distribution = dist;
             return cfg;
           }),
           py::arg("arrival_rate"), py::arg("link_ms"), py::arg("service_ms"), py::arg("duration_s") = 600.0,
           py::arg("replications") = 20, py::arg("seed") = 1,
           py::arg("distribution") = ServiceDistribution::exponential)
      .def_readwrite("arrival_rate", &ScenarioConfig::arrival_rate)
      .def_readwrite("link_latency", &ScenarioConfig::link_latency)
      .def_readwrite("auth_service_time", &ScenarioConfig::auth_service_time)
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("warmup", &ScenarioConfig::warmup)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("replications", &ScenarioConfig::replications)
      .def("validate", &ScenarioConfig::validate);

  m.def(
      "run_scenario", [](const ScenarioConfig& cfg) { return run_scenario(cfg).values; }, py::arg("config"),
      "Post-warm-up total delays (seconds) of one replication.");

  m.def(
      "evaluate_point",
      [](const ScenarioConfig& cfg) {
        const auto eval = experiment::evaluate_point(cfg, 1);
        py::dict d = summary_to_dict(eval.row.stats);
        d["mean"] = eval.row.mean;
        d["oracle_mean"] = eval.row.oracle_mean;
        d["rel_err"] = eval.row.rel_err;
        d["ci_contains_oracle"] = eval.row.ci_contains_oracle;
        if (eval.row.ci) d["ci"] = py::make_tuple(eval.row.ci->lower(), eval.row.ci->upper());
        else d["ci"] = py::none();
        d["csv_row"] = experiment::csv_row(eval.row);
        return d;
      },
      py::arg("config"));

  m.def("transmission_time", &transmission_time, py::arg("packet_bits"), py::arg("data_rate_bits_per_s"));

  m.def(
      "cascade_mean_sojourn",
      [](double lambda, double link_ms, double service_ms) {
        return oracle::cascade_mean_sojourn(oracle::CascadeParams::from_times(lambda, link_ms / 1e3, service_ms / 1e3));
      },
      py::arg("arrival_rate"), py::arg("link_ms"), py::arg("service_ms"));
  m.def(
      "cascade_sojourn_cdf",
      [](double t, double lambda, double link_ms, double service_ms) {
        return oracle::cascade_sojourn_cdf(t, oracle::CascadeParams::from_times(lambda, link_ms / 1e3, service_ms / 1e3));
      },
      py::arg("t"), py::arg("arrival_rate"), py::arg("link_ms"), py::arg("service_ms"));
  m.def(
      "cascade_quantile",
      [](double q, double lambda, double link_ms, double service_ms) {
        return oracle::cascade_quantile(q, oracle::CascadeParams::from_times(lambda, link_ms / 1e3, service_ms / 1e3));
      },
      py::arg("q"), py::arg("arrival_rate"), py::arg("link_ms"), py::arg("service_ms"));
  m.def("mm1_mean_sojourn", &oracle::mm1_mean_sojourn, py::arg("arrival_rate"), py::arg("service_rate"));

  m.def(
      "summarize", [](const std::vector<double>& xs) { return summary_to_dict(metrics::summarize(xs)); },
      py::arg("samples"));
  m.def(
      "replication_ci",
      [](const std::vector<double>& means) {
        const auto ci = metrics::replication_ci(means);
        return py::make_tuple(ci.point_estimate, ci.half_width);
      },
      py::arg("per_rep_means"));

  m.def(
      "protocol_check",
      []() {
        py::list rows;
        for (const auto& r : protocol::run_exhaustive_check()) {
          py::dict d;
          d["realm_trusted"] = r.realm_trusted;
          d["principal_trusted"] = r.principal_trusted;
          d["certificate_intact"] = r.certificate_intact;
          d["clouds_ack"] = r.clouds_ack;
          d["empty_targets"] = r.empty_targets;
          d["expected"] = protocol::to_string(r.expected);
          d["observed"] = protocol::to_string(r.observed);
          d["flag"] = r.flag;
          d["passed"] = r.passed();
          rows.append(d);
        }
        return rows;
      },
      "Runs the exhaustive session-approval fixture; one dict per case.");
}
