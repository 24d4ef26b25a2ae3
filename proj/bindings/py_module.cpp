#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "trunctest/errors.hpp"
#include "trunctest/hardinstance.hpp"
#include "trunctest/likelihood.hpp"
#include "trunctest/normal.hpp"
#include "trunctest/sampling.hpp"
#include "trunctest/statistics.hpp"
#include "trunctest/testers.hpp"
#include "trunctest/truncation.hpp"

namespace py = pybind11;
using namespace trunctest;

namespace {

TestVerdict py_test_unknown(const TruncatedGaussianSpec& spec, const TesterConfig& cfg) {
  return test_unknown_truncation(source_from_spec(spec), spec.dim(), cfg);
}

TestVerdict py_test_known(const TruncatedGaussianSpec& spec, const TesterConfig& cfg,
                          const Vec& mu_s_null) {
  return test_known_truncation(source_from_spec(spec), spec.set, spec.dim(), cfg, mu_s_null);
}

TestVerdict py_test_ltt(const TruncatedGaussianSpec& spec, const TesterConfig& cfg) {
  return test_learn_then_test(source_from_spec(spec), spec.dim(), cfg);
}

}  // namespace

PYBIND11_MODULE(_trunctest, m) {
  m.doc() = "Gaussian mean testing under truncation: core operations";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<SamplingEfficiencyError>(m, "SamplingEfficiencyError", PyExc_RuntimeError);
  py::register_exception<NullSetError>(m, "NullSetError", PyExc_RuntimeError);
  py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);

  // scalar normal primitives
  m.def("normal_pdf", &normal_pdf, py::arg("x"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));
  m.def("normal_cdf_inv", &normal_cdf_inv, py::arg("p"));
  m.def("erf_inv", &erf_inv, py::arg("p"));

  py::class_<ScalarEstimate>(m, "ScalarEstimate")
      .def_readonly("value", &ScalarEstimate::value)
      .def_readonly("std_error", &ScalarEstimate::std_error)
      .def_readonly("draws_used", &ScalarEstimate::draws_used)
      .def("__repr__", [](const ScalarEstimate& e) {
        return "ScalarEstimate(value=" + std::to_string(e.value) +
               ", std_error=" + std::to_string(e.std_error) + ")";
      });

  py::class_<VectorEstimate>(m, "VectorEstimate")
      .def_readonly("value", &VectorEstimate::value)
      .def_readonly("std_error", &VectorEstimate::std_error)
      .def_readonly("draws_used", &VectorEstimate::draws_used);

  py::class_<MonteCarloOptions>(m, "MonteCarloOptions")
      .def(py::init<>())
      .def_readwrite("budget", &MonteCarloOptions::budget)
      .def_readwrite("seed", &MonteCarloOptions::seed);

  py::class_<TruncationSet>(m, "TruncationSet")
      .def_static("full_space", &TruncationSet::full_space, py::arg("dim"))
      .def_static("half_space_tail", &TruncationSet::half_space_tail, py::arg("direction"),
                  py::arg("cutoff"))
      .def_static("ball_complement", &TruncationSet::ball_complement, py::arg("center"),
                  py::arg("radius"))
      .def_static("oracle", &TruncationSet::oracle, py::arg("dim"), py::arg("predicate"),
                  py::arg("label") = "oracle")
      .def_property_readonly("dim", &TruncationSet::dim)
      .def_property_readonly("kind", [](const TruncationSet& s) { return to_string(s.kind()); })
      .def("contains", &TruncationSet::contains, py::arg("x"))
      .def("to_json", [](const TruncationSet& s) { return s.to_json().dump(); })
      .def_static("from_json", [](const std::string& text) {
        return TruncationSet::from_json(nlohmann::json::parse(text));
      });

  py::class_<TruncatedGaussianSpec>(m, "TruncatedGaussianSpec")
      .def(py::init<Vec, TruncationSet>(), py::arg("mu"), py::arg("set"))
      .def_readonly("mu", &TruncatedGaussianSpec::mu)
      .def_property_readonly("set", [](const TruncatedGaussianSpec& s) { return s.set; })
      .def_property_readonly("dim", &TruncatedGaussianSpec::dim);

  m.def("mass", &mass, py::arg("mu"), py::arg("set"), py::arg("mc") = MonteCarloOptions{});
  m.def("truncated_mean", &truncated_mean, py::arg("mu"), py::arg("set"),
        py::arg("mc") = MonteCarloOptions{});
  m.def("truncated_covariance_frobenius_gap", &truncated_covariance_frobenius_gap, py::arg("mu"),
        py::arg("set"), py::arg("mc") = MonteCarloOptions{});
  m.def("half_space_for_mass", &half_space_for_mass, py::arg("mu"), py::arg("direction"),
        py::arg("eps"));

  py::class_<SampleBatch>(m, "SampleBatch")
      .def_property_readonly("data", [](const SampleBatch& b) { return b.data; })
      .def_readonly("seed", &SampleBatch::seed)
      .def_readonly("proposals_used", &SampleBatch::proposals_used)
      .def_property_readonly("n", &SampleBatch::n)
      .def_property_readonly("dim", &SampleBatch::dim)
      .def_property_readonly("acceptance_rate", &SampleBatch::acceptance_rate);

  m.def("sample_truncated", &sample_truncated, py::arg("spec"), py::arg("n"), py::arg("seed"),
        py::arg("max_rejection_factor") = 100.0);
  m.def("split_batch", &split_batch, py::arg("batch"));

  py::class_<StatisticReport>(m, "StatisticReport")
      .def_readonly("value", &StatisticReport::value)
      .def_readonly("n", &StatisticReport::n)
      .def_readonly("centering", &StatisticReport::centering);

  m.def("statistic_z", &statistic_z, py::arg("x"), py::arg("y"));
  m.def("statistic_z1", &statistic_z1, py::arg("x"), py::arg("y"), py::arg("mu_s_null"));
  m.def("empirical_moments", [](const SampleBatch& b) {
    const auto mo = empirical_moments(b);
    return py::make_tuple(mo.mean, mo.cov);
  });
  m.def("ks_statistic", &ks_statistic, py::arg("samples"), py::arg("cdf"));
  m.def("ks_critical_value", &ks_critical_value, py::arg("n"), py::arg("level"));

  py::class_<HardInstance1D>(m, "HardInstance1D")
      .def_readonly("eps", &HardInstance1D::eps)
      .def_readonly("alpha", &HardInstance1D::alpha)
      .def_readonly("b", &HardInstance1D::b);

  py::class_<EmbeddedHardInstance>(m, "EmbeddedHardInstance")
      .def_property_readonly("one_d", [](const EmbeddedHardInstance& e) { return e.one_d; })
      .def_readonly("direction", &EmbeddedHardInstance::direction)
      .def_property_readonly("dim", &EmbeddedHardInstance::dim)
      .def("to_json", [](const EmbeddedHardInstance& e) { return to_json(e).dump(); });

  m.def("calibrate_hard_instance", &calibrate_hard_instance, py::arg("eps"));
  m.def("chi_square_closed_form", &chi_square_closed_form, py::arg("inst"));
  m.def("sample_complexity_floor", &sample_complexity_floor, py::arg("inst"), py::arg("d"));
  m.def("embed", &embed, py::arg("inst"), py::arg("d"), py::arg("seed"));
  m.def("to_sampling_spec", &to_sampling_spec, py::arg("inst"));

  py::enum_<EvalMode>(m, "EvalMode")
      .value("Quadrature", EvalMode::Quadrature)
      .value("MonteCarlo", EvalMode::MonteCarlo);

  py::class_<LikelihoodContext>(m, "LikelihoodContext")
      .def(py::init<TruncationSet, Vec>(), py::arg("set"), py::arg("mu"))
      .def_readwrite("mode", &LikelihoodContext::mode)
      .def_readwrite("quad_tol", &LikelihoodContext::quad_tol)
      .def_readwrite("mc_budget", &LikelihoodContext::mc_budget)
      .def_readwrite("seed", &LikelihoodContext::seed)
      .def_readwrite("strong_convexity_C", &LikelihoodContext::strong_convexity_C);

  m.def("neg_log_likelihood", &neg_log_likelihood, py::arg("ctx"), py::arg("v"));
  m.def("grad_neg_log_likelihood", &grad_neg_log_likelihood, py::arg("ctx"), py::arg("v"));
  m.def("null_truncated_mean", &null_truncated_mean, py::arg("set"), py::arg("accuracy"),
        py::arg("seed") = 0x6d755f73);
  m.def("strong_convexity_floor", &strong_convexity_floor, py::arg("ctx"));

  py::class_<GapCheck>(m, "GapCheck")
      .def_readonly("gap", &GapCheck::gap)
      .def_readonly("floor", &GapCheck::floor);
  m.def("mean_gap_lower_bound_check", &mean_gap_lower_bound_check, py::arg("set"), py::arg("mu2"),
        py::arg("beta"), py::arg("accuracy") = 1e-4, py::arg("seed") = 0x676170);

  py::enum_<Decision>(m, "Decision")
      .value("Accept", Decision::Accept)
      .value("Reject", Decision::Reject);

  py::enum_<TesterKind>(m, "TesterKind")
      .value("UnknownTrunc", TesterKind::UnknownTrunc)
      .value("KnownTrunc", TesterKind::KnownTrunc)
      .value("LearnThenTest", TesterKind::LearnThenTest);

  py::class_<TesterConfig>(m, "TesterConfig")
      .def_static("defaults", &TesterConfig::defaults, py::arg("kind"), py::arg("alpha"),
                  py::arg("seed"))
      .def_readwrite("alpha", &TesterConfig::alpha)
      .def_readwrite("c_n", &TesterConfig::c_n)
      .def_readwrite("c_thr", &TesterConfig::c_thr)
      .def_readwrite("seed", &TesterConfig::seed)
      .def_readwrite("n_override", &TesterConfig::n_override);

  py::class_<TestVerdict>(m, "TestVerdict")
      .def_property_readonly("decision", [](const TestVerdict& v) { return to_string(v.decision); })
      .def_readonly("statistic", &TestVerdict::statistic)
      .def_readonly("threshold", &TestVerdict::threshold)
      .def_readonly("n_used", &TestVerdict::n_used)
      .def_property_readonly("tester", [](const TestVerdict& v) { return to_string(v.tester); });

  m.def("test_unknown_truncation", &py_test_unknown, py::arg("spec"), py::arg("config"));
  m.def("test_known_truncation", &py_test_known, py::arg("spec"), py::arg("config"),
        py::arg("mu_s_null"));
  m.def("test_learn_then_test", &py_test_ltt, py::arg("spec"), py::arg("config"));

  m.attr("__version__") = "0.1.0";
}
