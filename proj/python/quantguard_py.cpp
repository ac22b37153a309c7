#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "quantguard/errors.hpp"
#include "quantguard/estimator.hpp"
#include "quantguard/guarantees.hpp"
#include "quantguard/harness.hpp"
#include "quantguard/io.hpp"
#include "quantguard/rational.hpp"
#include "quantguard/sources.hpp"
#include "quantguard/special_functions.hpp"

namespace py = pybind11;
namespace qg = quantguard;

namespace {

py::dict size_to_dict(const qg::SampleSizeResult& result) {
  py::dict rule;
  rule["lower_index"] = result.estimator_rule.lower_index;
  rule["upper_index"] = result.estimator_rule.upper_index;
  rule["beta_weight_constraint"] = result.estimator_rule.beta_weight_constraint;
  py::list conditions;
  for (const auto& [name, satisfied] : result.conditions_checked) {
    py::dict cond;
    cond["name"] = name;
    cond["satisfied"] = satisfied;
    conditions.append(cond);
  }
  py::dict d;
  d["method"] = std::string(qg::method_name(result.method));
  d["n_samples"] = result.n_samples;
  d["k"] = result.k;
  d["estimator_rule"] = rule;
  d["conditions_checked"] = conditions;
  return d;
}

py::dict estimate_to_dict(const qg::ThresholdEstimate& estimate) {
  py::dict d;
  d["value"] = estimate.value;
  d["lower_index"] = estimate.lower_index;
  d["upper_index"] = estimate.upper_index;
  d["beta_weight"] = estimate.beta_weight;
  d["n_samples"] = estimate.n_samples;
  d["gamma"] = estimate.gamma.str();
  return d;
}

py::dict report_to_dict(const qg::ValidationReport& report) {
  py::dict meta;
  meta["source"] = report.metadata.source_text;
  meta["gamma"] = report.metadata.gamma;
  meta["epsilon"] = report.metadata.epsilon;
  meta["rho"] = report.metadata.rho;
  meta["method"] = report.metadata.method;
  meta["sampling_mode"] = report.metadata.sampling_mode;
  meta["n_trials"] = report.metadata.n_trials;
  meta["training_size"] = report.metadata.training_size;
  meta["validation_size"] = report.metadata.validation_size;
  meta["beta_weight"] = report.metadata.beta_weight;
  meta["master_seed"] = report.metadata.master_seed;
  py::dict summary;
  summary["min"] = report.summary.min;
  summary["q1"] = report.summary.q1;
  summary["median"] = report.summary.median;
  summary["q3"] = report.summary.q3;
  summary["max"] = report.summary.max;
  py::dict histogram;
  histogram["bin_width"] = report.histogram.bin_width;
  histogram["counts"] = report.histogram.counts;
  py::dict d;
  d["metadata"] = meta;
  d["band"] = py::make_tuple(report.band_lower, report.band_upper);
  d["fraction_outside"] = report.fraction_outside;
  d["summary"] = summary;
  d["histogram"] = histogram;
  d["empirical_fars"] = report.empirical_fars;
  d["thresholds"] = report.thresholds;
  return d;
}

qg::GuaranteeParams make_params(const std::string& gamma, double epsilon, double rho) {
  return qg::GuaranteeParams(qg::RationalLevel::parse(gamma), epsilon, rho);
}

}  // namespace

PYBIND11_MODULE(quantguard, m) {
  m.doc() =
      "Distribution-free quantile thresholds for anomaly detectors: minimum sample sizes, "
      "order-statistic estimation, and Monte-Carlo validation.";
  m.attr("__version__") = "1.0.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qg::IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const qg::UsageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const qg::MathPreconditionError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const qg::DataError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "parse_gamma",
      [](const std::string& text) { return qg::RationalLevel::parse(text).str(); },
      py::arg("text"), "Parse an exact decimal or n1/n2 gamma and return it reduced as 'n1/n2'.");

  m.def(
      "sample_size",
      [](const std::string& method, const std::string& gamma, double epsilon, double rho) {
        return size_to_dict(
            qg::sample_size(qg::method_from_name(method), make_params(gamma, epsilon, rho)));
      },
      py::arg("method"), py::arg("gamma"), py::arg("epsilon"), py::arg("rho"),
      "Minimum N for one method ('dkw', 'vp', or 'beta').");

  m.def(
      "sample_sizes",
      [](const std::string& gamma, double epsilon, double rho) {
        py::list out;
        for (const auto& result : qg::all_sample_sizes(make_params(gamma, epsilon, rho))) {
          out.append(size_to_dict(result));
        }
        return out;
      },
      py::arg("gamma"), py::arg("epsilon"), py::arg("rho"), "Minimum N for all three methods.");

  m.def("upper_gaussian_quantile", &qg::upper_gaussian_quantile, py::arg("q"),
        "z such that 1 - Phi(z) = q.");

  m.def("coverage_probability", &qg::coverage_probability, py::arg("m"), py::arg("n"),
        py::arg("gamma"), py::arg("epsilon"),
        "Exact P(gamma - epsilon <= F(y_(m)) <= gamma + epsilon) for n i.i.d. samples.");

  m.def(
      "order_statistic_cdf_moments",
      [](std::int64_t m_index, std::int64_t n) {
        const qg::BetaMoments moments = qg::order_statistic_cdf_moments(m_index, n);
        py::dict d;
        d["mean"] = moments.mean;
        d["variance"] = moments.variance;
        return d;
      },
      py::arg("m"), py::arg("n"), "Mean and variance of F(y_(m)) ~ Beta(m, n+1-m).");

  m.def(
      "beta_confidence_bounds",
      [](double gamma_hat, double rho, std::int64_t n) {
        const qg::ConfidenceBounds bounds = qg::beta_confidence_bounds(gamma_hat, rho, n);
        py::dict d;
        d["eps_lower"] = bounds.eps_lower;
        d["eps_upper"] = bounds.eps_upper;
        return d;
      },
      py::arg("gamma_hat"), py::arg("rho"), py::arg("n"),
      "One-sided deviation bounds for F(y_(m)) around gamma_hat = m/n.");

  m.def(
      "estimate_threshold",
      [](const std::vector<double>& values, const std::string& gamma, double beta) {
        return estimate_to_dict(
            qg::estimate_threshold(qg::SampleSet(values), qg::RationalLevel::parse(gamma), beta));
      },
      py::arg("values"), py::arg("gamma"), py::arg("beta") = 0.0,
      "Order-statistic threshold estimate from raw samples.");

  m.def(
      "empirical_cdf",
      [](const std::vector<double>& values, double x) {
        return qg::SampleSet(values).empirical_cdf(x);
      },
      py::arg("values"), py::arg("x"));

  m.def(
      "empirical_false_alarm_rate",
      [](const std::vector<double>& values, double threshold) {
        return qg::SampleSet(values).empirical_false_alarm_rate(threshold);
      },
      py::arg("values"), py::arg("threshold"));

  m.def(
      "run_monte_carlo",
      [](const std::string& source, const std::string& method, const std::string& gamma,
         double epsilon, double rho, std::int64_t trials, std::int64_t validation,
         std::uint64_t seed, double beta, double bin_width) {
        const qg::SourceKind kind = qg::parse_source_kind(source);
        qg::SamplingMode mode;
        if (qg::is_scalar_source(kind)) {
          mode = qg::SamplingMode::iid_fresh;
        } else if (qg::is_trajectory_source(kind)) {
          mode = qg::SamplingMode::sequential_trajectory;
        } else {
          throw qg::UsageError("run_monte_carlo: '" + source +
                               "' is a residual (vector) source; use uniform, chi2, levy, cusum");
        }
        const qg::TrialPlan plan{qg::SourceSpec{kind, seed},
                                 make_params(gamma, epsilon, rho),
                                 qg::method_from_name(method),
                                 trials,
                                 validation,
                                 mode,
                                 beta,
                                 seed};
        return report_to_dict(qg::run_monte_carlo(plan, bin_width));
      },
      py::arg("source"), py::arg("method"), py::arg("gamma"), py::arg("epsilon"), py::arg("rho"),
      py::arg("trials"), py::arg("validation"), py::arg("seed"), py::arg("beta") = 0.0,
      py::arg("bin_width") = 0.001,
      "Monte-Carlo validation of a guarantee on a synthetic source; returns the full report.");

  m.def(
      "run_repeated_splits",
      [](const std::vector<double>& dataset, const std::string& gamma, double epsilon, double rho,
         std::uint64_t seed, const std::string& method, std::int64_t trials, double beta,
         double bin_width) {
        return report_to_dict(qg::run_repeated_splits(qg::SampleSet(dataset),
                                                      make_params(gamma, epsilon, rho),
                                                      qg::method_from_name(method), trials, beta,
                                                      seed, bin_width));
      },
      py::arg("dataset"), py::arg("gamma"), py::arg("epsilon"), py::arg("rho"), py::arg("seed"),
      py::arg("method") = "beta", py::arg("trials") = 10000, py::arg("beta") = 0.0,
      py::arg("bin_width") = 0.001,
      "Repeated training/test splits over a stored dataset; returns the full report.");
}
