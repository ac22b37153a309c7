#include <cctype>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quantguard/errors.hpp"
#include "quantguard/estimator.hpp"
#include "quantguard/format.hpp"
#include "quantguard/guarantees.hpp"
#include "quantguard/harness.hpp"
#include "quantguard/io.hpp"
#include "quantguard/rational.hpp"
#include "quantguard/sources.hpp"

namespace qg = quantguard;

namespace {

constexpr const char* kVersion = "quantguard 1.0.0";

struct OutputOptions {
  std::string path;
  std::string format = "json";
};

void add_output_options(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--output", out.path, "Write a full report to this path");
  cmd->add_option("--format", out.format, "Report format: json (fidelity) or csv (flat view)")
      ->check(CLI::IsMember({"json", "csv"}));
}

void emit_report(const qg::ReportEnvelope& envelope, const OutputOptions& out) {
  if (out.path.empty()) return;
  for (const std::string& path : qg::write_report(envelope, out.path, out.format)) {
    std::cerr << "wrote " << path << "\n";
  }
}

void warn_epsilon(const qg::GuaranteeParams& params) {
  if (params.epsilon_warning) {
    std::cerr << "warning: epsilon=" << qg::format_double(params.epsilon)
              << " exceeds min(gamma, 1-gamma); the requested band sticks out of (0,1)\n";
  }
}

std::string upper_method(qg::Method method) {
  std::string name = qg::method_name(method);
  for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

void print_report_summary(const qg::ValidationReport& report) {
  std::cout << "method=" << report.metadata.method << " N=" << report.metadata.training_size
            << " trials=" << report.metadata.n_trials
            << " validation=" << report.metadata.validation_size << "\n";
  std::cout << "band=[" << qg::format_double(report.band_lower) << ","
            << qg::format_double(report.band_upper)
            << "] fraction_outside=" << qg::format_double(report.fraction_outside) << "\n";
  std::cout << "far_min=" << qg::format_double(report.summary.min)
            << " far_median=" << qg::format_double(report.summary.median)
            << " far_max=" << qg::format_double(report.summary.max) << "\n";
}

std::vector<qg::RationalLevel> parse_gamma_list(const std::string& text) {
  std::vector<qg::RationalLevel> gammas;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string token =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!token.empty()) gammas.push_back(qg::RationalLevel::parse(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (gammas.empty()) throw qg::UsageError("--gammas: no gamma values given");
  return gammas;
}

// ---- subcommand configs ----------------------------------------------------

struct SampleSizeArgs {
  std::string method = "all";
  std::string gamma;
  double epsilon = 0.0;
  double rho = 0.0;
  OutputOptions out;
};

int run_sample_size(const SampleSizeArgs& args) {
  const qg::GuaranteeParams params(qg::RationalLevel::parse(args.gamma), args.epsilon, args.rho);
  warn_epsilon(params);
  std::vector<qg::SampleSizeResult> results;
  if (args.method == "all") {
    results = qg::all_sample_sizes(params);
  } else {
    results.push_back(qg::sample_size(qg::method_from_name(args.method), params));
  }
  qg::ordered_json payload = qg::ordered_json::object();
  for (const auto& result : results) {
    std::cout << "N_" << upper_method(result.method) << "=" << result.n_samples << "\n";
    payload[qg::method_name(result.method)] = qg::to_json(result);
  }
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "sample-size"},
                     {"method", args.method},
                     {"gamma", params.gamma.str()},
                     {"epsilon", args.epsilon},
                     {"rho", args.rho}};
  envelope.payload_kind = "sample-size";
  envelope.payload = std::move(payload);
  envelope.csv_tables = {{"", qg::sample_size_csv(results)}};
  emit_report(envelope, args.out);
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::string input_format = "lines";
  std::string column;
  std::string gamma;
  double beta = 0.0;
  OutputOptions out;
};

int run_estimate(const EstimateArgs& args) {
  const qg::RationalLevel gamma = qg::RationalLevel::parse(args.gamma);
  const qg::SampleSet samples = qg::load_samples(args.input, args.input_format, args.column);
  const qg::ThresholdEstimate estimate = qg::estimate_threshold(samples, gamma, args.beta);
  std::cout << "threshold=" << qg::format_double(estimate.value) << "\n";
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "estimate"}, {"input", args.input},
                     {"input_format", args.input_format}, {"column", args.column},
                     {"gamma", gamma.str()}, {"beta", args.beta}};
  envelope.payload_kind = "threshold-estimate";
  envelope.payload = qg::to_json(estimate);
  envelope.csv_tables = {{"", qg::threshold_estimate_csv(estimate)}};
  emit_report(envelope, args.out);
  return 0;
}

struct SimulateArgs {
  std::string source;
  std::string method;
  std::string gamma;
  double epsilon = 0.0;
  double rho = 0.0;
  std::int64_t trials = 1000;
  std::int64_t validation = 1000000;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double bin_width = 0.001;
  OutputOptions out;
};

int run_simulate(const SimulateArgs& args) {
  const qg::SourceKind kind = qg::parse_source_kind(args.source);
  qg::SamplingMode mode;
  if (qg::is_scalar_source(kind)) {
    mode = qg::SamplingMode::iid_fresh;
  } else if (qg::is_trajectory_source(kind)) {
    mode = qg::SamplingMode::sequential_trajectory;
  } else {
    throw qg::UsageError("simulate: '" + args.source +
                         "' is a residual (vector) source; supported scalar/trajectory sources "
                         "are uniform, chi2, levy, cusum");
  }
  const qg::GuaranteeParams params(qg::RationalLevel::parse(args.gamma), args.epsilon, args.rho);
  warn_epsilon(params);
  const qg::TrialPlan plan{qg::SourceSpec{kind, args.seed},
                           params,
                           qg::method_from_name(args.method),
                           args.trials,
                           args.validation,
                           mode,
                           args.beta,
                           args.seed};
  const qg::ValidationReport report = qg::run_monte_carlo(plan, args.bin_width);
  print_report_summary(report);
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "simulate"},
                     {"source", qg::canonical_source_text(kind)},
                     {"method", args.method},
                     {"gamma", params.gamma.str()},
                     {"epsilon", args.epsilon},
                     {"rho", args.rho},
                     {"trials", args.trials},
                     {"validation", args.validation},
                     {"sampling_mode", qg::sampling_mode_name(mode)},
                     {"beta", args.beta},
                     {"bin_width", args.bin_width},
                     {"seed", args.seed}};
  envelope.payload_kind = "validation-report";
  envelope.payload = qg::to_json(report);
  envelope.csv_tables = {{"", qg::validation_report_csv(report)},
                         {"_histogram", qg::histogram_csv(report.histogram)}};
  emit_report(envelope, args.out);
  return 0;
}

struct SplitEvalArgs {
  std::string input;
  std::string input_format = "lines";
  std::string column;
  std::string gamma;
  double epsilon = 0.0;
  double rho = 0.0;
  std::string method = "beta";
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double bin_width = 0.001;
  OutputOptions out;
};

int run_split_eval(const SplitEvalArgs& args) {
  const qg::GuaranteeParams params(qg::RationalLevel::parse(args.gamma), args.epsilon, args.rho);
  warn_epsilon(params);
  const qg::SampleSet dataset = qg::load_samples(args.input, args.input_format, args.column);
  const qg::ValidationReport report =
      qg::run_repeated_splits(dataset, params, qg::method_from_name(args.method), args.trials,
                              args.beta, args.seed, args.bin_width);
  print_report_summary(report);
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "split-eval"},
                     {"input", args.input},
                     {"input_format", args.input_format},
                     {"column", args.column},
                     {"gamma", params.gamma.str()},
                     {"epsilon", args.epsilon},
                     {"rho", args.rho},
                     {"method", args.method},
                     {"trials", args.trials},
                     {"beta", args.beta},
                     {"bin_width", args.bin_width},
                     {"seed", args.seed}};
  envelope.payload_kind = "validation-report";
  envelope.payload = qg::to_json(report);
  envelope.csv_tables = {{"", qg::validation_report_csv(report)},
                         {"_histogram", qg::histogram_csv(report.histogram)}};
  emit_report(envelope, args.out);
  return 0;
}

struct CoverageArgs {
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::string gamma;
  double epsilon = 0.0;
  OutputOptions out;
};

int run_coverage(const CoverageArgs& args) {
  const qg::RationalLevel gamma = qg::RationalLevel::parse(args.gamma);
  const double value = qg::coverage_probability(args.m, args.n, gamma.value(), args.epsilon);
  std::cout << "coverage=" << qg::format_double(value) << "\n";
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "coverage"},
                     {"m", args.m},
                     {"N", args.n},
                     {"gamma", gamma.str()},
                     {"epsilon", args.epsilon}};
  envelope.payload_kind = "coverage";
  envelope.payload = {{"m", args.m},
                      {"n", args.n},
                      {"gamma", gamma.str()},
                      {"epsilon", args.epsilon},
                      {"coverage", value}};
  envelope.csv_tables = {
      {"", "m,n,gamma,epsilon,coverage\n" + std::to_string(args.m) + "," +
               std::to_string(args.n) + "," + gamma.str() + "," +
               qg::format_double(args.epsilon) + "," + qg::format_double(value) + "\n"}};
  emit_report(envelope, args.out);
  return 0;
}

struct SweepArgs {
  std::string gammas;
  double epsilon = 0.0;
  double rho = 0.0;
  std::string method = "beta";
  std::string input;
  std::string input_format = "lines";
  std::string column;
  std::string source;
  std::int64_t trials = 10000;
  std::int64_t validation = 1000000;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double bin_width = 0.001;
  OutputOptions out;
};

int run_sweep(const SweepArgs& args) {
  if (args.input.empty() == args.source.empty()) {
    throw qg::UsageError("sweep: provide exactly one of --input (dataset) or --source (synthetic)");
  }
  const std::vector<qg::RationalLevel> gammas = parse_gamma_list(args.gammas);
  const qg::Method method = qg::method_from_name(args.method);
  std::vector<qg::SweepEntry> entries;
  if (!args.input.empty()) {
    const qg::SampleSet dataset = qg::load_samples(args.input, args.input_format, args.column);
    entries = qg::sweep_gammas(dataset, gammas, args.epsilon, args.rho, method, args.trials,
                               args.beta, args.seed, args.bin_width);
  } else {
    const qg::SourceKind kind = qg::parse_source_kind(args.source);
    const qg::SamplingMode mode = qg::is_trajectory_source(kind)
                                      ? qg::SamplingMode::sequential_trajectory
                                      : qg::SamplingMode::iid_fresh;
    entries = qg::sweep_gammas(qg::SourceSpec{kind, args.seed}, mode, gammas, args.epsilon,
                               args.rho, method, args.trials, args.validation, args.beta,
                               args.seed, args.bin_width);
  }
  for (const qg::SweepEntry& entry : entries) {
    if (entry.report) {
      std::cout << "gamma=" << entry.gamma.str()
                << " median_far=" << qg::format_double(entry.report->summary.median)
                << " fraction_outside=" << qg::format_double(entry.report->fraction_outside)
                << "\n";
    } else {
      std::cout << "gamma=" << entry.gamma.str() << " error=" << entry.error << "\n";
    }
  }
  qg::ReportEnvelope envelope;
  envelope.inputs = {{"command", "sweep"},
                     {"gammas", args.gammas},
                     {"epsilon", args.epsilon},
                     {"rho", args.rho},
                     {"method", args.method},
                     {"input", args.input},
                     {"source", args.source},
                     {"trials", args.trials},
                     {"validation", args.validation},
                     {"beta", args.beta},
                     {"bin_width", args.bin_width},
                     {"seed", args.seed}};
  envelope.payload_kind = "sweep";
  envelope.payload = qg::to_json(entries);
  envelope.csv_tables = {{"", qg::sweep_csv(entries)}};
  emit_report(envelope, args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-free quantile thresholds for anomaly detectors: minimum sample "
               "sizes, order-statistic estimation, and Monte-Carlo validation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SampleSizeArgs size_args;
  CLI::App* size_cmd = app.add_subcommand(
      "sample-size", "Minimum N for a distribution-free (epsilon, rho) false-alarm guarantee");
  size_cmd->add_option("--method", size_args.method, "dkw, vp, beta, or all")
      ->check(CLI::IsMember({"all", "dkw", "vp", "beta"}));
  size_cmd->add_option("--gamma", size_args.gamma,
                       "Target no-alarm probability as an exact decimal or n1/n2")
      ->required();
  size_cmd->add_option("--epsilon", size_args.epsilon, "Half-width of the false-alarm-rate band")
      ->required();
  size_cmd->add_option("--rho", size_args.rho, "Failure probability of the guarantee")->required();
  add_output_options(size_cmd, size_args.out);

  EstimateArgs est_args;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "Order-statistic threshold estimate from a sample file");
  est_cmd->add_option("--input", est_args.input, "Sample file")->required();
  est_cmd->add_option("--input-format", est_args.input_format, "lines or csv")
      ->check(CLI::IsMember({"lines", "csv"}));
  est_cmd->add_option("--column", est_args.column, "CSV column name or 0-based index");
  est_cmd->add_option("--gamma", est_args.gamma, "Quantile level as exact decimal or n1/n2")
      ->required();
  est_cmd->add_option("--beta", est_args.beta, "Interpolation weight in [0,1)");
  add_output_options(est_cmd, est_args.out);

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Monte-Carlo validation of a guarantee on a synthetic source");
  sim_cmd->add_option("--source", sim_args.source,
                      "uniform | chi2:dof=<n> | levy | cusum:delta=<d>,dim=<n>")
      ->required();
  sim_cmd->add_option("--method", sim_args.method, "dkw, vp, or beta")->required();
  sim_cmd->add_option("--gamma", sim_args.gamma, "Exact decimal or n1/n2")->required();
  sim_cmd->add_option("--epsilon", sim_args.epsilon, "Band half-width")->required();
  sim_cmd->add_option("--rho", sim_args.rho, "Failure probability")->required();
  sim_cmd->add_option("--trials", sim_args.trials, "Number of estimation trials");
  sim_cmd->add_option("--validation", sim_args.validation, "Validation sample count");
  sim_cmd->add_option("--seed", sim_args.seed, "Master seed (required: no silent nondeterminism)")
      ->required();
  sim_cmd->add_option("--beta", sim_args.beta, "Interpolation weight in [0,1)");
  sim_cmd->add_option("--bin-width", sim_args.bin_width, "Histogram bin width");
  add_output_options(sim_cmd, sim_args.out);

  SplitEvalArgs split_args;
  CLI::App* split_cmd = app.add_subcommand(
      "split-eval", "Repeated training/test splits over a stored dataset");
  split_cmd->add_option("--input", split_args.input, "Dataset file")->required();
  split_cmd->add_option("--input-format", split_args.input_format, "lines or csv")
      ->check(CLI::IsMember({"lines", "csv"}));
  split_cmd->add_option("--column", split_args.column, "CSV column name or 0-based index");
  split_cmd->add_option("--gamma", split_args.gamma, "Exact decimal or n1/n2")->required();
  split_cmd->add_option("--epsilon", split_args.epsilon, "Band half-width")->required();
  split_cmd->add_option("--rho", split_args.rho, "Failure probability")->required();
  split_cmd->add_option("--method", split_args.method, "dkw, vp, or beta");
  split_cmd->add_option("--trials", split_args.trials, "Number of random splits");
  split_cmd
      ->add_option("--seed", split_args.seed, "Master seed (required: no silent nondeterminism)")
      ->required();
  split_cmd->add_option("--beta", split_args.beta, "Interpolation weight in [0,1)");
  split_cmd->add_option("--bin-width", split_args.bin_width, "Histogram bin width");
  add_output_options(split_cmd, split_args.out);

  CoverageArgs cov_args;
  CLI::App* cov_cmd = app.add_subcommand(
      "coverage", "Exact P(|F(y_(m)) - gamma| <= epsilon) for N i.i.d. continuous samples");
  cov_cmd->add_option("--m", cov_args.m, "Order-statistic index (1-based)")->required();
  cov_cmd->add_option("--N,--n", cov_args.n, "Sample count")->required();
  cov_cmd->add_option("--gamma", cov_args.gamma, "Exact decimal or n1/n2")->required();
  cov_cmd->add_option("--epsilon", cov_args.epsilon, "Band half-width")->required();
  add_output_options(cov_cmd, cov_args.out);

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Per-gamma validation reports over a gamma list (dataset or source)");
  sweep_cmd->add_option("--gammas", sweep_args.gammas, "Comma-separated gamma list")->required();
  sweep_cmd->add_option("--epsilon", sweep_args.epsilon, "Band half-width")->required();
  sweep_cmd->add_option("--rho", sweep_args.rho, "Failure probability")->required();
  sweep_cmd->add_option("--method", sweep_args.method, "dkw, vp, or beta");
  CLI::Option* sweep_input = sweep_cmd->add_option("--input", sweep_args.input, "Dataset file");
  sweep_cmd->add_option("--input-format", sweep_args.input_format, "lines or csv")
      ->check(CLI::IsMember({"lines", "csv"}));
  sweep_cmd->add_option("--column", sweep_args.column, "CSV column name or 0-based index");
  CLI::Option* sweep_source =
      sweep_cmd->add_option("--source", sweep_args.source, "Synthetic source spec");
  sweep_input->excludes(sweep_source);
  sweep_cmd->add_option("--trials", sweep_args.trials, "Trials per gamma");
  sweep_cmd->add_option("--validation", sweep_args.validation,
                        "Validation sample count (source mode)");
  sweep_cmd
      ->add_option("--seed", sweep_args.seed, "Master seed (required: no silent nondeterminism)")
      ->required();
  sweep_cmd->add_option("--beta", sweep_args.beta, "Interpolation weight in [0,1)");
  sweep_cmd->add_option("--bin-width", sweep_args.bin_width, "Histogram bin width");
  add_output_options(sweep_cmd, sweep_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qg::UsageError::exit_code;
  }

  try {
    if (size_cmd->parsed()) return run_sample_size(size_args);
    if (est_cmd->parsed()) return run_estimate(est_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (split_cmd->parsed()) return run_split_eval(split_args);
    if (cov_cmd->parsed()) return run_coverage(cov_args);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    std::cerr << "error: no subcommand selected\n";
    return qg::UsageError::exit_code;
  } catch (const qg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return qg::UsageError::exit_code;
  } catch (const qg::MathPreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return qg::MathPreconditionError::exit_code;
  } catch (const qg::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return qg::DataError::exit_code;
  } catch (const qg::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return qg::IoError::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
