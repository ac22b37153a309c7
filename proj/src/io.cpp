#include "quantguard/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "quantguard/errors.hpp"
#include "quantguard/format.hpp"

namespace quantguard {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_full_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

bool parse_full_int64(std::string_view token, std::int64_t& out) {
  token = trim(token);
  if (token.empty()) return false;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = s.find(sep);
    if (pos == std::string_view::npos) {
      parts.push_back(s);
      return parts;
    }
    parts.push_back(s.substr(0, pos));
    s.remove_prefix(pos + 1);
  }
}

double parse_sample(std::string_view token, const std::string& path, std::size_t line_no) {
  double value = 0.0;
  if (!parse_full_double(token, value)) {
    throw DataError(path + ": parse error at line " + std::to_string(line_no) + ": '" +
                    std::string(token) + "' is not a real number");
  }
  if (!std::isfinite(value)) {
    throw DataError(path + ": non-finite sample at line " + std::to_string(line_no));
  }
  return value;
}

}  // namespace

SampleSet load_samples(const std::string& path, const std::string& format,
                       const std::string& csv_column) {
  if (format != "lines" && format != "csv") {
    throw UsageError("load_samples: unknown input format '" + format + "' (expected lines or csv)");
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;

  if (format == "lines") {
    while (std::getline(in, line)) {
      ++line_no;
      values.push_back(parse_sample(line, path, line_no));
    }
    if (values.empty()) throw DataError(path + ": no samples (empty file)");
    return SampleSet(std::move(values));
  }

  // csv: header row first, then one value per row from the designated column
  if (!std::getline(in, line)) throw DataError(path + ": no samples (empty file)");
  ++line_no;
  const auto header = split(trim(line), ',');
  std::size_t column = header.size();
  std::int64_t index = 0;
  if (parse_full_int64(csv_column, index)) {
    if (index < 0 || static_cast<std::size_t>(index) >= header.size()) {
      throw UsageError("load_samples: column index " + csv_column + " outside the " +
                       std::to_string(header.size()) + "-column header");
    }
    column = static_cast<std::size_t>(index);
  } else {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == csv_column) {
        column = i;
        break;
      }
    }
    if (column == header.size()) {
      throw UsageError("load_samples: column '" + csv_column + "' not found in header");
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split(line, ',');
    if (column >= fields.size()) {
      throw DataError(path + ": parse error at line " + std::to_string(line_no) +
                      ": missing column " + std::to_string(column));
    }
    values.push_back(parse_sample(fields[column], path, line_no));
  }
  if (values.empty()) throw DataError(path + ": no samples (header only)");
  return SampleSet(std::move(values));
}

namespace {

struct KeyValues {
  std::vector<std::pair<std::string_view, std::string_view>> pairs;

  std::string_view get(std::string_view key, std::string_view spec) const {
    for (const auto& [k, v] : pairs) {
      if (k == key) return v;
    }
    throw UsageError("source spec '" + std::string(spec) + "' is missing '" + std::string(key) +
                     "='");
  }
  const std::string_view* find(std::string_view key) const {
    for (const auto& [k, v] : pairs) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

KeyValues parse_pairs(std::string_view body, std::string_view spec,
                      std::initializer_list<std::string_view> allowed) {
  KeyValues kv;
  for (std::string_view part : split(body, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("source spec '" + std::string(spec) + "': expected key=value, got '" +
                       std::string(part) + "'");
    }
    const auto key = trim(part.substr(0, eq));
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw UsageError("source spec '" + std::string(spec) + "': unknown key '" +
                       std::string(key) + "'");
    }
    kv.pairs.emplace_back(key, trim(part.substr(eq + 1)));
  }
  return kv;
}

std::int64_t require_int(std::string_view token, std::string_view what, std::string_view spec) {
  std::int64_t v = 0;
  if (!parse_full_int64(token, v)) {
    throw UsageError("source spec '" + std::string(spec) + "': bad " + std::string(what) + " '" +
                     std::string(token) + "'");
  }
  return v;
}

double require_double(std::string_view token, std::string_view what, std::string_view spec) {
  double v = 0.0;
  if (!parse_full_double(token, v) || !std::isfinite(v)) {
    throw UsageError("source spec '" + std::string(spec) + "': bad " + std::string(what) + " '" +
                     std::string(token) + "'");
  }
  return v;
}

std::vector<double> parse_vector(std::string_view token, std::string_view what,
                                 std::string_view spec) {
  std::vector<double> out;
  for (std::string_view part : split(token, ';')) {
    out.push_back(require_double(part, what, spec));
  }
  return out;
}

}  // namespace

SourceKind parse_source_kind(std::string_view text) {
  const std::string_view spec = trim(text);
  if (spec == "uniform") return UniformSpec{};
  if (spec == "levy") return LevySpec{};
  const auto colon = spec.find(':');
  const bool has_body = colon != std::string_view::npos;
  const std::string_view head = has_body ? spec.substr(0, colon) : spec;
  const std::string_view body = has_body ? spec.substr(colon + 1) : std::string_view{};
  // a bare head keeps the spec struct's defaults; listed keys override them
  if (head == "chi2") {
    const KeyValues kv = has_body ? parse_pairs(body, spec, {"dof"}) : KeyValues{};
    ChiSquareSpec chi2;
    if (const auto* dof = kv.find("dof")) chi2.dof = require_int(*dof, "dof", spec);
    if (chi2.dof < 1) {
      throw UsageError("source spec '" + std::string(spec) + "': dof must be >= 1");
    }
    return chi2;
  }
  if (head == "cusum") {
    const KeyValues kv = has_body ? parse_pairs(body, spec, {"delta", "dim"}) : KeyValues{};
    CusumIidSpec cusum;
    if (const auto* delta = kv.find("delta")) cusum.delta = require_double(*delta, "delta", spec);
    if (const auto* dim = kv.find("dim")) cusum.dim = require_int(*dim, "dim", spec);
    if (!(cusum.delta > 0.0)) {
      throw UsageError("source spec '" + std::string(spec) + "': delta must be > 0");
    }
    if (cusum.dim < 1) {
      throw UsageError("source spec '" + std::string(spec) + "': dim must be >= 1");
    }
    return cusum;
  }
  if (head == "gauss") {
    const KeyValues kv = has_body ? parse_pairs(body, spec, {"dim", "mean", "cov"}) : KeyValues{};
    const std::int64_t dim = require_int(kv.get("dim", spec), "dim", spec);
    if (dim < 1) throw UsageError("source spec '" + std::string(spec) + "': dim must be >= 1");
    GaussResidualSpec gauss;
    gauss.mean = Eigen::VectorXd::Zero(dim);
    gauss.cov = Eigen::MatrixXd::Identity(dim, dim);
    if (const auto* mean = kv.find("mean")) {
      const auto vals = parse_vector(*mean, "mean entry", spec);
      if (static_cast<std::int64_t>(vals.size()) != dim) {
        throw UsageError("source spec '" + std::string(spec) + "': mean needs " +
                         std::to_string(dim) + " entries");
      }
      for (std::int64_t i = 0; i < dim; ++i) gauss.mean(i) = vals[static_cast<std::size_t>(i)];
    }
    if (const auto* cov = kv.find("cov")) {
      const auto vals = parse_vector(*cov, "cov entry", spec);
      if (static_cast<std::int64_t>(vals.size()) != dim * dim) {
        throw UsageError("source spec '" + std::string(spec) + "': cov needs " +
                         std::to_string(dim * dim) + " row-major entries");
      }
      for (std::int64_t r = 0; r < dim; ++r) {
        for (std::int64_t c = 0; c < dim; ++c) {
          gauss.cov(r, c) = vals[static_cast<std::size_t>(r * dim + c)];
        }
      }
    }
    return gauss;
  }
  throw UsageError("unknown source spec '" + std::string(spec) +
                   "' (expected uniform, chi2:dof=..., levy, cusum:delta=...,dim=..., or "
                   "gauss:dim=...)");
}

ordered_json to_json(const SampleSizeResult& result) {
  ordered_json conditions = ordered_json::array();
  for (const auto& [name, satisfied] : result.conditions_checked) {
    conditions.push_back({{"name", name}, {"satisfied", satisfied}});
  }
  return ordered_json{
      {"method", method_name(result.method)},
      {"n_samples", result.n_samples},
      {"k", result.k},
      {"estimator_rule",
       {{"lower_index", result.estimator_rule.lower_index},
        {"upper_index", result.estimator_rule.upper_index},
        {"beta_weight_constraint", result.estimator_rule.beta_weight_constraint}}},
      {"conditions_checked", std::move(conditions)},
  };
}

ordered_json to_json(const ThresholdEstimate& estimate) {
  return ordered_json{
      {"value", estimate.value},
      {"lower_index", estimate.lower_index},
      {"upper_index", estimate.upper_index},
      {"beta_weight", estimate.beta_weight},
      {"n_samples", estimate.n_samples},
      {"gamma", estimate.gamma.str()},
  };
}

ordered_json to_json(const ValidationReport& report) {
  const RunMetadata& meta = report.metadata;
  return ordered_json{
      {"metadata",
       {{"source", meta.source_text},
        {"gamma", meta.gamma},
        {"epsilon", meta.epsilon},
        {"rho", meta.rho},
        {"method", meta.method},
        {"sampling_mode", meta.sampling_mode},
        {"n_trials", meta.n_trials},
        {"training_size", meta.training_size},
        {"validation_size", meta.validation_size},
        {"beta_weight", meta.beta_weight},
        {"master_seed", meta.master_seed}}},
      {"band", {{"lower", report.band_lower}, {"upper", report.band_upper}}},
      {"fraction_outside", report.fraction_outside},
      {"summary",
       {{"min", report.summary.min},
        {"q1", report.summary.q1},
        {"median", report.summary.median},
        {"q3", report.summary.q3},
        {"max", report.summary.max}}},
      {"histogram", {{"bin_width", report.histogram.bin_width}, {"counts", report.histogram.counts}}},
      {"empirical_fars", report.empirical_fars},
      {"thresholds", report.thresholds},
  };
}

ordered_json to_json(const std::vector<SweepEntry>& entries) {
  ordered_json out = ordered_json::array();
  for (const SweepEntry& entry : entries) {
    ordered_json item{{"gamma", entry.gamma.str()}};
    if (entry.report) {
      item["report"] = to_json(*entry.report);
    } else {
      item["error"] = entry.error;
    }
    out.push_back(std::move(item));
  }
  return out;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

std::string envelope_to_json_text(const ReportEnvelope& envelope) {
  ordered_json doc{
      {"schema_version", "1"},
      {"tool_version", "quantguard 1.0.0"},
      {"timestamp", utc_timestamp()},
      {"inputs", envelope.inputs},
      {"payload_kind", envelope.payload_kind},
      {"payload", envelope.payload},
  };
  return doc.dump(2) + "\n";
}

std::string validation_report_csv(const ValidationReport& report) {
  std::string out = "trial,threshold,empirical_far\n";
  for (std::size_t i = 0; i < report.empirical_fars.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(report.thresholds[i]) + "," +
           format_double(report.empirical_fars[i]) + "\n";
  }
  return out;
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin_lower,bin_upper,count\n";
  for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
    out += format_double(static_cast<double>(i) * histogram.bin_width) + "," +
           format_double(static_cast<double>(i + 1) * histogram.bin_width) + "," +
           std::to_string(histogram.counts[i]) + "\n";
  }
  return out;
}

std::string sample_size_csv(const std::vector<SampleSizeResult>& results) {
  std::string out = "method,n_samples,k,lower_index,upper_index\n";
  for (const auto& r : results) {
    out += std::string(method_name(r.method)) + "," + std::to_string(r.n_samples) + "," +
           std::to_string(r.k) + "," + std::to_string(r.estimator_rule.lower_index) + "," +
           std::to_string(r.estimator_rule.upper_index) + "\n";
  }
  return out;
}

std::string threshold_estimate_csv(const ThresholdEstimate& estimate) {
  std::string out = "value,lower_index,upper_index,beta_weight,n_samples,gamma\n";
  out += format_double(estimate.value) + "," + std::to_string(estimate.lower_index) + "," +
         std::to_string(estimate.upper_index) + "," + format_double(estimate.beta_weight) + "," +
         std::to_string(estimate.n_samples) + "," + estimate.gamma.str() + "\n";
  return out;
}

std::string sweep_csv(const std::vector<SweepEntry>& entries) {
  std::string out = "gamma,target_far,median_far,fraction_outside,band_lower,band_upper,error\n";
  for (const SweepEntry& entry : entries) {
    out += entry.gamma.str() + "," + format_double(entry.gamma.complement()) + ",";
    if (entry.report) {
      out += format_double(entry.report->summary.median) + "," +
             format_double(entry.report->fraction_outside) + "," +
             format_double(entry.report->band_lower) + "," +
             format_double(entry.report->band_upper) + ",";
    } else {
      out += ",,,," + entry.error;
    }
    out += "\n";
  }
  return out;
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("QUANTGUARD_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return path;
  std::string out = dir;
  if (out.back() != '/') out += '/';
  return out + path;
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

std::vector<std::string> write_report(const ReportEnvelope& envelope, const std::string& path,
                                      const std::string& format) {
  const std::string resolved = resolve_output_path(path);
  std::vector<std::string> written;
  if (format == "json") {
    write_text_file(resolved, envelope_to_json_text(envelope));
    written.push_back(resolved);
    return written;
  }
  if (format == "csv") {
    for (const auto& [suffix, content] : envelope.csv_tables) {
      const std::string target = with_suffix(resolved, suffix);
      write_text_file(target, content);
      written.push_back(target);
    }
    return written;
  }
  throw UsageError("unknown report format '" + format + "' (expected json or csv)");
}

}  // namespace quantguard
