#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "quantguard/estimator.hpp"
#include "quantguard/guarantees.hpp"
#include "quantguard/harness.hpp"
#include "quantguard/sources.hpp"

namespace quantguard {

using ordered_json = nlohmann::ordered_json;

/// Reads newline-delimited reals ("lines") or one column of a comma-separated
/// table ("csv", column by header name or 0-based index). Rejects NaN/inf and
/// malformed entries with the offending line number; rejects empty input.
SampleSet load_samples(const std::string& path, const std::string& format = "lines",
                       const std::string& csv_column = "");

/// Parses the source grammar: uniform | chi2:dof=<int> | levy |
/// cusum:delta=<real>,dim=<int> | gauss:dim=<int>[,mean=v;...][,cov=v;...].
/// Round-trips through canonical_source_text.
SourceKind parse_source_kind(std::string_view text);

ordered_json to_json(const SampleSizeResult& result);
ordered_json to_json(const ThresholdEstimate& estimate);
ordered_json to_json(const ValidationReport& report);
ordered_json to_json(const std::vector<SweepEntry>& entries);

/// Report envelope: schema/tool version + timestamp + canonical input echo +
/// payload. JSON is the fidelity format; the csv_tables views are lossy
/// flat tables (suffix -> content; "" is the main table).
struct ReportEnvelope {
  ordered_json inputs;
  std::string payload_kind;
  ordered_json payload;
  std::vector<std::pair<std::string, std::string>> csv_tables;
};

/// Serializes the full envelope; identical inputs yield byte-identical text
/// apart from the timestamp field.
std::string envelope_to_json_text(const ReportEnvelope& envelope);

/// Lossy CSV views of the payloads.
std::string validation_report_csv(const ValidationReport& report);
std::string histogram_csv(const Histogram& histogram);
std::string sample_size_csv(const std::vector<SampleSizeResult>& results);
std::string threshold_estimate_csv(const ThresholdEstimate& estimate);
std::string sweep_csv(const std::vector<SweepEntry>& entries);

/// Relative paths are resolved against $QUANTGUARD_OUTPUT_DIR when it is set.
std::string resolve_output_path(const std::string& path);

/// Writes the envelope to `path` in "json" or "csv" form; CSV emits one file
/// per table (suffix inserted before the extension). Returns written paths.
std::vector<std::string> write_report(const ReportEnvelope& envelope, const std::string& path,
                                      const std::string& format);

}  // namespace quantguard
