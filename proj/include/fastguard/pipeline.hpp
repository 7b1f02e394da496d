#pragma once

#include "fastguard/config.hpp"
#include "fastguard/features.hpp"
#include "fastguard/spc.hpp"
#include "fastguard/stats.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fastguard {

struct IngestSummary {
    std::size_t packets = 0;
    std::size_t events = 0;
    std::size_t decode_skipped = 0;
    std::size_t decode_errors = 0;
    bool truncated_tail = false;
    std::string tail_note;
};

/// Normalize a capture or connection log into JSONL events, streaming
/// record by record. Capture-record truncation is counted, not fatal;
/// header or log syntax errors throw.
IngestSummary ingest_stream(std::istream& in, InputFormat format, std::ostream& events_out,
                            OrderPolicy order = OrderPolicy::reject);

/// Load events into memory for analysis commands. Capture input is
/// decoded, timestamp-sorted and run through initial-connection
/// extraction.
std::vector<ConnectionEvent> load_events(std::istream& in, InputFormat format,
                                         IngestSummary* summary = nullptr);

struct AnalyzeResult {
    std::vector<PortSummary> per_port;  // ordered by port; ports with traffic only
    std::size_t total_events = 0;
    std::size_t excluded = 0;
};

AnalyzeResult analyze_events(std::span<const ConnectionEvent> events, const RunConfig& config);

std::string render_summary_table(const AnalyzeResult& result);
std::string render_summary_csv(const AnalyzeResult& result);

/// One charted (victim, port) series: bins, limits, and the combined
/// per-bin verdict (threshold and chart rules, same precedence as the
/// alert stream).
struct SeriesReport {
    std::uint32_t victim_ip = 0;
    std::uint16_t port = 0;
    std::vector<SecondBin> bins;
    ControlLimits limits;
    std::vector<VerdictStatus> row_status;
};

struct DetectResult {
    ThresholdConfig threshold;
    std::vector<Alert> alerts;  // ordered by (victim, port, second)
    std::vector<SeriesReport> series;
    std::size_t excluded = 0;
};

/// Bin, chart and classify every monitored (victim, port) series. Limits
/// are retrospective: computed from the series being judged.
DetectResult detect_events(std::span<const ConnectionEvent> events, const RunConfig& config,
                           bool zero_fill);

/// Shortest round-trip decimal form, for stable report files.
std::string format_number(double value);

std::string alert_to_jsonl(const Alert& alert);
std::string series_to_csv(const SeriesReport& series);

}  // namespace fastguard
