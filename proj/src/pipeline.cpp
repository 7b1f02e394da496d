#include "fastguard/pipeline.hpp"

#include "fastguard/pcap.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fastguard {

namespace {

IngestSummary ingest_pcap(std::istream& in, std::ostream& events_out, OrderPolicy order) {
    IngestSummary summary;
    PcapReader reader(in, /*strict=*/false);
    InitialConnectionExtractor extractor;
    std::vector<ParsedPacket> buffered;  // only used when sorting

    while (auto raw = reader.next()) {
        ++summary.packets;
        auto decoded = decode_packet(*raw, reader.link_type());
        switch (decoded.status) {
            case DecodeStatus::ok:
                break;
            case DecodeStatus::skipped:
                ++summary.decode_skipped;
                continue;
            case DecodeStatus::malformed:
                ++summary.decode_errors;
                continue;
        }
        if (order == OrderPolicy::sort) {
            buffered.push_back(*decoded.packet);
        } else if (auto ev = extractor.push(*decoded.packet)) {
            events_out << serialize_connection(*ev) << '\n';
            ++summary.events;
        }
    }
    if (order == OrderPolicy::sort) {
        auto events = extract_initial_connections(buffered, OrderPolicy::sort);
        for (const auto& ev : events) events_out << serialize_connection(ev) << '\n';
        summary.events = events.size();
    }
    summary.truncated_tail = reader.truncated_tail();
    summary.tail_note = reader.tail_note();
    return summary;
}

IngestSummary ingest_jsonl(std::istream& in, std::ostream& events_out) {
    IngestSummary summary;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            ConnectionEvent ev = parse_connection_log(line);
            events_out << serialize_connection(ev) << '\n';
            ++summary.events;
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return summary;
}

}  // namespace

IngestSummary ingest_stream(std::istream& in, InputFormat format, std::ostream& events_out,
                            OrderPolicy order) {
    return format == InputFormat::pcap ? ingest_pcap(in, events_out, order)
                                       : ingest_jsonl(in, events_out);
}

std::vector<ConnectionEvent> load_events(std::istream& in, InputFormat format,
                                         IngestSummary* summary) {
    if (format == InputFormat::jsonl) {
        auto events = read_events(in);
        if (summary) {
            *summary = {};
            summary->events = events.size();
        }
        return events;
    }

    IngestSummary local;
    PcapReader reader(in, /*strict=*/false);
    std::vector<ParsedPacket> packets;
    while (auto raw = reader.next()) {
        ++local.packets;
        auto decoded = decode_packet(*raw, reader.link_type());
        if (decoded.status == DecodeStatus::ok)
            packets.push_back(*decoded.packet);
        else if (decoded.status == DecodeStatus::skipped)
            ++local.decode_skipped;
        else
            ++local.decode_errors;
    }
    local.truncated_tail = reader.truncated_tail();
    local.tail_note = reader.tail_note();

    auto events = extract_initial_connections(packets, OrderPolicy::sort);
    local.events = events.size();
    if (summary) *summary = local;
    return events;
}

AnalyzeResult analyze_events(std::span<const ConnectionEvent> events, const RunConfig& config) {
    validate(config);
    AnalyzeResult result;
    result.total_events = events.size();

    PortBuckets buckets = segregate_by_port(events, config.monitored_ports);
    result.excluded = buckets.excluded;
    ZeroFill fill = config.zero_fill_for_stats() ? ZeroFill::on : ZeroFill::off;
    for (const auto& [port, port_events] : buckets.by_port) {
        auto bins = bin_per_second(port_events, fill);
        result.per_port.push_back(summarize_port(bins));
    }
    return result;
}

std::string render_summary_table(const AnalyzeResult& result) {
    std::ostringstream out;
    char row[128];
    out << "port    mean/s    min/s    max/s    seconds\n";
    for (const auto& s : result.per_port) {
        std::snprintf(row, sizeof(row), "%-7u %-9.2f %-8llu %-8llu %zu\n", s.port, s.mean,
                      static_cast<unsigned long long>(s.min),
                      static_cast<unsigned long long>(s.max), s.n_seconds);
        out << row;
    }
    out << "events: " << result.total_events << " (excluded from monitored ports: "
        << result.excluded << ")\n";
    return out.str();
}

std::string render_summary_csv(const AnalyzeResult& result) {
    std::ostringstream out;
    char row[96];
    out << "port,mean,min,max\n";
    for (const auto& s : result.per_port) {
        std::snprintf(row, sizeof(row), "%u,%.2f,%llu,%llu\n", s.port, s.mean,
                      static_cast<unsigned long long>(s.min),
                      static_cast<unsigned long long>(s.max));
        out << row;
    }
    return out.str();
}

DetectResult detect_events(std::span<const ConnectionEvent> events, const RunConfig& config,
                           bool zero_fill) {
    validate(config);
    DetectResult result;
    result.threshold = threshold_in_force(config);

    PortBuckets buckets = segregate_by_port(events, config.monitored_ports);
    result.excluded = buckets.excluded;

    for (const auto& [port, port_events] : buckets.by_port) {
        auto bins = bin_per_second(port_events, zero_fill ? ZeroFill::on : ZeroFill::off);
        // bin_per_second orders by (victim, port, second); cut per victim.
        std::size_t begin = 0;
        for (std::size_t i = 1; i <= bins.size(); ++i) {
            if (i < bins.size() && bins[i].victim_ip == bins[begin].victim_ip) continue;

            std::span<const SecondBin> series(bins.data() + begin, i - begin);
            SeriesReport report;
            report.victim_ip = series.front().victim_ip;
            report.port = port;
            report.bins.assign(series.begin(), series.end());
            report.limits = compute_limits(counts_series(series), config.k);
            report.row_status.assign(series.size(), VerdictStatus::in_control);

            auto alerts = classify_fast_attack(series, result.threshold, report.limits,
                                               config.rule_set, config.side);
            for (const auto& alert : alerts) {
                auto it = std::lower_bound(series.begin(), series.end(), alert.second,
                                           [](const SecondBin& b, std::int64_t sec) {
                                               return b.second < sec;
                                           });
                report.row_status[static_cast<std::size_t>(it - series.begin())] = alert.trigger;
            }
            result.alerts.insert(result.alerts.end(), alerts.begin(), alerts.end());
            result.series.push_back(std::move(report));
            begin = i;
        }
    }

    std::stable_sort(result.alerts.begin(), result.alerts.end(),
                     [](const Alert& a, const Alert& b) {
                         return std::tie(a.victim_ip, a.port, a.second) <
                                std::tie(b.victim_ip, b.port, b.second);
                     });
    return result;
}

std::string format_number(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

std::string alert_to_jsonl(const Alert& alert) {
    std::ostringstream out;
    out << "{\"victim\":\"" << format_ipv4(alert.victim_ip) << "\",\"port\":" << alert.port
        << ",\"second\":" << alert.second << ",\"count\":" << alert.count << ",\"trigger\":\""
        << to_string(alert.trigger) << "\",\"ucl\":" << format_number(alert.limits.ucl)
        << ",\"cl\":" << format_number(alert.limits.cl)
        << ",\"lcl\":" << format_number(alert.limits.lcl) << ",\"threshold\":" << alert.threshold
        << "}";
    return out.str();
}

std::string series_to_csv(const SeriesReport& series) {
    std::ostringstream out;
    out << "second,count,ucl,cl,lcl,verdict\n";
    for (std::size_t i = 0; i < series.bins.size(); ++i) {
        const auto& bin = series.bins[i];
        out << bin.second << ',' << bin.count << ',' << format_number(series.limits.ucl) << ','
            << format_number(series.limits.cl) << ',' << format_number(series.limits.lcl) << ','
            << to_string(series.row_status[i]) << '\n';
    }
    return out.str();
}

}  // namespace fastguard
