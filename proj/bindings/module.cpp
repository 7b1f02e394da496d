#include "fastguard/config.hpp"
#include "fastguard/events.hpp"
#include "fastguard/features.hpp"
#include "fastguard/pcap.hpp"
#include "fastguard/pipeline.hpp"
#include "fastguard/spc.hpp"
#include "fastguard/stats.hpp"
#include "fastguard/synth.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace fastguard;

namespace {

std::vector<SourceMean> to_source_means(const std::vector<std::pair<std::string, double>>& means) {
    std::vector<SourceMean> sources;
    sources.reserve(means.size());
    for (const auto& [label, mean] : means) sources.push_back({label, mean});
    return sources;
}

}  // namespace

PYBIND11_MODULE(_fastguard, m) {
    m.doc() = "Fast-attack detection: initial-connection features, per-second "
              "statistics, static threshold, Shewhart control charts";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PcapError>(m, "PcapError", PyExc_ValueError);

    py::enum_<Protocol>(m, "Protocol")
        .value("tcp", Protocol::tcp)
        .value("udp", Protocol::udp);

    py::class_<ConnectionEvent>(m, "ConnectionEvent")
        .def(py::init<>())
        .def(py::init([](Micros ts_us, const std::string& src, const std::string& dst,
                         Protocol proto, std::uint16_t sport, std::uint16_t dport,
                         std::uint8_t flags) {
                 auto s = parse_ipv4(src), d = parse_ipv4(dst);
                 if (!s || !d) throw py::value_error("invalid IPv4 address");
                 return ConnectionEvent{ts_us, *s, *d, proto, sport, dport, flags};
             }),
             py::arg("ts_us"), py::arg("src"), py::arg("dst"), py::arg("proto"),
             py::arg("sport"), py::arg("dport"), py::arg("flags") = 0)
        .def_readwrite("ts_us", &ConnectionEvent::ts_us)
        .def_readwrite("src_ip", &ConnectionEvent::src_ip)
        .def_readwrite("dst_ip", &ConnectionEvent::dst_ip)
        .def_readwrite("proto", &ConnectionEvent::proto)
        .def_readwrite("src_port", &ConnectionEvent::src_port)
        .def_readwrite("dst_port", &ConnectionEvent::dst_port)
        .def_readwrite("flags", &ConnectionEvent::flags)
        .def("__eq__", [](const ConnectionEvent& a, const ConnectionEvent& b) { return a == b; })
        .def("__repr__", [](const ConnectionEvent& ev) { return serialize_connection(ev); });

    m.def("parse_ipv4", [](const std::string& s) {
        auto addr = parse_ipv4(s);
        if (!addr) throw py::value_error("invalid IPv4 address");
        return *addr;
    });
    m.def("format_ipv4", &format_ipv4);
    m.def("parse_connection_log",
          [](const std::string& line) { return parse_connection_log(line); },
          "Parse one JSONL connection-log line.");
    m.def("serialize_connection", &serialize_connection);

    py::class_<RawPacket>(m, "RawPacket")
        .def(py::init<>())
        .def_readwrite("ts_us", &RawPacket::ts_us)
        .def_property(
            "captured",
            [](const RawPacket& p) {
                return py::bytes(reinterpret_cast<const char*>(p.captured.data()),
                                 p.captured.size());
            },
            [](RawPacket& p, const py::bytes& data) {
                std::string_view view = data;
                p.captured.assign(view.begin(), view.end());
            })
        .def_readwrite("original_length", &RawPacket::original_length);

    py::enum_<LinkType>(m, "LinkType").value("ethernet", LinkType::ethernet);
    py::enum_<IpProtocol>(m, "IpProtocol")
        .value("tcp", IpProtocol::tcp)
        .value("udp", IpProtocol::udp)
        .value("other", IpProtocol::other);

    py::class_<ParsedPacket>(m, "ParsedPacket")
        .def(py::init<>())
        .def_readwrite("ts_us", &ParsedPacket::ts_us)
        .def_readwrite("src_ip", &ParsedPacket::src_ip)
        .def_readwrite("dst_ip", &ParsedPacket::dst_ip)
        .def_readwrite("proto", &ParsedPacket::proto)
        .def_readwrite("src_port", &ParsedPacket::src_port)
        .def_readwrite("dst_port", &ParsedPacket::dst_port)
        .def_readwrite("tcp_flags", &ParsedPacket::tcp_flags);

    py::enum_<DecodeStatus>(m, "DecodeStatus")
        .value("ok", DecodeStatus::ok)
        .value("skipped", DecodeStatus::skipped)
        .value("malformed", DecodeStatus::malformed);

    py::class_<DecodeResult>(m, "DecodeResult")
        .def_readonly("status", &DecodeResult::status)
        .def_readonly("packet", &DecodeResult::packet);

    m.def("parse_capture_file", [](const py::bytes& data) {
        std::string_view view = data;
        return parse_capture_file(
            {reinterpret_cast<const std::uint8_t*>(view.data()), view.size()});
    });
    m.def("decode_packet", &decode_packet, py::arg("raw"),
          py::arg("link") = LinkType::ethernet);

    py::enum_<OrderPolicy>(m, "OrderPolicy")
        .value("reject", OrderPolicy::reject)
        .value("sort", OrderPolicy::sort);

    m.def("extract_initial_connections",
          [](const std::vector<ParsedPacket>& packets, OrderPolicy order) {
              return extract_initial_connections(packets, order);
          },
          py::arg("packets"), py::arg("order") = OrderPolicy::reject);

    py::class_<PortBuckets>(m, "PortBuckets")
        .def_readonly("by_port", &PortBuckets::by_port)
        .def_readonly("excluded", &PortBuckets::excluded);

    m.def("segregate_by_port",
          [](const std::vector<ConnectionEvent>& events, const std::set<std::uint16_t>& ports) {
              return segregate_by_port(events, ports);
          });

    py::enum_<CountScope>(m, "CountScope")
        .value("per_host", CountScope::per_host)
        .value("per_host_port", CountScope::per_host_port);

    py::class_<FeatureRecord>(m, "FeatureRecord")
        .def_readonly("event", &FeatureRecord::event)
        .def_readonly("dest_count", &FeatureRecord::dest_count)
        .def_readonly("duration_s", &FeatureRecord::duration_s);

    m.def("derive_dest_count",
          [](const std::vector<ConnectionEvent>& events, CountScope scope) {
              return derive_dest_count(events, scope);
          },
          py::arg("events"), py::arg("scope") = CountScope::per_host);

    py::class_<SecondBin>(m, "SecondBin")
        .def(py::init<>())
        .def_readwrite("second", &SecondBin::second)
        .def_readwrite("victim_ip", &SecondBin::victim_ip)
        .def_readwrite("port", &SecondBin::port)
        .def_readwrite("count", &SecondBin::count);

    m.def("bin_per_second",
          [](const std::vector<ConnectionEvent>& events, bool zero_fill) {
              return bin_per_second(events, zero_fill ? ZeroFill::on : ZeroFill::off);
          },
          py::arg("events"), py::arg("zero_fill") = false);

    py::class_<PortSummary>(m, "PortSummary")
        .def_readonly("port", &PortSummary::port)
        .def_readonly("mean", &PortSummary::mean)
        .def_readonly("min", &PortSummary::min)
        .def_readonly("max", &PortSummary::max)
        .def_readonly("n_seconds", &PortSummary::n_seconds);

    m.def("summarize_port",
          [](const std::vector<SecondBin>& bins) { return summarize_port(bins); });

    py::class_<ThresholdConfig>(m, "ThresholdConfig")
        .def_readonly("value", &ThresholdConfig::value)
        .def_property_readonly("provenance", [](const ThresholdConfig& t) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& s : t.provenance) out.emplace_back(s.label, s.mean);
            return out;
        });

    m.def("select_threshold",
          [](const std::vector<std::pair<std::string, double>>& means,
             std::uint32_t experiment_max) {
              return select_threshold(to_source_means(means), experiment_max);
          },
          py::arg("normal_means"), py::arg("experiment_max"),
          "Static threshold from (label, mean) pairs and the experimental "
          "per-host maximum.");

    py::class_<ControlLimits>(m, "ControlLimits")
        .def_readonly("mu", &ControlLimits::mu)
        .def_readonly("sigma", &ControlLimits::sigma)
        .def_readonly("k", &ControlLimits::k)
        .def_readonly("ucl", &ControlLimits::ucl)
        .def_readonly("cl", &ControlLimits::cl)
        .def_readonly("lcl", &ControlLimits::lcl);

    m.def("compute_limits",
          [](const std::vector<double>& series, double k) { return compute_limits(series, k); },
          py::arg("series"), py::arg("k") = 3.0);

    py::enum_<RuleSide>(m, "RuleSide")
        .value("upper_only", RuleSide::upper_only)
        .value("two_sided", RuleSide::two_sided);

    py::enum_<VerdictStatus>(m, "VerdictStatus")
        .value("in_control", VerdictStatus::in_control)
        .value("rule1", VerdictStatus::rule1)
        .value("rule2", VerdictStatus::rule2)
        .value("rule3", VerdictStatus::rule3)
        .value("over_threshold", VerdictStatus::over_threshold);

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("index", &Verdict::index)
        .def_readonly("status", &Verdict::status)
        .def_readonly("observed", &Verdict::observed)
        .def_readonly("sigma_distance", &Verdict::sigma_distance)
        .def_readonly("rules_fired", &Verdict::rules_fired);

    m.def("western_electric",
          [](const std::vector<double>& series, const ControlLimits& limits, RuleSide side) {
              return western_electric(series, limits, side);
          },
          py::arg("series"), py::arg("limits"), py::arg("side") = RuleSide::upper_only);

    py::enum_<RuleSet>(m, "RuleSet")
        .value("threshold_only", RuleSet::threshold_only)
        .value("spc_only", RuleSet::spc_only)
        .value("both", RuleSet::both);

    py::class_<Alert>(m, "Alert")
        .def_readonly("victim_ip", &Alert::victim_ip)
        .def_readonly("port", &Alert::port)
        .def_readonly("second", &Alert::second)
        .def_readonly("count", &Alert::count)
        .def_readonly("trigger", &Alert::trigger)
        .def_readonly("limits", &Alert::limits)
        .def_readonly("threshold", &Alert::threshold)
        .def("__repr__", [](const Alert& a) { return alert_to_jsonl(a); });

    m.def("classify_fast_attack",
          [](const std::vector<SecondBin>& bins, const ThresholdConfig& threshold,
             const ControlLimits& limits, RuleSet rule_set, RuleSide side) {
              return classify_fast_attack(bins, threshold, limits, rule_set, side);
          },
          py::arg("bins"), py::arg("threshold"), py::arg("limits"),
          py::arg("rule_set") = RuleSet::both, py::arg("side") = RuleSide::upper_only);

    py::class_<HostProfile>(m, "HostProfile")
        .def(py::init([](const std::string& name, std::uint32_t rate, std::uint64_t seed) {
                 return HostProfile{name, rate, seed};
             }),
             py::arg("name"), py::arg("rate"), py::arg("seed") = 0)
        .def_readwrite("name", &HostProfile::name)
        .def_readwrite("rate", &HostProfile::rate)
        .def_readwrite("jitter_seed", &HostProfile::jitter_seed);

    m.def("default_lab_profiles", &default_lab_profiles);
    m.def("profile_source_ip", &profile_source_ip);

    m.def("synth_host",
          [](const HostProfile& profile, const std::string& victim, std::uint16_t port,
             std::uint32_t duration_s) {
              auto v = parse_ipv4(victim);
              if (!v) throw py::value_error("invalid victim address");
              return synth_host(profile, *v, port, duration_s);
          },
          py::arg("profile"), py::arg("victim"), py::arg("port"), py::arg("duration_s"));

    m.def("inject_attack",
          [](std::vector<ConnectionEvent> background, std::uint32_t rate,
             const std::string& victim, std::uint16_t port, std::int64_t start_s,
             std::uint32_t span_s) {
              auto v = parse_ipv4(victim);
              if (!v) throw py::value_error("invalid victim address");
              return inject_attack(std::move(background), rate, *v, port, start_s, span_s);
          },
          py::arg("background"), py::arg("rate"), py::arg("victim"), py::arg("port"),
          py::arg("start_s"), py::arg("span_s"));

    m.def("parse_scenario", [](const std::string& text) {
        std::istringstream in(text);
        return parse_scenario(in);
    });

    py::class_<ScenarioHost>(m, "ScenarioHost")
        .def_readwrite("profile", &ScenarioHost::profile)
        .def_readwrite("port", &ScenarioHost::port);
    py::class_<ScenarioAttack>(m, "ScenarioAttack")
        .def_readwrite("rate", &ScenarioAttack::rate)
        .def_readwrite("port", &ScenarioAttack::port)
        .def_readwrite("start_s", &ScenarioAttack::start_s)
        .def_readwrite("span_s", &ScenarioAttack::span_s);
    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("duration_s", &Scenario::duration_s)
        .def_readwrite("victim_ip", &Scenario::victim_ip)
        .def_readwrite("hosts", &Scenario::hosts)
        .def_readwrite("attacks", &Scenario::attacks);

    m.def("run_scenario", &run_scenario);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("monitored_ports", &RunConfig::monitored_ports)
        .def_readwrite("k", &RunConfig::k)
        .def_readwrite("threshold_override", &RunConfig::threshold_override)
        .def_readwrite("rule_set", &RunConfig::rule_set)
        .def_readwrite("side", &RunConfig::side)
        .def_readwrite("zero_fill", &RunConfig::zero_fill)
        .def_readwrite("format", &RunConfig::format);

    py::enum_<InputFormat>(m, "InputFormat")
        .value("pcap", InputFormat::pcap)
        .value("jsonl", InputFormat::jsonl);

    m.def("threshold_in_force", &threshold_in_force);

    py::class_<SeriesReport>(m, "SeriesReport")
        .def_readonly("victim_ip", &SeriesReport::victim_ip)
        .def_readonly("port", &SeriesReport::port)
        .def_readonly("bins", &SeriesReport::bins)
        .def_readonly("limits", &SeriesReport::limits)
        .def_readonly("row_status", &SeriesReport::row_status);

    py::class_<DetectResult>(m, "DetectResult")
        .def_readonly("threshold", &DetectResult::threshold)
        .def_readonly("alerts", &DetectResult::alerts)
        .def_readonly("series", &DetectResult::series)
        .def_readonly("excluded", &DetectResult::excluded);

    m.def("detect_events",
          [](const std::vector<ConnectionEvent>& events, const RunConfig& config,
             std::optional<bool> zero_fill) {
              return detect_events(events, config,
                                   zero_fill.value_or(config.zero_fill_for_stats()));
          },
          py::arg("events"), py::arg("config") = RunConfig{},
          py::arg("zero_fill") = std::nullopt);

    py::class_<AnalyzeResult>(m, "AnalyzeResult")
        .def_readonly("per_port", &AnalyzeResult::per_port)
        .def_readonly("total_events", &AnalyzeResult::total_events)
        .def_readonly("excluded", &AnalyzeResult::excluded);

    m.def("analyze_events",
          [](const std::vector<ConnectionEvent>& events, const RunConfig& config) {
              return analyze_events(events, config);
          },
          py::arg("events"), py::arg("config") = RunConfig{});

    m.def("alert_to_jsonl", &alert_to_jsonl);
    m.def("default_monitored_ports", &default_monitored_ports);
    m.attr("DEFAULT_THRESHOLD") = kDefaultThreshold;
    m.attr("__version__") = "0.1.0";
}
