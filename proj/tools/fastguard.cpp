#include "fastguard/pipeline.hpp"
#include "fastguard/synth.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace fastguard;

namespace {

struct Options {
    std::string input;
    std::string out_dir = ".";
    std::string scenario;
    std::string ports;
    std::string rules;
    std::string side;
    std::string format;
    double k = 3.0;
    std::uint32_t threshold = 0;
    bool zero_fill = false;
    bool sort_input = false;
};

void add_io_flags(CLI::App* cmd, Options& opt, bool with_input = true) {
    if (with_input)
        cmd->add_option("input", opt.input, "capture file or JSONL connection log")->required();
    cmd->add_option("--out", opt.out_dir, "output directory (default: current)");
    cmd->add_option("--format", opt.format, "input format: pcap|jsonl (default: jsonl)");
}

void add_detection_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--ports", opt.ports, "comma-separated monitored destination ports");
    cmd->add_option("--k", opt.k, "control-limit sigma multiplier (default: 3)");
    cmd->add_option("--threshold", opt.threshold, "static threshold, connections/second");
    cmd->add_option("--rules", opt.rules, "rule set: threshold|spc|both (default: both)");
    cmd->add_option("--side", opt.side, "chart side: upper|two (default: upper)");
    cmd->add_flag("--zero-fill,!--no-zero-fill", opt.zero_fill,
                  "fill idle seconds with zero-count bins");
}

bool given(const CLI::App* cmd, const std::string& name) {
    const CLI::Option* option = cmd->get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
}

RunConfig make_config(const CLI::App* cmd, const Options& opt) {
    RunConfig config;
    apply_env_config(config);
    if (given(cmd, "--ports")) config.monitored_ports = parse_port_list(opt.ports);
    if (given(cmd, "--k")) config.k = opt.k;
    if (given(cmd, "--threshold")) config.threshold_override = opt.threshold;
    if (given(cmd, "--rules")) config.rule_set = parse_rule_set(opt.rules);
    if (given(cmd, "--side")) config.side = parse_side(opt.side);
    if (given(cmd, "--zero-fill")) config.zero_fill = opt.zero_fill;
    if (given(cmd, "--format")) config.format = parse_format(opt.format);
    validate(config);
    return config;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read input file " + path);
    return in;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

int cmd_ingest(const CLI::App* cmd, const Options& opt) {
    RunConfig config = make_config(cmd, opt);
    auto in = open_input(opt.input);
    fs::path out_path = fs::path(opt.out_dir) / "events.jsonl";
    auto out = open_output(out_path);

    IngestSummary summary = ingest_stream(
        in, config.format, out, opt.sort_input ? OrderPolicy::sort : OrderPolicy::reject);

    if (config.format == InputFormat::pcap)
        std::cout << "packets: " << summary.packets << "\ndecode skipped: "
                  << summary.decode_skipped << "\ndecode errors: " << summary.decode_errors
                  << "\n";
    std::cout << "events: " << summary.events << "\n";
    if (summary.truncated_tail) std::cout << "truncated tail: " << summary.tail_note << "\n";
    std::cout << "wrote " << out_path.string() << "\n";
    return 0;
}

int cmd_analyze(const CLI::App* cmd, const Options& opt) {
    RunConfig config = make_config(cmd, opt);
    auto in = open_input(opt.input);
    auto events = load_events(in, config.format);
    AnalyzeResult result = analyze_events(events, config);

    fs::path out_path = fs::path(opt.out_dir) / "summary.csv";
    open_output(out_path) << render_summary_csv(result);
    std::cout << render_summary_table(result) << "wrote " << out_path.string() << "\n";
    return 0;
}

int cmd_detect(const CLI::App* cmd, const Options& opt) {
    RunConfig config = make_config(cmd, opt);
    auto in = open_input(opt.input);
    auto events = load_events(in, config.format);
    DetectResult result = detect_events(events, config, config.zero_fill_for_stats());

    fs::path out_path = fs::path(opt.out_dir) / "alerts.jsonl";
    auto out = open_output(out_path);
    for (const auto& alert : result.alerts) out << alert_to_jsonl(alert) << '\n';

    std::cout << "alerts: " << result.alerts.size() << " (threshold "
              << result.threshold.value << ", k " << format_number(config.k) << ")\n"
              << "wrote " << out_path.string() << "\n";
    return result.alerts.empty() ? 0 : 2;
}

int cmd_chart(const CLI::App* cmd, const Options& opt) {
    RunConfig config = make_config(cmd, opt);
    auto in = open_input(opt.input);
    auto events = load_events(in, config.format);
    DetectResult result = detect_events(events, config, config.zero_fill_for_charts());

    std::set<std::uint16_t> charted;
    for (const auto& series : result.series) {
        fs::path out_path = fs::path(opt.out_dir) /
                            ("chart_" + format_ipv4(series.victim_ip) + "_port" +
                             std::to_string(series.port) + ".csv");
        open_output(out_path) << series_to_csv(series);
        charted.insert(series.port);
        std::cout << "wrote " << out_path.string() << " (" << series.bins.size() << " rows)\n";
    }
    for (std::uint16_t port : config.monitored_ports)
        if (!charted.contains(port)) std::cout << "port " << port << ": no traffic, no chart\n";
    return 0;
}

int cmd_synth(const CLI::App* /*cmd*/, const Options& opt) {
    auto in = open_input(opt.scenario);
    Scenario scenario = parse_scenario(in);
    auto events = run_scenario(scenario);

    fs::path out_path = fs::path(opt.out_dir) / "events.jsonl";
    auto out = open_output(out_path);
    write_events(out, events);
    std::cout << "events: " << events.size() << "\nwrote " << out_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fastguard - fast-attack detection with a verified static threshold "
                 "and Shewhart control charts"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* ingest = app.add_subcommand("ingest", "normalize a capture or log into JSONL events");
    add_io_flags(ingest, opt);
    ingest->add_flag("--sort-input", opt.sort_input,
                     "buffer and sort out-of-order input instead of rejecting it");

    CLI::App* analyze = app.add_subcommand("analyze", "per-port connection-rate summary");
    add_io_flags(analyze, opt);
    add_detection_flags(analyze, opt);

    CLI::App* detect = app.add_subcommand("detect", "flag fast-attack seconds (exit 2 on alerts)");
    add_io_flags(detect, opt);
    add_detection_flags(detect, opt);

    CLI::App* chart = app.add_subcommand("chart", "emit per-port control-chart CSV data");
    add_io_flags(chart, opt);
    add_detection_flags(chart, opt);

    CLI::App* synth = app.add_subcommand("synth", "generate a deterministic traffic scenario");
    synth->add_option("--scenario", opt.scenario, "scenario JSON file")->required();
    synth->add_option("--out", opt.out_dir, "output directory (default: current)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(ingest, opt);
        if (analyze->parsed()) return cmd_analyze(analyze, opt);
        if (detect->parsed()) return cmd_detect(detect, opt);
        if (chart->parsed()) return cmd_chart(chart, opt);
        if (synth->parsed()) return cmd_synth(synth, opt);
    } catch (const std::exception& e) {
        std::cerr << "fastguard: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
