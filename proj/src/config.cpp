#include "fastguard/config.hpp"

#include "fastguard/events.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fastguard {

std::set<std::uint16_t> default_monitored_ports() {
    return {21, 25, 53, 110, 135, 139, 445};
}

ThresholdConfig threshold_in_force(const RunConfig& config) {
    ThresholdConfig threshold;
    if (config.threshold_override) {
        threshold.value = *config.threshold_override;
        threshold.provenance.push_back({"override", static_cast<double>(threshold.value)});
    } else {
        threshold.value = kDefaultThreshold;
        threshold.provenance.push_back({"default", static_cast<double>(kDefaultThreshold)});
    }
    return threshold;
}

void validate(const RunConfig& config) {
    if (!(config.k > 0)) throw std::invalid_argument("k must be positive");
    if (config.monitored_ports.empty())
        throw std::invalid_argument("monitored port set must not be empty");
    if (config.threshold_override && *config.threshold_override == 0)
        throw std::invalid_argument("threshold must be at least 1 connection per second");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

}  // namespace

std::set<std::uint16_t> parse_port_list(std::string_view text) {
    std::set<std::uint16_t> ports;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = trim(text.substr(pos, comma - pos));
        if (item.empty()) throw ParseError("empty entry in port list");
        unsigned value = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc{} || p != item.data() + item.size() || value > 65535)
            throw ParseError("invalid port \"" + std::string(item) + "\"");
        ports.insert(static_cast<std::uint16_t>(value));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return ports;
}

RuleSet parse_rule_set(std::string_view text) {
    if (text == "threshold") return RuleSet::threshold_only;
    if (text == "spc") return RuleSet::spc_only;
    if (text == "both") return RuleSet::both;
    throw ParseError("rules must be one of threshold|spc|both");
}

RuleSide parse_side(std::string_view text) {
    if (text == "upper") return RuleSide::upper_only;
    if (text == "two") return RuleSide::two_sided;
    throw ParseError("side must be upper or two");
}

InputFormat parse_format(std::string_view text) {
    if (text == "pcap") return InputFormat::pcap;
    if (text == "jsonl") return InputFormat::jsonl;
    throw ParseError("format must be pcap or jsonl");
}

void apply_config_file(RunConfig& config, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("config line " + std::to_string(line_no) + ": expected key=value");
        std::string_view key = trim(stripped.substr(0, eq));
        std::string value(trim(stripped.substr(eq + 1)));
        try {
            if (key == "ports") {
                config.monitored_ports = parse_port_list(value);
            } else if (key == "k") {
                config.k = std::stod(value);
            } else if (key == "threshold") {
                config.threshold_override = static_cast<std::uint32_t>(std::stoul(value));
            } else if (key == "rules") {
                config.rule_set = parse_rule_set(value);
            } else if (key == "side") {
                config.side = parse_side(value);
            } else if (key == "zero_fill") {
                if (value == "true" || value == "1")
                    config.zero_fill = true;
                else if (value == "false" || value == "0")
                    config.zero_fill = false;
                else
                    throw ParseError("zero_fill must be true or false");
            } else if (key == "format") {
                config.format = parse_format(value);
            } else {
                throw ParseError("unknown key \"" + std::string(key) + "\"");
            }
        } catch (const std::exception& e) {
            throw ParseError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_env_config(RunConfig& config) {
    const char* path = std::getenv("FASTGUARD_CONFIG");
    if (path == nullptr || *path == '\0') return;
    std::ifstream in(path);
    if (!in) throw ParseError(std::string("cannot read config file ") + path);
    apply_config_file(config, in);
}

}  // namespace fastguard
