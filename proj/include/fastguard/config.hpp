#pragma once

#include "fastguard/spc.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string_view>

namespace fastguard {

enum class InputFormat { pcap, jsonl };

/// Static threshold in force when no override or data-derived value is
/// given: the verified 3 connections per second.
inline constexpr std::uint32_t kDefaultThreshold = 3;

std::set<std::uint16_t> default_monitored_ports();  // {21,25,53,110,135,139,445}

/// Detection run settings. The defaults are the calibrated configuration:
/// well-known service ports, k = 3, threshold 3, both rule families,
/// upper-side chart zones.
struct RunConfig {
    std::set<std::uint16_t> monitored_ports = default_monitored_ports();
    double k = 3.0;
    std::optional<std::uint32_t> threshold_override;
    RuleSet rule_set = RuleSet::both;
    RuleSide side = RuleSide::upper_only;
    std::optional<bool> zero_fill;  // unset -> off for summaries, on for charts
    InputFormat format = InputFormat::jsonl;

    bool zero_fill_for_stats() const { return zero_fill.value_or(false); }
    bool zero_fill_for_charts() const { return zero_fill.value_or(true); }
};

ThresholdConfig threshold_in_force(const RunConfig& config);

/// Throws std::invalid_argument on k <= 0, an empty port set, or a zero
/// threshold override.
void validate(const RunConfig& config);

// Value parsers shared by the config file and the CLI flags.
std::set<std::uint16_t> parse_port_list(std::string_view text);
RuleSet parse_rule_set(std::string_view text);
RuleSide parse_side(std::string_view text);
InputFormat parse_format(std::string_view text);

/// Apply `key=value` lines ('#' comments and blank lines allowed). Keys:
/// ports, k, threshold, rules, side, zero_fill, format. Unknown keys or
/// bad values throw ParseError.
void apply_config_file(RunConfig& config, std::istream& in);

/// When FASTGUARD_CONFIG names a readable file, apply it.
void apply_env_config(RunConfig& config);

}  // namespace fastguard
