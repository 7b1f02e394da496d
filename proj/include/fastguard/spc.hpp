#pragma once

#include "fastguard/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fastguard {

/// Shewhart chart parameters: center line at the series mean, control
/// limits k sample standard deviations away, lower limit clamped at zero
/// because counts cannot go negative.
struct ControlLimits {
    double mu = 0;
    double sigma = 0;  // sample standard deviation (n-1 divisor)
    double k = 3;
    double ucl = 0;  // mu + k * sigma
    double cl = 0;   // mu
    double lcl = 0;  // max(0, mu - k * sigma)
};

/// Throws std::invalid_argument on an empty series, non-finite values, or
/// k <= 0. A single-point series gets sigma = 0.
ControlLimits compute_limits(std::span<const double> series, double k = 3.0);

enum class RuleSide { upper_only, two_sided };

enum class VerdictStatus : std::uint8_t { in_control, rule1, rule2, rule3, over_threshold };

std::string_view to_string(VerdictStatus status);

struct Verdict {
    std::size_t index = 0;
    VerdictStatus status = VerdictStatus::in_control;
    double observed = 0;
    std::optional<double> sigma_distance;  // (observed - cl) / sigma; absent when sigma == 0
    std::uint8_t rules_fired = 0;          // bit 0 = rule 1, bit 1 = rule 2, bit 2 = rule 3
};

/// Western Electric decision rules 1-3 over a series, using zones at 1, 2
/// and 3 sigma from the center line:
///   1. one point beyond the 3-sigma limit
///   2. two of three consecutive points beyond a 2-sigma limit (same side)
///   3. four of five consecutive points at 1 sigma or beyond (same side)
/// Rule 4 (eight consecutive points one side of center) is intentionally
/// not evaluated: every normal series here sits on one side of its
/// threshold, so the rule would flag nothing but normal traffic.
/// Rules 2 and 3 flag the latest point completing the pattern, and that
/// point must itself sit in the zone. With sigma == 0 only rule 1 applies,
/// firing on any point off the center line on the checked side.
/// Status reports the lowest-numbered firing rule; rules_fired keeps all.
std::vector<Verdict> western_electric(std::span<const double> series, const ControlLimits& limits,
                                      RuleSide side = RuleSide::upper_only);

enum class RuleSet { threshold_only, spc_only, both };

/// Out-of-control finding with enough state to re-derive the verdict.
struct Alert {
    std::uint32_t victim_ip = 0;
    std::uint16_t port = 0;
    std::int64_t second = 0;
    std::uint64_t count = 0;
    VerdictStatus trigger = VerdictStatus::in_control;
    ControlLimits limits;
    std::uint32_t threshold = 0;
};

/// Judge one (victim, port) series of per-second bins. The static
/// threshold fires on count > threshold.value; the chart rules fire per
/// western_electric. When both fire on one bin a single alert is emitted
/// with the threshold as trigger (the chart verdicts stay visible in the
/// chart output). Throws std::invalid_argument on a mixed-series input.
std::vector<Alert> classify_fast_attack(std::span<const SecondBin> bins,
                                        const ThresholdConfig& threshold,
                                        const ControlLimits& limits,
                                        RuleSet rule_set = RuleSet::both,
                                        RuleSide side = RuleSide::upper_only);

/// Bin counts as a double series, in input order.
std::vector<double> counts_series(std::span<const SecondBin> bins);

}  // namespace fastguard
