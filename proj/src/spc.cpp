#include "fastguard/spc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fastguard {

ControlLimits compute_limits(std::span<const double> series, double k) {
    if (series.empty()) throw std::invalid_argument("cannot compute limits of an empty series");
    if (!(k > 0)) throw std::invalid_argument("sigma multiplier k must be positive");

    // Welford's recurrence; an independent two-pass oracle checks this in tests.
    double mean = 0;
    double m2 = 0;
    std::size_t n = 0;
    for (double x : series) {
        if (!std::isfinite(x)) throw std::invalid_argument("series values must be finite");
        ++n;
        double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    ControlLimits limits;
    limits.mu = mean;
    limits.sigma = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    limits.k = k;
    limits.cl = mean;
    limits.ucl = mean + k * limits.sigma;
    limits.lcl = std::max(0.0, mean - k * limits.sigma);
    return limits;
}

std::string_view to_string(VerdictStatus status) {
    switch (status) {
        case VerdictStatus::in_control: return "in_control";
        case VerdictStatus::rule1: return "rule1";
        case VerdictStatus::rule2: return "rule2";
        case VerdictStatus::rule3: return "rule3";
        case VerdictStatus::over_threshold: return "over_threshold";
    }
    return "unknown";
}

namespace {

constexpr std::uint8_t kRule1Bit = 1u << 0;
constexpr std::uint8_t kRule2Bit = 1u << 1;
constexpr std::uint8_t kRule3Bit = 1u << 2;

// Count of set flags among the window of up to `width` entries ending at i.
std::size_t window_count(const std::vector<bool>& flags, std::size_t i, std::size_t width) {
    std::size_t begin = i + 1 >= width ? i + 1 - width : 0;
    std::size_t count = 0;
    for (std::size_t j = begin; j <= i; ++j) count += flags[j];
    return count;
}

}  // namespace

std::vector<Verdict> western_electric(std::span<const double> series, const ControlLimits& limits,
                                      RuleSide side) {
    const std::size_t n = series.size();
    const double cl = limits.cl;
    const double sigma = limits.sigma;
    const bool two_sided = side == RuleSide::two_sided;

    // Zone membership per point and side; rules 2 and 3 need the history.
    std::vector<bool> up2(n), up1(n), down2(n), down1(n);

    std::vector<Verdict> verdicts(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = series[i];
        double d = x - cl;

        Verdict& v = verdicts[i];
        v.index = i;
        v.observed = x;

        if (sigma == 0) {
            // Degenerate chart: zones collapse onto the center line.
            bool fire = two_sided ? d != 0 : d > 0;
            if (fire) {
                v.rules_fired = kRule1Bit;
                v.status = VerdictStatus::rule1;
            }
            continue;
        }
        v.sigma_distance = d / sigma;

        bool rule1 = d > 3 * sigma || (two_sided && -d > 3 * sigma);

        up2[i] = d > 2 * sigma;
        up1[i] = d >= sigma;
        bool rule2 = up2[i] && window_count(up2, i, 3) >= 2;
        bool rule3 = up1[i] && window_count(up1, i, 5) >= 4;
        if (two_sided) {
            down2[i] = -d > 2 * sigma;
            down1[i] = -d >= sigma;
            rule2 = rule2 || (down2[i] && window_count(down2, i, 3) >= 2);
            rule3 = rule3 || (down1[i] && window_count(down1, i, 5) >= 4);
        }

        if (rule1) v.rules_fired |= kRule1Bit;
        if (rule2) v.rules_fired |= kRule2Bit;
        if (rule3) v.rules_fired |= kRule3Bit;

        if (rule1)
            v.status = VerdictStatus::rule1;
        else if (rule2)
            v.status = VerdictStatus::rule2;
        else if (rule3)
            v.status = VerdictStatus::rule3;
    }
    return verdicts;
}

std::vector<double> counts_series(std::span<const SecondBin> bins) {
    std::vector<double> series;
    series.reserve(bins.size());
    for (const auto& bin : bins) series.push_back(static_cast<double>(bin.count));
    return series;
}

std::vector<Alert> classify_fast_attack(std::span<const SecondBin> bins,
                                        const ThresholdConfig& threshold,
                                        const ControlLimits& limits, RuleSet rule_set,
                                        RuleSide side) {
    for (const auto& bin : bins)
        if (bin.victim_ip != bins.front().victim_ip || bin.port != bins.front().port)
            throw std::invalid_argument("classify_fast_attack expects one (victim, port) series");

    std::vector<Verdict> verdicts;
    if (rule_set != RuleSet::threshold_only)
        verdicts = western_electric(counts_series(bins), limits, side);

    std::vector<Alert> alerts;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto& bin = bins[i];
        bool over = rule_set != RuleSet::spc_only && bin.count > threshold.value;
        VerdictStatus chart_status =
            verdicts.empty() ? VerdictStatus::in_control : verdicts[i].status;

        VerdictStatus trigger = VerdictStatus::in_control;
        if (over)
            trigger = VerdictStatus::over_threshold;
        else if (chart_status != VerdictStatus::in_control)
            trigger = chart_status;
        if (trigger == VerdictStatus::in_control) continue;

        alerts.push_back(
            {bin.victim_ip, bin.port, bin.second, bin.count, trigger, limits, threshold.value});
    }
    return alerts;
}

}  // namespace fastguard
