#pragma once

#include "fastguard/events.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fastguard {

/// Per-second connection count toward one (victim, port) pair; the sample
/// statistic the control chart plots.
struct SecondBin {
    std::int64_t second = 0;  // epoch second
    std::uint32_t victim_ip = 0;
    std::uint16_t port = 0;
    std::uint64_t count = 0;

    bool operator==(const SecondBin&) const = default;
};

enum class ZeroFill { off, on };

/// Count events per (victim, port, epoch second). With ZeroFill::on, idle
/// seconds between a series' first and last observed bin appear with count
/// zero (needed when the series is charted). Output is ordered by
/// (victim, port, second).
std::vector<SecondBin> bin_per_second(std::span<const ConnectionEvent> events,
                                      ZeroFill zero_fill = ZeroFill::off);

struct PortSummary {
    std::uint16_t port = 0;
    double mean = 0;  // connections per second, full precision
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    std::size_t n_seconds = 0;
};

/// Mean/min/max of per-second counts for one port's bins.
/// Throws std::invalid_argument on an empty series or mixed ports.
PortSummary summarize_port(std::span<const SecondBin> bins);

/// One vetted-normal mean from an observation source.
struct SourceMean {
    std::string label;
    double mean = 0;  // connections per second
};

struct ThresholdConfig {
    std::uint32_t value = 0;  // connections per second
    std::vector<SourceMean> provenance;
};

/// Static threshold from multi-source comparison: the ceiling of the
/// largest vetted-normal mean, raised to the experimental per-host maximum
/// if that is higher (never below 1).
ThresholdConfig select_threshold(std::span<const SourceMean> normal_means,
                                 std::uint32_t experiment_max);

}  // namespace fastguard
