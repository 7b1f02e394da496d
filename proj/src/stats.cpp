#include "fastguard/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace fastguard {

std::vector<SecondBin> bin_per_second(std::span<const ConnectionEvent> events,
                                      ZeroFill zero_fill) {
    using SeriesKey = std::pair<std::uint32_t, std::uint16_t>;  // (victim, port)
    std::map<SeriesKey, std::map<std::int64_t, std::uint64_t>> series;
    for (const auto& ev : events)
        ++series[{ev.dst_ip, ev.dst_port}][epoch_second(ev.ts_us)];

    std::vector<SecondBin> bins;
    for (const auto& [key, counts] : series) {
        if (zero_fill == ZeroFill::on) {
            std::int64_t first = counts.begin()->first;
            std::int64_t last = counts.rbegin()->first;
            for (std::int64_t sec = first; sec <= last; ++sec) {
                auto it = counts.find(sec);
                bins.push_back({sec, key.first, key.second, it == counts.end() ? 0 : it->second});
            }
        } else {
            for (const auto& [sec, count] : counts)
                bins.push_back({sec, key.first, key.second, count});
        }
    }
    return bins;
}

PortSummary summarize_port(std::span<const SecondBin> bins) {
    if (bins.empty()) throw std::invalid_argument("cannot summarize an empty series");

    PortSummary summary;
    summary.port = bins.front().port;
    summary.min = bins.front().count;
    summary.max = bins.front().count;
    summary.n_seconds = bins.size();

    double sum = 0;
    for (const auto& bin : bins) {
        if (bin.port != summary.port)
            throw std::invalid_argument("summarize_port expects bins for a single port");
        sum += static_cast<double>(bin.count);
        summary.min = std::min(summary.min, bin.count);
        summary.max = std::max(summary.max, bin.count);
    }
    summary.mean = sum / static_cast<double>(bins.size());
    return summary;
}

ThresholdConfig select_threshold(std::span<const SourceMean> normal_means,
                                 std::uint32_t experiment_max) {
    if (normal_means.empty())
        throw std::invalid_argument("threshold selection needs at least one normal mean");

    double max_mean = 0;
    for (const auto& source : normal_means) {
        if (!std::isfinite(source.mean) || source.mean < 0)
            throw std::invalid_argument("normal means must be finite and non-negative");
        max_mean = std::max(max_mean, source.mean);
    }

    ThresholdConfig config;
    config.value = std::max<std::uint32_t>(
        {static_cast<std::uint32_t>(std::ceil(max_mean)), experiment_max, 1});
    config.provenance.assign(normal_means.begin(), normal_means.end());
    config.provenance.push_back({"experiment_max", static_cast<double>(experiment_max)});
    return config;
}

}  // namespace fastguard
