#include "fastguard/features.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace fastguard {

std::optional<ConnectionEvent> InitialConnectionExtractor::push(const ParsedPacket& packet) {
    if (seen_any_ && packet.ts_us < last_ts_)
        throw std::invalid_argument("packet timestamps regress; sort the input or pass "
                                    "OrderPolicy::sort");
    last_ts_ = packet.ts_us;
    seen_any_ = true;

    if (packet.proto == IpProtocol::tcp) {
        bool syn = packet.tcp_flags & tcp_flags::syn;
        bool ack = packet.tcp_flags & tcp_flags::ack;
        if (!syn || ack) return std::nullopt;
        return ConnectionEvent{packet.ts_us, packet.src_ip,   packet.dst_ip, Protocol::tcp,
                               packet.src_port, packet.dst_port, packet.tcp_flags};
    }
    if (packet.proto == IpProtocol::udp) {
        std::int64_t sec = epoch_second(packet.ts_us);
        if (udp_seen_.empty() || sec != current_second_) {
            current_second_ = sec;
            udp_seen_.clear();
        }
        bool fresh =
            udp_seen_.emplace(packet.src_ip, packet.dst_ip, packet.src_port, packet.dst_port)
                .second;
        if (!fresh) return std::nullopt;
        return ConnectionEvent{packet.ts_us, packet.src_ip,   packet.dst_ip, Protocol::udp,
                               packet.src_port, packet.dst_port, 0};
    }
    return std::nullopt;
}

std::vector<ConnectionEvent> extract_initial_connections(std::span<const ParsedPacket> packets,
                                                         OrderPolicy order) {
    InitialConnectionExtractor extractor;
    std::vector<ConnectionEvent> events;

    if (order == OrderPolicy::sort) {
        std::vector<ParsedPacket> sorted(packets.begin(), packets.end());
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const ParsedPacket& a, const ParsedPacket& b) { return a.ts_us < b.ts_us; });
        for (const auto& p : sorted)
            if (auto ev = extractor.push(p)) events.push_back(*ev);
        return events;
    }
    for (const auto& p : packets)
        if (auto ev = extractor.push(p)) events.push_back(*ev);
    return events;
}

PortBuckets segregate_by_port(std::span<const ConnectionEvent> events,
                              const std::set<std::uint16_t>& monitored_ports) {
    if (monitored_ports.empty())
        throw std::invalid_argument("monitored port set must not be empty");
    PortBuckets buckets;
    for (const auto& ev : events) {
        if (monitored_ports.contains(ev.dst_port))
            buckets.by_port[ev.dst_port].push_back(ev);
        else
            ++buckets.excluded;
    }
    return buckets;
}

namespace {

std::uint64_t scope_key(const ConnectionEvent& ev, CountScope scope) {
    std::uint64_t key = ev.dst_ip;
    if (scope == CountScope::per_host_port) key = key << 16 | ev.dst_port;
    return key;
}

}  // namespace

std::vector<FeatureRecord> derive_dest_count(std::span<const ConnectionEvent> events,
                                             CountScope scope) {
    std::vector<FeatureRecord> records;
    records.reserve(events.size());

    std::unordered_map<std::uint64_t, std::uint32_t> counts;
    std::size_t window_begin = 0;
    std::int64_t window_second = 0;

    auto flush = [&](std::size_t end) {
        for (std::size_t i = window_begin; i < end; ++i)
            records[i].dest_count = counts.at(scope_key(records[i].event, scope));
        counts.clear();
        window_begin = end;
    };

    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (i > 0 && ev.ts_us < events[i - 1].ts_us)
            throw std::invalid_argument("events must be in timestamp order");
        std::int64_t sec = epoch_second(ev.ts_us);
        if (i > 0 && sec != window_second) flush(i);
        window_second = sec;
        records.push_back(FeatureRecord{ev, 1, std::nullopt});
        ++counts[scope_key(ev, scope)];
    }
    flush(records.size());
    return records;
}

namespace {

using FlowKey = std::tuple<std::uint32_t, std::uint16_t, std::uint32_t, std::uint16_t>;

// Direction-agnostic flow identity: the lexicographically smaller
// (ip, port) endpoint comes first.
FlowKey canonical_flow(std::uint32_t a_ip, std::uint16_t a_port, std::uint32_t b_ip,
                       std::uint16_t b_port) {
    if (std::tie(a_ip, a_port) <= std::tie(b_ip, b_port))
        return {a_ip, a_port, b_ip, b_port};
    return {b_ip, b_port, a_ip, a_port};
}

}  // namespace

void attach_durations(std::vector<FeatureRecord>& records,
                      std::span<const ParsedPacket> packets) {
    std::map<FlowKey, std::vector<Micros>> terminations;
    for (const auto& p : packets) {
        if (p.proto != IpProtocol::tcp) continue;
        if (!(p.tcp_flags & (tcp_flags::fin | tcp_flags::rst))) continue;
        terminations[canonical_flow(p.src_ip, p.src_port, p.dst_ip, p.dst_port)].push_back(p.ts_us);
    }
    for (auto& [key, times] : terminations) std::sort(times.begin(), times.end());

    for (auto& rec : records) {
        if (rec.event.proto != Protocol::tcp) continue;
        auto it = terminations.find(canonical_flow(rec.event.src_ip, rec.event.src_port,
                                                   rec.event.dst_ip, rec.event.dst_port));
        if (it == terminations.end()) continue;
        auto t = std::lower_bound(it->second.begin(), it->second.end(), rec.event.ts_us);
        if (t == it->second.end()) continue;
        rec.duration_s =
            static_cast<double>(*t - rec.event.ts_us) / static_cast<double>(kMicrosPerSecond);
    }
}

}  // namespace fastguard
