#pragma once

#include "fastguard/events.hpp"
#include "fastguard/pcap.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <vector>

namespace fastguard {

enum class OrderPolicy { reject, sort };

/// Streaming extraction of initial connections from a time-ordered packet
/// stream. TCP: every SYN-without-ACK packet opens a connection. UDP: the
/// first packet of a 5-tuple within an epoch second does.
/// push() throws std::invalid_argument when timestamps regress.
class InitialConnectionExtractor {
public:
    std::optional<ConnectionEvent> push(const ParsedPacket& packet);

private:
    bool seen_any_ = false;
    Micros last_ts_ = 0;
    std::int64_t current_second_ = 0;
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint16_t, std::uint16_t>> udp_seen_;
};

/// Batch form. With OrderPolicy::reject, unordered input throws
/// std::invalid_argument; with OrderPolicy::sort, a stable timestamp sort
/// runs first.
std::vector<ConnectionEvent> extract_initial_connections(std::span<const ParsedPacket> packets,
                                                         OrderPolicy order = OrderPolicy::reject);

struct PortBuckets {
    std::map<std::uint16_t, std::vector<ConnectionEvent>> by_port;
    std::size_t excluded = 0;  // events to unmonitored ports
};

/// Partition events by monitored destination port. Throws
/// std::invalid_argument when the monitored set is empty.
PortBuckets segregate_by_port(std::span<const ConnectionEvent> events,
                              const std::set<std::uint16_t>& monitored_ports);

/// Scope of the derived same-destination count: per victim host, or per
/// (victim host, destination port) pair.
enum class CountScope { per_host, per_host_port };

struct FeatureRecord {
    ConnectionEvent event;
    std::uint32_t dest_count = 1;  // connections sharing the destination in this epoch second
    std::optional<double> duration_s;  // absent unless a terminating packet was seen
};

/// Annotate each event with the number of events sharing its destination
/// within the same epoch second. Single pass; input must be time-ordered.
std::vector<FeatureRecord> derive_dest_count(std::span<const ConnectionEvent> events,
                                             CountScope scope = CountScope::per_host);

/// Fill in TCP connection durations where the trace contains a FIN or RST
/// for the flow at or after the initial SYN. UDP records stay unset.
void attach_durations(std::vector<FeatureRecord>& records,
                      std::span<const ParsedPacket> packets);

}  // namespace fastguard
