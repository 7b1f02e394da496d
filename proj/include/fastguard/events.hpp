#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fastguard {

/// Epoch timestamps are carried as integer microseconds so that
/// one-second binning is exact regardless of trace length.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

/// Epoch second containing a (non-negative) microsecond timestamp.
inline std::int64_t epoch_second(Micros ts_us) { return ts_us / kMicrosPerSecond; }

enum class Protocol : std::uint8_t { tcp, udp };

std::string_view to_string(Protocol p);

namespace tcp_flags {
inline constexpr std::uint8_t fin = 0x01;
inline constexpr std::uint8_t syn = 0x02;
inline constexpr std::uint8_t rst = 0x04;
inline constexpr std::uint8_t psh = 0x08;
inline constexpr std::uint8_t ack = 0x10;
inline constexpr std::uint8_t urg = 0x20;
}  // namespace tcp_flags

/// One initial connection attempt toward a destination host.
struct ConnectionEvent {
    Micros ts_us = 0;
    std::uint32_t src_ip = 0;  // host byte order
    std::uint32_t dst_ip = 0;
    Protocol proto = Protocol::tcp;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t flags = 0;  // TCP flag octet, 0 for UDP

    bool operator==(const ConnectionEvent&) const = default;
};

// IPv4 helpers (dotted quad <-> host-order word).
std::optional<std::uint32_t> parse_ipv4(std::string_view text);
std::string format_ipv4(std::uint32_t addr);

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parse one JSONL connection-log line:
///   {"ts":10.000001,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp",
///    "sport":4444,"dport":21,"flags":2}
/// Throws ParseError on malformed input, unknown protocol, negative time,
/// or out-of-range port/flag values.
ConnectionEvent parse_connection_log(std::string_view line);

/// Serialize to one JSONL line (no trailing newline). The timestamp is
/// written with exactly six decimals so a parse round-trip is identity.
std::string serialize_connection(const ConnectionEvent& ev);

/// Read a whole connection log; errors are rethrown with the 1-based
/// line number prepended.
std::vector<ConnectionEvent> read_events(std::istream& in);

void write_events(std::ostream& out, std::span<const ConnectionEvent> events);

}  // namespace fastguard
