#pragma once

#include "fastguard/events.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastguard {

/// One record from a classic capture file, as written by the capturing tool.
struct RawPacket {
    Micros ts_us = 0;
    std::vector<std::uint8_t> captured;  // link-layer frame, possibly truncated by snaplen
    std::uint32_t original_length = 0;   // bytes on the wire
};

enum class LinkType : std::uint32_t { ethernet = 1 };

enum class IpProtocol : std::uint8_t { tcp, udp, other };

struct ParsedPacket {
    Micros ts_us = 0;
    std::uint32_t src_ip = 0;  // host byte order
    std::uint32_t dst_ip = 0;
    IpProtocol proto = IpProtocol::other;
    std::uint16_t src_port = 0;  // 0 when proto == other
    std::uint16_t dst_port = 0;
    std::uint8_t tcp_flags = 0;  // TCP header flag octet; 0 otherwise

    bool operator==(const ParsedPacket&) const = default;
};

class PcapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Streaming reader for the classic capture format (24-byte global header,
/// 16-byte record headers, either byte order). The newer block-structured
/// format is rejected with a dedicated message.
///
/// Header problems always throw PcapError. Record-level problems (truncated
/// tail, impossible lengths) throw in strict mode; in lenient mode next()
/// stops, and truncated_tail()/tail_note() report what was dropped.
class PcapReader {
public:
    explicit PcapReader(std::istream& in, bool strict = true);

    /// Next record, or nullopt at end of stream.
    std::optional<RawPacket> next();

    LinkType link_type() const { return link_type_; }
    bool byte_swapped() const { return swapped_; }
    std::uint32_t snaplen() const { return snaplen_; }
    std::size_t records_read() const { return records_read_; }
    bool truncated_tail() const { return truncated_tail_; }
    const std::string& tail_note() const { return tail_note_; }

private:
    std::istream& in_;
    bool strict_;
    bool swapped_ = false;
    bool done_ = false;
    LinkType link_type_ = LinkType::ethernet;
    std::uint32_t snaplen_ = 0;
    std::size_t records_read_ = 0;
    bool truncated_tail_ = false;
    std::string tail_note_;

    [[noreturn]] void fail_record(const std::string& what);
    std::optional<RawPacket> stop_lenient(std::string what);
};

/// Parse a whole in-memory capture strictly. Truncated global header,
/// unknown magic, or a truncated/corrupt record throw PcapError (record
/// errors name the record index).
std::vector<RawPacket> parse_capture_file(std::span<const std::uint8_t> bytes);

enum class DecodeStatus : std::uint8_t {
    ok,        // Ethernet/IPv4/{TCP,UDP} frame decoded
    skipped,   // not an error: non-IPv4 ethertype, non-TCP/UDP protocol, later fragment
    malformed  // frame shorter than the headers it claims
};

struct DecodeResult {
    DecodeStatus status = DecodeStatus::skipped;
    std::optional<ParsedPacket> packet;
};

/// Decode an Ethernet frame down to transport ports and TCP flags.
/// Never reads past the captured bytes.
DecodeResult decode_packet(const RawPacket& raw, LinkType link);

}  // namespace fastguard
