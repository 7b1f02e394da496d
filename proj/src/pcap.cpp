#include "fastguard/pcap.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <sstream>

namespace fastguard {

namespace {

constexpr std::uint32_t kMagicNative = 0xa1b2c3d4;
constexpr std::uint32_t kMagicSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kMagicBlockFormat = 0x0a0d0d0a;  // pcapng section header
constexpr std::uint32_t kMaxRecordBytes = 1u << 28;      // corrupt-length guard

std::uint32_t read_u32(const std::uint8_t* p, bool swapped) {
    std::uint32_t le = static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
                       static_cast<std::uint32_t>(p[2]) << 16 |
                       static_cast<std::uint32_t>(p[3]) << 24;
    if (!swapped) return le;
    return ((le & 0xff) << 24) | ((le & 0xff00) << 8) | ((le >> 8) & 0xff00) | (le >> 24);
}

}  // namespace

PcapReader::PcapReader(std::istream& in, bool strict) : in_(in), strict_(strict) {
    std::array<std::uint8_t, 24> header{};
    in_.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in_.gcount() != static_cast<std::streamsize>(header.size()))
        throw PcapError("truncated global header: got " + std::to_string(in_.gcount()) +
                        " of 24 bytes");

    std::uint32_t magic_le = read_u32(header.data(), false);
    if (magic_le == kMagicNative) {
        swapped_ = false;
    } else if (magic_le == kMagicSwapped) {
        swapped_ = true;
    } else if (magic_le == kMagicBlockFormat) {
        throw PcapError("block-structured capture (pcapng) is not supported; "
                        "convert to the classic format first");
    } else {
        char hex[16];
        std::snprintf(hex, sizeof(hex), "0x%08x", magic_le);
        throw PcapError(std::string("unknown capture magic ") + hex + " at offset 0");
    }

    snaplen_ = read_u32(header.data() + 16, swapped_);
    std::uint32_t network = read_u32(header.data() + 20, swapped_);
    if (network != static_cast<std::uint32_t>(LinkType::ethernet))
        throw PcapError("unsupported link type " + std::to_string(network) +
                        "; only Ethernet captures are handled");
    link_type_ = LinkType::ethernet;
}

void PcapReader::fail_record(const std::string& what) {
    throw PcapError(what + " (record " + std::to_string(records_read_) + ")");
}

std::optional<RawPacket> PcapReader::stop_lenient(std::string what) {
    truncated_tail_ = true;
    tail_note_ = what + " (record " + std::to_string(records_read_) + ")";
    done_ = true;
    return std::nullopt;
}

std::optional<RawPacket> PcapReader::next() {
    if (done_) return std::nullopt;

    std::array<std::uint8_t, 16> rec{};
    in_.read(reinterpret_cast<char*>(rec.data()), rec.size());
    std::streamsize got = in_.gcount();
    if (got == 0) {
        done_ = true;
        return std::nullopt;
    }
    if (got != static_cast<std::streamsize>(rec.size())) {
        if (strict_) fail_record("truncated record header");
        return stop_lenient("truncated record header");
    }

    std::uint32_t ts_sec = read_u32(rec.data(), swapped_);
    std::uint32_t ts_usec = read_u32(rec.data() + 4, swapped_);
    std::uint32_t caplen = read_u32(rec.data() + 8, swapped_);
    std::uint32_t origlen = read_u32(rec.data() + 12, swapped_);

    if (caplen > origlen) {
        if (strict_) fail_record("captured length exceeds original length");
        return stop_lenient("captured length exceeds original length");
    }
    if (caplen > kMaxRecordBytes) {
        if (strict_) fail_record("implausible captured length");
        return stop_lenient("implausible captured length");
    }

    RawPacket pkt;
    pkt.ts_us = static_cast<Micros>(ts_sec) * kMicrosPerSecond + ts_usec;
    pkt.original_length = origlen;
    pkt.captured.resize(caplen);
    if (caplen > 0) {
        in_.read(reinterpret_cast<char*>(pkt.captured.data()), caplen);
        if (in_.gcount() != static_cast<std::streamsize>(caplen)) {
            if (strict_) fail_record("truncated record body");
            return stop_lenient("truncated record body");
        }
    }
    ++records_read_;
    return pkt;
}

std::vector<RawPacket> parse_capture_file(std::span<const std::uint8_t> bytes) {
    std::istringstream in(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    PcapReader reader(in, /*strict=*/true);
    std::vector<RawPacket> packets;
    while (auto pkt = reader.next()) packets.push_back(std::move(*pkt));
    return packets;
}

namespace {

constexpr std::size_t kEthHeaderLen = 14;
constexpr std::uint16_t kEthertypeIpv4 = 0x0800;
constexpr std::uint8_t kIpProtoTcp = 6;
constexpr std::uint8_t kIpProtoUdp = 17;

std::uint16_t be16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}

std::uint32_t be32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
           static_cast<std::uint32_t>(p[2]) << 8 | static_cast<std::uint32_t>(p[3]);
}

}  // namespace

DecodeResult decode_packet(const RawPacket& raw, LinkType link) {
    if (link != LinkType::ethernet) return {DecodeStatus::malformed, std::nullopt};

    std::span<const std::uint8_t> frame(raw.captured);
    if (frame.size() < kEthHeaderLen) return {DecodeStatus::malformed, std::nullopt};
    std::uint16_t ethertype = be16(frame.data() + 12);
    if (ethertype != kEthertypeIpv4) return {DecodeStatus::skipped, std::nullopt};

    std::span<const std::uint8_t> ip = frame.subspan(kEthHeaderLen);
    if (ip.size() < 20) return {DecodeStatus::malformed, std::nullopt};
    if ((ip[0] >> 4) != 4) return {DecodeStatus::malformed, std::nullopt};
    std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
    if (ihl < 20 || ip.size() < ihl) return {DecodeStatus::malformed, std::nullopt};

    // Later fragments carry no transport header; first fragments do.
    std::uint16_t frag_offset = static_cast<std::uint16_t>((ip[6] & 0x1f) << 8 | ip[7]);
    if (frag_offset != 0) return {DecodeStatus::skipped, std::nullopt};

    ParsedPacket pkt;
    pkt.ts_us = raw.ts_us;
    pkt.src_ip = be32(ip.data() + 12);
    pkt.dst_ip = be32(ip.data() + 16);

    std::uint8_t ip_proto = ip[9];
    std::span<const std::uint8_t> transport = ip.subspan(ihl);
    if (ip_proto == kIpProtoTcp) {
        if (transport.size() < 20) return {DecodeStatus::malformed, std::nullopt};
        pkt.proto = IpProtocol::tcp;
        pkt.src_port = be16(transport.data());
        pkt.dst_port = be16(transport.data() + 2);
        pkt.tcp_flags = transport[13];
    } else if (ip_proto == kIpProtoUdp) {
        if (transport.size() < 8) return {DecodeStatus::malformed, std::nullopt};
        pkt.proto = IpProtocol::udp;
        pkt.src_port = be16(transport.data());
        pkt.dst_port = be16(transport.data() + 2);
    } else {
        return {DecodeStatus::skipped, std::nullopt};
    }
    return {DecodeStatus::ok, pkt};
}

}  // namespace fastguard
