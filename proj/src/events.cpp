#include "fastguard/events.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

namespace fastguard {

std::string_view to_string(Protocol p) {
    return p == Protocol::tcp ? "tcp" : "udp";
}

std::optional<std::uint32_t> parse_ipv4(std::string_view text) {
    std::uint32_t addr = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int octet = 0; octet < 4; ++octet) {
        unsigned value = 0;
        auto [next, ec] = std::from_chars(p, end, value);
        if (ec != std::errc{} || next == p || value > 255) return std::nullopt;
        addr = (addr << 8) | value;
        p = next;
        if (octet < 3) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
    }
    if (p != end) return std::nullopt;
    return addr;
}

std::string format_ipv4(std::uint32_t addr) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

namespace {

std::uint32_t require_ip(const nlohmann::json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw ParseError(std::string("missing or non-string \"") + key + "\"");
    auto addr = parse_ipv4(obj[key].get_ref<const std::string&>());
    if (!addr) throw ParseError(std::string("invalid IPv4 address in \"") + key + "\"");
    return *addr;
}

std::int64_t require_int(const nlohmann::json& obj, const char* key, std::int64_t min,
                         std::int64_t max) {
    if (!obj.contains(key) || !obj[key].is_number_integer())
        throw ParseError(std::string("missing or non-integer \"") + key + "\"");
    auto v = obj[key].get<std::int64_t>();
    if (v < min || v > max)
        throw ParseError(std::string("\"") + key + "\" out of range");
    return v;
}

std::int64_t optional_int(const nlohmann::json& obj, const char* key, std::int64_t min,
                          std::int64_t max, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    return require_int(obj, key, min, max);
}

}  // namespace

ConnectionEvent parse_connection_log(std::string_view line) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError("malformed JSON object");

    if (!obj.contains("ts") || !obj["ts"].is_number()) throw ParseError("missing or non-numeric \"ts\"");
    double ts = obj["ts"].get<double>();
    if (!std::isfinite(ts) || ts < 0) throw ParseError("negative or non-finite \"ts\"");
    if (ts > 9e12) throw ParseError("\"ts\" out of range");  // keeps microseconds in int64

    ConnectionEvent ev;
    ev.ts_us = std::llround(ts * static_cast<double>(kMicrosPerSecond));
    ev.src_ip = require_ip(obj, "src");
    ev.dst_ip = require_ip(obj, "dst");

    if (!obj.contains("proto") || !obj["proto"].is_string())
        throw ParseError("missing or non-string \"proto\"");
    const std::string& proto = obj["proto"].get_ref<const std::string&>();
    if (proto == "tcp") {
        ev.proto = Protocol::tcp;
    } else if (proto == "udp") {
        ev.proto = Protocol::udp;
    } else {
        throw ParseError("unknown protocol \"" + proto + "\"");
    }

    ev.src_port = static_cast<std::uint16_t>(optional_int(obj, "sport", 0, 65535, 0));
    ev.dst_port = static_cast<std::uint16_t>(require_int(obj, "dport", 0, 65535));
    ev.flags = static_cast<std::uint8_t>(require_int(obj, "flags", 0, 255));
    if (ev.proto == Protocol::udp && ev.flags != 0)
        throw ParseError("\"flags\" must be 0 for udp");
    return ev;
}

std::string serialize_connection(const ConnectionEvent& ev) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "{\"ts\":%lld.%06lld,\"src\":\"%s\",\"dst\":\"%s\",\"proto\":\"%s\","
                  "\"sport\":%u,\"dport\":%u,\"flags\":%u}",
                  static_cast<long long>(ev.ts_us / kMicrosPerSecond),
                  static_cast<long long>(ev.ts_us % kMicrosPerSecond),
                  format_ipv4(ev.src_ip).c_str(), format_ipv4(ev.dst_ip).c_str(),
                  std::string(to_string(ev.proto)).c_str(), ev.src_port, ev.dst_port, ev.flags);
    return buf;
}

std::vector<ConnectionEvent> read_events(std::istream& in) {
    std::vector<ConnectionEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            events.push_back(parse_connection_log(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return events;
}

void write_events(std::ostream& out, std::span<const ConnectionEvent> events) {
    for (const auto& ev : events) out << serialize_connection(ev) << '\n';
}

}  // namespace fastguard
