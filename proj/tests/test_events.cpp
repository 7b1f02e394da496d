#include "fastguard/events.hpp"

#include "doctest.h"
#include "testutil.hpp"

#include <random>
#include <sstream>

using namespace fastguard;

TEST_CASE("ipv4 parse and format") {
    CHECK(*parse_ipv4("10.0.0.1") == 0x0a000001u);
    CHECK(*parse_ipv4("0.0.0.0") == 0u);
    CHECK(*parse_ipv4("255.255.255.255") == 0xffffffffu);
    CHECK(format_ipv4(0x0a000001u) == "10.0.0.1");
    CHECK(format_ipv4(0xc0a80164u) == "192.168.1.100");

    CHECK(!parse_ipv4("1.2.3"));
    CHECK(!parse_ipv4("1.2.3.4.5"));
    CHECK(!parse_ipv4("256.1.1.1"));
    CHECK(!parse_ipv4("1.2.3.x"));
    CHECK(!parse_ipv4(""));
}

TEST_CASE("connection log line maps fields directly") {
    auto ev = parse_connection_log(
        R"({"ts":10.000001,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp","dport":21,"flags":2})");
    CHECK(ev.ts_us == 10000001);
    CHECK(ev.src_ip == 0x0a000001u);
    CHECK(ev.dst_ip == 0x0a000002u);
    CHECK(ev.proto == Protocol::tcp);
    CHECK(ev.dst_port == 21);
    CHECK(ev.flags == tcp_flags::syn);
}

TEST_CASE("connection log rejects bad lines") {
    CHECK_THROWS_AS(parse_connection_log("not json"), ParseError);
    CHECK_THROWS_AS(parse_connection_log("[1,2]"), ParseError);
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":-1,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp","dport":21,"flags":2})"),
                    ParseError);
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1,"src":"10.0.0.1","dst":"10.0.0.2","proto":"icmp","dport":21,"flags":0})"),
                    ParseError);
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1,"src":"10.0.0","dst":"10.0.0.2","proto":"tcp","dport":21,"flags":2})"),
                    ParseError);
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp","dport":70000,"flags":2})"),
                    ParseError);
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp","flags":2})"),
                    ParseError);
    // flags carry the TCP octet; udp lines must say 0
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1,"src":"10.0.0.1","dst":"10.0.0.2","proto":"udp","dport":53,"flags":2})"),
                    ParseError);
    // timestamps must stay representable as integer microseconds
    CHECK_THROWS_AS(parse_connection_log(
                        R"({"ts":1e18,"src":"10.0.0.1","dst":"10.0.0.2","proto":"tcp","dport":21,"flags":2})"),
                    ParseError);
}

TEST_CASE("serialize then parse is identity on generated events") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::int64_t> ts(0, 2'000'000'000'000'000);  // ~2033
    std::uniform_int_distribution<std::uint32_t> ip(0, 0xffffffffu);
    std::uniform_int_distribution<int> port(0, 65535);
    std::uniform_int_distribution<int> flag(0, 255);

    for (int i = 0; i < 500; ++i) {
        ConnectionEvent ev;
        ev.ts_us = ts(rng);
        ev.src_ip = ip(rng);
        ev.dst_ip = ip(rng);
        ev.proto = i % 2 == 0 ? Protocol::tcp : Protocol::udp;
        ev.src_port = static_cast<std::uint16_t>(port(rng));
        ev.dst_port = static_cast<std::uint16_t>(port(rng));
        ev.flags = ev.proto == Protocol::tcp ? static_cast<std::uint8_t>(flag(rng)) : 0;

        ConnectionEvent back = parse_connection_log(serialize_connection(ev));
        CHECK(back == ev);
    }
}

TEST_CASE("read_events reports the failing line number") {
    std::istringstream in(
        "{\"ts\":1.5,\"src\":\"10.0.0.1\",\"dst\":\"10.0.0.2\",\"proto\":\"tcp\",\"sport\":1,"
        "\"dport\":21,\"flags\":2}\n"
        "garbage\n");
    try {
        read_events(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("read/write round trip preserves the event list") {
    std::vector<ConnectionEvent> events{
        testutil::event_at(1.25, 0x0a000002u, 25),
        testutil::event_at(2.5, 0x0a000002u, 53, 0x0a000003u, Protocol::udp),
    };
    std::ostringstream out;
    write_events(out, events);
    std::istringstream in(out.str());
    CHECK(read_events(in) == events);
}
