#include "fastguard/synth.hpp"

#include "fastguard/stats.hpp"

#include "doctest.h"
#include "testutil.hpp"

#include <algorithm>
#include <sstream>

using namespace fastguard;

namespace {

constexpr std::uint32_t kVictim = 0x0a000002;  // 10.0.0.2

bool sorted_by_time(const std::vector<ConnectionEvent>& events) {
    return std::is_sorted(events.begin(), events.end(),
                          [](const ConnectionEvent& a, const ConnectionEvent& b) {
                              return a.ts_us < b.ts_us;
                          });
}

}  // namespace

TEST_CASE("host profile emits its exact rate in every second") {
    SUBCASE("windows stack rate 3 over 10 s") {
        HostProfile profile{"windows_xp_sp2_fresh", 3, 11};
        auto events = synth_host(profile, kVictim, 21, 10);
        CHECK(events.size() == 30);
        CHECK(sorted_by_time(events));

        auto bins = bin_per_second(events);
        REQUIRE(bins.size() == 10);
        for (const auto& bin : bins) CHECK(bin.count == 3);
    }
    SUBCASE("unix stack rate 1 over 5 s") {
        HostProfile profile{"linux_centos_4_4", 1, 14};
        auto events = synth_host(profile, kVictim, 135, 5);
        CHECK(events.size() == 5);
        auto bins = bin_per_second(events);
        REQUIRE(bins.size() == 5);
        for (const auto& bin : bins) CHECK(bin.count == 1);
    }
    SUBCASE("zero duration") {
        HostProfile profile{"x", 3, 1};
        CHECK(synth_host(profile, kVictim, 21, 0).empty());
    }
}

TEST_CASE("generation is deterministic in the seed") {
    HostProfile profile{"host", 3, 99};
    auto a = synth_host(profile, kVictim, 25, 20);
    auto b = synth_host(profile, kVictim, 25, 20);
    CHECK(a == b);

    std::ostringstream sa, sb;
    write_events(sa, a);
    write_events(sb, b);
    CHECK(sa.str() == sb.str());

    HostProfile reseeded{"host", 3, 100};
    CHECK(synth_host(reseeded, kVictim, 25, 20) != a);
}

TEST_CASE("synth -> serialize -> parse -> bin reproduces the configured rates") {
    auto profiles = default_lab_profiles();
    REQUIRE(profiles.size() == 5);
    std::vector<std::uint32_t> rates;
    for (const auto& p : profiles) rates.push_back(p.rate);
    CHECK(rates == std::vector<std::uint32_t>{3, 3, 3, 1, 1});

    std::uint16_t ports[] = {21, 53, 110, 135, 139};
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto events = synth_host(profiles[i], kVictim, ports[i], 15);

        std::ostringstream out;
        write_events(out, events);
        std::istringstream in(out.str());
        auto parsed = read_events(in);
        CHECK(parsed == events);

        auto bins = bin_per_second(parsed);
        REQUIRE(bins.size() == 15);
        for (const auto& bin : bins) CHECK(bin.count == profiles[i].rate);
    }
}

TEST_CASE("attack injection") {
    SUBCASE("seventy per second on a quiet background") {
        auto events = inject_attack({}, 70, kVictim, 25, 100, 1);
        auto bins = bin_per_second(events);
        REQUIRE(bins.size() == 1);
        CHECK(bins[0] == SecondBin{100, kVictim, 25, 70});
    }
    SUBCASE("rate zero changes nothing") {
        auto background = synth_host({"h", 2, 5}, kVictim, 21, 10);
        CHECK(inject_attack(background, 0, kVictim, 25, 3, 2) == background);
    }
    SUBCASE("conservation and order on random backgrounds") {
        for (std::uint32_t rate : {1u, 7u, 70u}) {
            auto background = synth_host({"bg", 3, 7}, kVictim, 21, 30);
            auto merged = inject_attack(background, rate, kVictim, 25, 10, 5);
            CHECK(merged.size() == background.size() + rate * 5);
            CHECK(sorted_by_time(merged));

            auto bins = bin_per_second(merged);
            for (const auto& bin : bins) {
                if (bin.port != 25) continue;
                CHECK(bin.second >= 10);
                CHECK(bin.second < 15);
                CHECK(bin.count == rate);
            }
        }
    }
}

TEST_CASE("scenario files") {
    SUBCASE("full scenario parses and runs") {
        std::istringstream in(R"({
            "duration": 20, "victim": "10.0.0.2",
            "hosts": [
                {"name": "a", "rate": 3, "port": 21, "seed": 1},
                {"name": "b", "rate": 1, "port": 53, "seed": 2}
            ],
            "attacks": [{"rate": 10, "port": 25, "start": 5, "span": 2}]
        })");
        Scenario scenario = parse_scenario(in);
        CHECK(scenario.duration_s == 20);
        CHECK(scenario.victim_ip == kVictim);
        REQUIRE(scenario.hosts.size() == 2);
        CHECK(scenario.hosts[1].profile.rate == 1);
        REQUIRE(scenario.attacks.size() == 1);

        auto events = run_scenario(scenario);
        CHECK(events.size() == 20 * 3 + 20 * 1 + 10 * 2);
        CHECK(sorted_by_time(events));
    }
    SUBCASE("missing or bad fields") {
        std::istringstream no_victim(R"({"duration": 5})");
        CHECK_THROWS_AS(parse_scenario(no_victim), ParseError);
        std::istringstream bad_rate(
            R"({"duration": 5, "victim": "10.0.0.2", "hosts": [{"name": "a", "rate": -1, "port": 21}]})");
        CHECK_THROWS_AS(parse_scenario(bad_rate), ParseError);
        std::istringstream not_json("nope");
        CHECK_THROWS_AS(parse_scenario(not_json), ParseError);
    }
}
