#pragma once

#include "fastguard/events.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fastguard {

/// A source host emitting a fixed number of connections per second toward
/// a victim. The seed fixes sub-second placement, so identical parameters
/// reproduce an identical event stream.
struct HostProfile {
    std::string name;
    std::uint32_t rate = 0;  // connections per second
    std::uint64_t jitter_seed = 0;
};

/// The five lab host stacks used for threshold calibration: three Windows
/// stacks at 3 connections per second, Linux and Solaris at 1.
std::vector<HostProfile> default_lab_profiles();

/// Source address a profile transmits from (stable hash of the name into
/// 10.0.0.0/8).
std::uint32_t profile_source_ip(const HostProfile& profile);

/// Exactly profile.rate TCP SYN events toward victim:port in every second
/// of [0, duration_s), timestamp-sorted.
std::vector<ConnectionEvent> synth_host(const HostProfile& profile, std::uint32_t victim_ip,
                                        std::uint16_t port, std::uint32_t duration_s);

/// Add `rate` events per second from one synthetic source for
/// [start_s, start_s + span_s), keeping the merged stream sorted.
std::vector<ConnectionEvent> inject_attack(std::vector<ConnectionEvent> background,
                                           std::uint32_t rate, std::uint32_t victim_ip,
                                           std::uint16_t port, std::int64_t start_s,
                                           std::uint32_t span_s);

struct ScenarioHost {
    HostProfile profile;
    std::uint16_t port = 0;
};

struct ScenarioAttack {
    std::uint32_t rate = 0;
    std::uint16_t port = 0;
    std::int64_t start_s = 0;
    std::uint32_t span_s = 0;
};

struct Scenario {
    std::uint32_t duration_s = 0;
    std::uint32_t victim_ip = 0;
    std::vector<ScenarioHost> hosts;
    std::vector<ScenarioAttack> attacks;
};

/// Scenario description, JSON:
///   {"duration": 300, "victim": "10.0.0.2",
///    "hosts": [{"name": "windows_xp_sp2", "rate": 3, "port": 21, "seed": 11}],
///    "attacks": [{"rate": 70, "port": 25, "start": 120, "span": 5}]}
/// Throws ParseError on malformed input.
Scenario parse_scenario(std::istream& in);

std::vector<ConnectionEvent> run_scenario(const Scenario& scenario);

}  // namespace fastguard
