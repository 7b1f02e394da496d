#include "fastguard/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <istream>
#include <random>
#include <utility>

namespace fastguard {

namespace {

// Fixed single source for injected attack traffic (TEST-NET-3).
constexpr std::uint32_t kAttackerIp = 0xcb007142;  // 203.0.113.66

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace

std::vector<HostProfile> default_lab_profiles() {
    return {
        {"windows_xp_sp2_fresh", 3, 11},
        {"windows_vista", 3, 12},
        {"windows_xp_sp2", 3, 13},
        {"linux_centos_4_4", 1, 14},
        {"solaris_10", 1, 15},
    };
}

std::uint32_t profile_source_ip(const HostProfile& profile) {
    return 0x0a000000u | static_cast<std::uint32_t>(fnv1a64(profile.name) & 0x00ffffffu);
}

std::vector<ConnectionEvent> synth_host(const HostProfile& profile, std::uint32_t victim_ip,
                                        std::uint16_t port, std::uint32_t duration_s) {
    std::vector<ConnectionEvent> events;
    events.reserve(static_cast<std::size_t>(profile.rate) * duration_s);

    std::mt19937_64 rng(profile.jitter_seed);
    std::uniform_int_distribution<Micros> offset(0, kMicrosPerSecond - 1);
    std::uniform_int_distribution<std::uint16_t> ephemeral(49152, 65535);
    std::uint32_t src_ip = profile_source_ip(profile);

    for (std::uint32_t sec = 0; sec < duration_s; ++sec) {
        std::vector<std::pair<Micros, std::uint16_t>> slots;
        slots.reserve(profile.rate);
        for (std::uint32_t i = 0; i < profile.rate; ++i)
            slots.emplace_back(offset(rng), ephemeral(rng));
        std::sort(slots.begin(), slots.end());
        for (const auto& [off, sport] : slots)
            events.push_back({static_cast<Micros>(sec) * kMicrosPerSecond + off, src_ip,
                              victim_ip, Protocol::tcp, sport, port, tcp_flags::syn});
    }
    return events;
}

std::vector<ConnectionEvent> inject_attack(std::vector<ConnectionEvent> background,
                                           std::uint32_t rate, std::uint32_t victim_ip,
                                           std::uint16_t port, std::int64_t start_s,
                                           std::uint32_t span_s) {
    if (rate == 0 || span_s == 0) return background;

    background.reserve(background.size() + static_cast<std::size_t>(rate) * span_s);
    Micros spacing = kMicrosPerSecond / rate;  // evenly spaced within each second
    for (std::uint32_t s = 0; s < span_s; ++s) {
        Micros base = (start_s + s) * kMicrosPerSecond;
        for (std::uint32_t i = 0; i < rate; ++i) {
            std::uint16_t sport = static_cast<std::uint16_t>(40000 + i % 16384);
            background.push_back({base + static_cast<Micros>(i) * spacing, kAttackerIp,
                                  victim_ip, Protocol::tcp, sport, port, tcp_flags::syn});
        }
    }
    std::stable_sort(background.begin(), background.end(),
                     [](const ConnectionEvent& a, const ConnectionEvent& b) {
                         return a.ts_us < b.ts_us;
                     });
    return background;
}

Scenario parse_scenario(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed scenario JSON");

    auto get_uint = [](const nlohmann::json& obj, const char* key) -> std::uint64_t {
        if (!obj.contains(key) || !obj[key].is_number_integer() || obj[key].get<std::int64_t>() < 0)
            throw ParseError(std::string("scenario: missing or invalid \"") + key + "\"");
        return obj[key].get<std::uint64_t>();
    };

    Scenario scenario;
    scenario.duration_s = static_cast<std::uint32_t>(get_uint(doc, "duration"));
    if (!doc.contains("victim") || !doc["victim"].is_string())
        throw ParseError("scenario: missing \"victim\"");
    auto victim = parse_ipv4(doc["victim"].get_ref<const std::string&>());
    if (!victim) throw ParseError("scenario: invalid \"victim\" address");
    scenario.victim_ip = *victim;

    if (doc.contains("hosts")) {
        if (!doc["hosts"].is_array()) throw ParseError("scenario: \"hosts\" must be an array");
        for (const auto& h : doc["hosts"]) {
            if (!h.is_object() || !h.contains("name") || !h["name"].is_string())
                throw ParseError("scenario: each host needs a \"name\"");
            ScenarioHost host;
            host.profile.name = h["name"].get<std::string>();
            host.profile.rate = static_cast<std::uint32_t>(get_uint(h, "rate"));
            host.profile.jitter_seed = h.contains("seed") ? get_uint(h, "seed") : 0;
            host.port = static_cast<std::uint16_t>(get_uint(h, "port"));
            scenario.hosts.push_back(std::move(host));
        }
    }
    if (doc.contains("attacks")) {
        if (!doc["attacks"].is_array()) throw ParseError("scenario: \"attacks\" must be an array");
        for (const auto& a : doc["attacks"]) {
            ScenarioAttack attack;
            attack.rate = static_cast<std::uint32_t>(get_uint(a, "rate"));
            attack.port = static_cast<std::uint16_t>(get_uint(a, "port"));
            attack.start_s = static_cast<std::int64_t>(get_uint(a, "start"));
            attack.span_s = static_cast<std::uint32_t>(get_uint(a, "span"));
            scenario.attacks.push_back(attack);
        }
    }
    return scenario;
}

std::vector<ConnectionEvent> run_scenario(const Scenario& scenario) {
    std::vector<ConnectionEvent> events;
    for (const auto& host : scenario.hosts) {
        auto stream = synth_host(host.profile, scenario.victim_ip, host.port, scenario.duration_s);
        std::vector<ConnectionEvent> merged;
        merged.reserve(events.size() + stream.size());
        std::merge(events.begin(), events.end(), stream.begin(), stream.end(),
                   std::back_inserter(merged),
                   [](const ConnectionEvent& a, const ConnectionEvent& b) {
                       return a.ts_us < b.ts_us;
                   });
        events = std::move(merged);
    }
    for (const auto& attack : scenario.attacks)
        events = inject_attack(std::move(events), attack.rate, scenario.victim_ip, attack.port,
                               attack.start_s, attack.span_s);
    return events;
}

}  // namespace fastguard
