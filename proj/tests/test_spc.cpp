#include "fastguard/spc.hpp"

#include "doctest.h"
#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace fastguard;
using namespace testutil;

namespace {

std::vector<VerdictStatus> statuses_of(const std::vector<Verdict>& verdicts) {
    std::vector<VerdictStatus> out;
    for (const auto& v : verdicts) out.push_back(v.status);
    return out;
}

std::vector<SecondBin> series_bins(const std::vector<std::uint64_t>& counts,
                                   std::uint16_t port = 25) {
    std::vector<SecondBin> bins;
    for (std::size_t i = 0; i < counts.size(); ++i)
        bins.push_back({static_cast<std::int64_t>(100 + i), 0x0a000002, port, counts[i]});
    return bins;
}

}  // namespace

TEST_CASE("control limits") {
    SUBCASE("constant series collapses the chart") {
        std::vector<double> series{4, 4, 4};
        for (double k : {1.0, 3.0, 5.5}) {
            auto limits = compute_limits(series, k);
            CHECK(limits.sigma == 0.0);
            CHECK(limits.ucl == 4.0);
            CHECK(limits.cl == 4.0);
            CHECK(limits.lcl == 4.0);
        }
    }
    SUBCASE("hand arithmetic with the n-1 divisor") {
        std::vector<double> series{1, 2, 3};
        auto limits = compute_limits(series, 3);
        CHECK(limits.mu == doctest::Approx(2.0));
        CHECK(limits.sigma == doctest::Approx(1.0));
        CHECK(limits.ucl == doctest::Approx(5.0));
        CHECK(limits.cl == doctest::Approx(2.0));
        CHECK(limits.lcl == 0.0);  // clamped from -1
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(compute_limits({}, 3), std::invalid_argument);
        std::vector<double> one{1.0};
        CHECK_THROWS_AS(compute_limits(one, 0), std::invalid_argument);
        CHECK_THROWS_AS(compute_limits(one, -1), std::invalid_argument);
        std::vector<double> nan{std::nan("")};
        CHECK_THROWS_AS(compute_limits(nan, 3), std::invalid_argument);
    }
    SUBCASE("single point gets sigma zero") {
        std::vector<double> one{7.0};
        auto limits = compute_limits(one, 3);
        CHECK(limits.sigma == 0.0);
        CHECK(limits.ucl == 7.0);
    }
    SUBCASE("matches the two-pass oracle on random series") {
        std::mt19937 rng(31);
        std::uniform_int_distribution<int> len(2, 500);
        std::uniform_int_distribution<int> value(0, 100);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> series;
            int n = len(rng);
            for (int i = 0; i < n; ++i) series.push_back(value(rng));
            auto limits = compute_limits(series, 3);
            auto [mean, stddev] = two_pass_mean_stddev(series);
            CHECK(limits.mu == doctest::Approx(mean).epsilon(1e-9));
            CHECK(limits.sigma == doctest::Approx(stddev).epsilon(1e-9));
            CHECK(limits.lcl >= 0.0);
            CHECK(limits.ucl - limits.cl == doctest::Approx(3 * limits.sigma).epsilon(1e-12));
        }
    }
}

TEST_CASE("western electric rules on known series") {
    ControlLimits limits;
    limits.cl = 0;
    limits.sigma = 1;
    limits.ucl = 3;
    limits.lcl = 0;

    SUBCASE("rule 1: one point beyond three sigma") {
        std::vector<double> series{0, 0, 3.5};
        auto verdicts = western_electric(series, limits);
        CHECK(statuses_of(verdicts) == std::vector<VerdictStatus>{VerdictStatus::in_control,
                                                                  VerdictStatus::in_control,
                                                                  VerdictStatus::rule1});
        CHECK(verdicts[2].sigma_distance == doctest::Approx(3.5));
    }
    SUBCASE("rule 2: two of three beyond two sigma") {
        std::vector<double> series{2.5, 0.1, 2.5};
        auto verdicts = western_electric(series, limits);
        CHECK(verdicts[0].status == VerdictStatus::in_control);
        CHECK(verdicts[1].status == VerdictStatus::in_control);
        CHECK(verdicts[2].status == VerdictStatus::rule2);
    }
    SUBCASE("rule 3: four of five at one sigma or beyond") {
        std::vector<double> series{1.5, 1.5, 1.5, 0.2, 1.5};
        auto verdicts = western_electric(series, limits);
        for (int i = 0; i < 4; ++i) CHECK(verdicts[i].status == VerdictStatus::in_control);
        CHECK(verdicts[4].status == VerdictStatus::rule3);
    }
    SUBCASE("rule 4 patterns stay in control") {
        ControlLimits shifted = limits;
        shifted.cl = 1;
        std::vector<double> series(8, 0.5);  // eight consecutive points below center
        for (auto side : {RuleSide::upper_only, RuleSide::two_sided})
            for (const auto& v : western_electric(series, shifted, side))
                CHECK(v.status == VerdictStatus::in_control);
    }
    SUBCASE("zone boundaries: beyond is strict, rule 3 distance is inclusive") {
        std::vector<double> exact3{3.0};
        CHECK(western_electric(exact3, limits)[0].status == VerdictStatus::in_control);
        std::vector<double> exact2{2.0, 2.0};
        CHECK(western_electric(exact2, limits)[1].status == VerdictStatus::in_control);
        std::vector<double> exact1{1.0, 1.0, 1.0, 1.0};
        CHECK(western_electric(exact1, limits)[3].status == VerdictStatus::rule3);
    }
    SUBCASE("lower-side patterns need the two-sided flag") {
        std::vector<double> series{-3.5, -2.5, -2.5};
        for (const auto& v : western_electric(series, limits, RuleSide::upper_only))
            CHECK(v.status == VerdictStatus::in_control);
        auto two = western_electric(series, limits, RuleSide::two_sided);
        CHECK(two[0].status == VerdictStatus::rule1);
        CHECK(two[2].status == VerdictStatus::rule2);
    }
    SUBCASE("all firing rules are retained; the lowest wins") {
        std::vector<double> series{1.5, 2.5, 2.5, 1.5, 3.5};
        auto verdicts = western_electric(series, limits);
        CHECK(verdicts[4].status == VerdictStatus::rule1);
        CHECK(verdicts[4].rules_fired == 0b111);
    }
}

TEST_CASE("degenerate sigma: only rule 1, straight off the center line") {
    ControlLimits limits;
    limits.cl = 2;
    limits.sigma = 0;
    limits.ucl = 2;
    limits.lcl = 2;

    std::vector<double> series{2, 2.0001, 1.5};
    auto upper = western_electric(series, limits, RuleSide::upper_only);
    CHECK(upper[0].status == VerdictStatus::in_control);
    CHECK(upper[1].status == VerdictStatus::rule1);
    CHECK(upper[2].status == VerdictStatus::in_control);
    CHECK(!upper[1].sigma_distance.has_value());

    auto two = western_electric(series, limits, RuleSide::two_sided);
    CHECK(two[2].status == VerdictStatus::rule1);
}

TEST_CASE("western electric matches the brute-force scanner on random charts") {
    std::mt19937 rng(37);
    std::uniform_int_distribution<int> len(1, 200);
    std::uniform_real_distribution<double> value(-1.0, 7.0);
    std::uniform_real_distribution<double> cl_pick(-2.0, 4.0);
    std::uniform_real_distribution<double> sigma_pick(0.2, 2.0);

    for (int trial = 0; trial < 300; ++trial) {
        int n = len(rng);
        std::vector<double> series;
        for (int i = 0; i < n; ++i) series.push_back(value(rng));

        ControlLimits limits;
        limits.cl = cl_pick(rng);
        limits.mu = limits.cl;
        limits.sigma = trial % 10 == 9 ? 0.0 : sigma_pick(rng);
        limits.ucl = limits.cl + 3 * limits.sigma;
        limits.lcl = std::max(0.0, limits.cl - 3 * limits.sigma);

        bool two_sided = trial % 2 == 1;
        auto side = two_sided ? RuleSide::two_sided : RuleSide::upper_only;
        CHECK(statuses_of(western_electric(series, limits, side)) ==
              brute_force_western_electric(series, limits.cl, limits.sigma, two_sided));
    }
}

TEST_CASE("classification against threshold and chart") {
    ThresholdConfig threshold{3, {}};

    SUBCASE("seventy connections in a second is over the threshold") {
        auto bins = series_bins({70});
        auto limits = compute_limits(counts_series(bins), 3);
        auto alerts = classify_fast_attack(bins, threshold, limits);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].trigger == VerdictStatus::over_threshold);
        CHECK(alerts[0].count == 70);
        CHECK(alerts[0].threshold == 3);
    }
    SUBCASE("exactly the threshold stays quiet; one more fires") {
        auto quiet = series_bins({3, 3, 3});
        auto limits = compute_limits(counts_series(quiet), 3);
        CHECK(classify_fast_attack(quiet, threshold, limits).empty());

        auto noisy = series_bins({3, 3, 4});
        limits = compute_limits(counts_series(noisy), 3);
        auto alerts = classify_fast_attack(noisy, threshold, limits);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].count == 4);
    }
    SUBCASE("rule-set selection") {
        auto bins = series_bins({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 9});
        auto limits = compute_limits(counts_series(bins), 3);

        auto both = classify_fast_attack(bins, threshold, limits, RuleSet::both);
        REQUIRE(both.size() == 1);
        CHECK(both[0].trigger == VerdictStatus::over_threshold);

        auto spc = classify_fast_attack(bins, threshold, limits, RuleSet::spc_only);
        REQUIRE(spc.size() == 1);
        CHECK(spc[0].trigger == VerdictStatus::rule1);

        ThresholdConfig high{100, {}};
        auto thr_only = classify_fast_attack(bins, high, limits, RuleSet::threshold_only);
        CHECK(thr_only.empty());
    }
    SUBCASE("limits may come from a designated baseline series") {
        std::vector<double> baseline{1, 2, 1, 2, 1, 2};
        auto prospective = compute_limits(baseline, 3);  // mu 1.5, sigma ~0.55

        auto bins = series_bins({1, 2, 1, 9});
        ThresholdConfig high{100, {}};
        auto alerts = classify_fast_attack(bins, high, prospective, RuleSet::spc_only);
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].trigger == VerdictStatus::rule1);
        CHECK(alerts[0].second == 103);
    }
    SUBCASE("mixed series are rejected") {
        std::vector<SecondBin> bins{{1, 1, 25, 1}, {1, 1, 53, 1}};
        std::vector<double> ones{1.0, 1.0};
        auto limits = compute_limits(ones, 3);
        CHECK_THROWS_AS(classify_fast_attack(bins, threshold, limits), std::invalid_argument);
    }
    SUBCASE("threshold rule is sound and complete") {
        std::mt19937 rng(41);
        std::uniform_int_distribution<std::uint64_t> count(0, 10);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::uint64_t> counts;
            for (int i = 0; i < 50; ++i) counts.push_back(count(rng));
            auto bins = series_bins(counts);
            auto limits = compute_limits(counts_series(bins), 3);
            auto alerts =
                classify_fast_attack(bins, threshold, limits, RuleSet::threshold_only);

            std::size_t expected = 0;
            for (auto c : counts)
                if (c > threshold.value) ++expected;
            CHECK(alerts.size() == expected);
            for (const auto& alert : alerts) {
                CHECK(alert.count > threshold.value);
                CHECK(alert.trigger == VerdictStatus::over_threshold);
            }
        }
    }
}

TEST_CASE("verdict statuses are invariant under shift and positive scaling") {
    std::mt19937 rng(43);
    std::uniform_int_distribution<int> len(2, 60);
    std::uniform_real_distribution<double> value(0.0, 20.0);
    std::uniform_real_distribution<double> shift(0.5, 50.0);
    std::uniform_real_distribution<double> scale(0.25, 8.0);

    for (int trial = 0; trial < 200; ++trial) {
        int n = len(rng);
        std::vector<double> series;
        for (int i = 0; i < n; ++i) series.push_back(value(rng));
        auto side = trial % 2 ? RuleSide::two_sided : RuleSide::upper_only;

        auto limits = compute_limits(series, 3);
        auto base = statuses_of(western_electric(series, limits, side));

        double c = shift(rng);
        std::vector<double> shifted;
        for (double x : series) shifted.push_back(x + c);
        auto shifted_limits = compute_limits(shifted, 3);
        CHECK(shifted_limits.mu == doctest::Approx(limits.mu + c).epsilon(1e-9));
        CHECK(shifted_limits.sigma == doctest::Approx(limits.sigma).epsilon(1e-9));
        CHECK(shifted_limits.ucl == doctest::Approx(limits.ucl + c).epsilon(1e-9));
        CHECK(statuses_of(western_electric(shifted, shifted_limits, side)) == base);

        double lambda = scale(rng);
        std::vector<double> scaled;
        for (double x : series) scaled.push_back(x * lambda);
        auto scaled_limits = compute_limits(scaled, 3);
        CHECK(scaled_limits.mu == doctest::Approx(limits.mu * lambda).epsilon(1e-9));
        CHECK(scaled_limits.sigma == doctest::Approx(limits.sigma * lambda).epsilon(1e-9));
        CHECK(statuses_of(western_electric(scaled, scaled_limits, side)) == base);

        CHECK(limits.lcl >= 0.0);
        CHECK(shifted_limits.lcl >= 0.0);
        CHECK(scaled_limits.lcl >= 0.0);
    }
}
