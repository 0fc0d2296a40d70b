#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "translim/error.hpp"
#include "translim/random.hpp"
#include "translim/simulator.hpp"

using namespace translim;
using namespace translim::testing;

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using B = PhiloxEngine::block_type;
    using K = PhiloxEngine::key_type;
    CHECK(PhiloxEngine::bijection(B{0, 0, 0, 0}, K{0, 0}) ==
          B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(PhiloxEngine::bijection(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                  K{0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(PhiloxEngine::bijection(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  K{0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams are reproducible and distinct") {
    PhiloxEngine a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_stream = false, differs_seed = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs_stream |= x != c();
        differs_seed |= x != d();
    }
    CHECK(differs_stream);
    CHECK(differs_seed);
    PhiloxEngine u(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform_open();
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
        sum += v;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("simulate_policy is bit-reproducible and thread-count independent") {
    const auto p = cpp_exp(1.0, 0.05);
    const auto a = simulate_policy(p, 798.218, PolicyKind::Freeze, 50000, 99);
    set_simulation_threads(3);
    const auto b = simulate_policy(p, 798.218, PolicyKind::Freeze, 50000, 99);
    set_simulation_threads(0);
    CHECK(a.mean_balance == b.mean_balance);
    CHECK(a.std_err == b.std_err);
    CHECK(a.decline_frequency == b.decline_frequency);
    CHECK(a.mean_undershoot_given_exceed == b.mean_undershoot_given_exceed);
    CHECK(a.replications == 50000);
    CHECK(a.seed == 99);
    const auto c = simulate_policy(p, 798.218, PolicyKind::Freeze, 50000, 100);
    CHECK(a.mean_balance != c.mean_balance);
}

TEST_CASE("a limit that never binds makes all policies agree with the mean spend") {
    const auto p = cpp_exp(1.0, 0.05);
    const auto f = simulate_policy(p, 1e9, PolicyKind::Freeze, 200000, 5);
    const auto r = simulate_policy(p, 1e9, PolicyKind::Retrial, 200000, 5);
    const auto t = simulate_policy(p, 1e9, PolicyKind::NewsvendorTruncation, 200000, 5);
    CHECK(f.mean_balance == r.mean_balance);
    CHECK(f.mean_balance == t.mean_balance);
    CHECK(f.decline_frequency == 0.0);
    CHECK(std::abs(f.mean_balance - 600.0) < 3.0 * f.std_err);
}

TEST_CASE("pathwise policy ordering and freeze/truncation identities") {
    const auto p = cpp_exp(1.0, 0.05);
    const double limit = 600.0;
    const auto paths = simulate_paths(p, limit, 100000, 11);
    std::size_t exceeded = 0;
    for (const auto& x : paths) {
        REQUIRE(x.freeze <= x.retrial);
        REQUIRE(x.retrial <= x.truncation);
        REQUIRE(x.freeze <= limit);
        if (x.attempted >= limit) REQUIRE(x.truncation == limit);
        if (!x.exceeded) REQUIRE(x.freeze == x.attempted);
        exceeded += x.exceeded;
    }
    CHECK(exceeded > 0);

    const auto f = simulate_policy(p, limit, PolicyKind::Freeze, 100000, 11);
    const auto r = simulate_policy(p, limit, PolicyKind::Retrial, 100000, 11);
    const auto t = simulate_policy(p, limit, PolicyKind::NewsvendorTruncation, 100000, 11);
    CHECK(f.mean_balance <= r.mean_balance);
    CHECK(r.mean_balance <= t.mean_balance);
    CHECK(f.decline_frequency == r.decline_frequency);
    CHECK(t.mean_undershoot_given_exceed == doctest::Approx(0.0));
    CHECK(f.mean_undershoot_given_exceed > r.mean_undershoot_given_exceed);
}

TEST_CASE("aggregate tail frequency") {
    const auto p = cpp_exp(1.0, 0.05);
    const std::uint64_t n = 1000000;
    const double freq = simulate_aggregate_tail(p, 798.218, n, 2024);
    const double se = std::sqrt(0.1059 * (1 - 0.1059) / n);
    CHECK(std::abs(freq - 0.1059165813) < 3.0 * se);

    // l = 0: any purchase at all.
    const auto sparse = cpp_exp(0.05, 0.05);
    const double void_prob = std::exp(-0.05 * 30.0);
    const double f0 = simulate_aggregate_tail(sparse, 0.0, 200000, 3);
    CHECK(std::abs(f0 - (1.0 - void_prob)) < 3.0 * std::sqrt(void_prob * (1 - void_prob) / 200000));
}

TEST_CASE("scaling purchase sizes and the limit together keeps the exceedance frequency") {
    const auto p = fitted_customer();
    const double base = simulate_aggregate_tail(p, 950.0, 100000, 8);
    for (double alpha : {0.5, 2.0, 3.0}) {
        CHECK(simulate_aggregate_tail(p.with_scaled_marks(alpha), 950.0 * alpha, 100000, 8) == base);
    }
}

TEST_CASE("non-Poisson arrivals simulate") {
    auto c = cpp_exp(1.0, 0.05).config();
    c.arrival = DistributionSpec::deterministic(1.0, DistRole::InterArrival);
    const ModelParams daily(c);
    // Exactly 30 purchases in (0, 30].
    const auto paths = simulate_paths(daily, 1e9, 1000, 1);
    const auto t = simulate_policy(daily, 1e9, PolicyKind::Freeze, 100000, 1);
    CHECK(std::abs(t.mean_balance - 600.0) < 3.0 * t.std_err);
    CHECK(paths.size() == 1000);
}

TEST_CASE("retrial optimum on a grid") {
    const auto p = cpp_exp(1.0, 0.05);
    const double single[] = {800.0};
    CHECK(estimate_retrial_optimum(p, single, 1000, 1) == 800.0);

    std::vector<double> grid;
    for (double l = 700.0; l <= 880.0; l += 5.0) grid.push_back(l);
    const auto curve = retrial_profit_curve(p, grid, 100000, 17);
    REQUIRE(curve.size() == grid.size());
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].mean_balance >= curve[i - 1].mean_balance);
    const double best = estimate_retrial_optimum(p, grid, 100000, 17);
    // Newsvendor and freeze optima with a Monte-Carlo band.
    CHECK(best >= 776.78 - 25.0);
    CHECK(best <= 798.22 + 25.0);
}

TEST_CASE("simulator error channels") {
    const auto p = cpp_exp(1.0, 0.05);
    try {
        (void)simulate_policy(p, 100.0, PolicyKind::Freeze, 0, 1);
        FAIL("expected InvalidReplications");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidReplications);
    }
    try {
        (void)estimate_retrial_optimum(p, std::span<const double>{}, 10, 1);
        FAIL("expected EmptyGrid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyGrid);
    }
    CHECK_THROWS_AS((void)simulate_policy(p, 0.0, PolicyKind::Freeze, 10, 1), Error);
}
