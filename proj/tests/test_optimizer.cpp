#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "reference_values.hpp"
#include "translim/error.hpp"
#include "translim/model.hpp"
#include "translim/optimizer.hpp"

using namespace translim;
using namespace translim::testing;

namespace {

ModelParams with_economics(const ModelParams& p, double gamma, double nu) {
    auto cfg = p.config();
    cfg.gamma_interchange = gamma;
    cfg.nu_funding = nu;
    return ModelParams(cfg);
}

double freeze_profit(const ModelParams& p, double l) {
    return expected_profit(make_query(p, l), PolicyKind::Freeze);
}

}  // namespace

TEST_CASE("freeze optimum on reference cells") {
    const auto small = optimal_limit_freeze(cpp_exp(1.0, 0.05));
    CHECK(small.status == SolveStatus::Interior);
    CHECK_FALSE(small.fallback_used);
    CHECK(std::abs(small.limit_star - 798.2182713702) < 0.01);

    const auto big = optimal_limit_freeze(cpp_exp(5.0, 0.01, 50000.0));
    CHECK(big.status == SolveStatus::Interior);
    CHECK(std::abs(big.limit_star - 17069.2578991332) < 0.20);

    const auto l20 = optimal_limit_freeze(cpp_exp(2.0, 1.0 / 20, 20000.0)).limit_star;
    const auto l40 = optimal_limit_freeze(cpp_exp(2.0, 1.0 / 40, 20000.0)).limit_star;
    CHECK(rel_err(l40, 2.0 * l20) < 1e-6);
}

TEST_CASE("first-order condition and local optimality") {
    for (const auto& p : {cpp_exp(1.0, 0.05), cpp_exp(3.0, 1.0 / 60, 20000.0), fitted_customer()}) {
        const auto r = optimal_limit_freeze(p);
        REQUIRE(r.status == SolveStatus::Interior);
        const double d = balance_derivative(make_query(p, r.limit_star));
        CHECK(std::abs(d - p.cost_ratio()) < 1e-6);
        // Central difference of the profit vanishes at the optimum.
        const double h = 0.5;
        const double slope = (freeze_profit(p, r.limit_star + h) - freeze_profit(p, r.limit_star - h)) / (2 * h);
        CHECK(std::abs(slope) < 1e-7);
        CHECK(r.profit_at_star >= freeze_profit(p, r.limit_star - 50.0));
        CHECK(r.profit_at_star >= freeze_profit(p, r.limit_star + 50.0));
        CHECK(r.profit_at_star > 0.0);
    }
}

TEST_CASE("newsvendor quantile") {
    const auto small = newsvendor_limit(cpp_exp(1.0, 0.05));
    CHECK(small.status == SolveStatus::Interior);
    CHECK(std::abs(small.limit_star - 776.78) < 0.02);
    CHECK(std::abs(small.decline_prob_at_star - 0.0007 / 0.0054) < 1e-6);

    const auto big = newsvendor_limit(cpp_exp(5.0, 0.01, 50000.0));
    CHECK(std::abs(big.limit_star - 16966.02) < 0.40);
    CHECK(std::abs(big.decline_prob_at_star - 0.0007 / 0.0054) < 1e-6);
}

TEST_CASE("retrial bounds") {
    const auto b = retrial_bounds(cpp_exp(1.0, 0.05));
    CHECK(b.lower < b.upper);
    CHECK(std::abs(b.gap - 21.44) < 0.03);
    CHECK(b.gap == doctest::Approx(b.upper - b.lower));

    const auto base = cpp_exp(2.0, 1.0 / 30, 20000.0);
    const auto b1 = retrial_bounds(base);
    const auto b3 = retrial_bounds(base.with_scaled_marks(3.0).with_limit_set(0.0, 60000.0));
    CHECK(rel_err(b3.lower, 3.0 * b1.lower) < 1e-6);
    CHECK(rel_err(b3.upper, 3.0 * b1.upper) < 1e-6);
    CHECK(std::abs(b3.freeze.decline_prob_at_star - b1.freeze.decline_prob_at_star) < 1e-8);
}

TEST_CASE("ordering across the reference grid") {
    std::vector<double> rates(std::begin(kRates), std::end(kRates));
    std::vector<double> means(std::begin(kMeans), std::end(kMeans));
    const auto cells = limit_grid(rates, means);
    REQUIRE(cells.size() == 25);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        REQUIRE(c.ok);
        CHECK(c.newsvendor.limit_star < c.freeze.limit_star);
        CHECK(c.freeze.decline_prob_at_star < 0.0007 / 0.0054);
        // Limits grow with the mean purchase along a row.
        if (i % 5 != 0) CHECK(c.freeze.limit_star > cells[i - 1].freeze.limit_star);
    }
}

TEST_CASE("evaluate at fixed limits") {
    const auto p = fitted_customer();
    const auto at1000 = evaluate_limit(p, 1000.0);
    CHECK(std::abs(at1000.decline_prob - 0.0857) < 5e-4);
    CHECK(at1000.expected_balance <= at1000.expected_min + 1e-9);
    CHECK(at1000.expected_profit_truncation >= at1000.expected_profit);

    const auto at5000 = evaluate_limit(p, 5000.0);
    CHECK(at5000.decline_prob < 1e-4);
    // Past saturation every extra dollar of limit only costs funding.
    const auto at4000 = evaluate_limit(p, 4000.0);
    CHECK((at5000.expected_profit - at4000.expected_profit) / 1000.0 ==
          doctest::Approx(-p.nu_funding()).epsilon(1e-4));

    const auto at0 = evaluate_limit(p, 0.0);
    CHECK(at0.expected_balance == 0.0);
    CHECK(at0.decline_prob == doctest::Approx(-std::expm1(-0.6451 * 30.0)));
    CHECK_THROWS_AS(evaluate_limit(p, -1.0), Error);
}

TEST_CASE("revised limit rounds to the more profitable multiple") {
    const auto p = fitted_customer();
    const auto r = optimal_limit_freeze(p);
    CHECK(revised_limit(p, r.limit_star) == 1000.0);
    CHECK(revised_limit(p, 1500.0) == 1500.0);
    CHECK(revised_limit(p, 120.0) == 500.0);
    CHECK_THROWS_AS(revised_limit(p, 900.0, 0.0), Error);
}

TEST_CASE("boundary outcomes") {
    SUBCASE("funding at least as costly as interchange") {
        const auto p = with_economics(cpp_exp(1.0, 0.05), 0.0054, 0.0054);
        const auto r = optimal_limit_freeze(p);
        CHECK(r.status == SolveStatus::LowerBoundary);
        CHECK(r.limit_star == 0.0);
        CHECK_FALSE(r.warning.empty());
        try {
            (void)newsvendor_limit(p);
            FAIL("expected RatioUnattainable");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RatioUnattainable);
        }
    }
    SUBCASE("limit set ends before the optimum") {
        const auto p = cpp_exp(1.0, 0.05, 400.0);
        const auto r = optimal_limit_freeze(p);
        CHECK(r.status == SolveStatus::UpperBoundary);
        CHECK(r.limit_star == 400.0);
        CHECK(r.warning.find("RootNotBracketed") != std::string::npos);
        const auto n = newsvendor_limit(p);
        CHECK(n.status == SolveStatus::UpperBoundary);
    }
    SUBCASE("limit set starts past the optimum") {
        const auto p = cpp_exp(1.0, 0.05).with_limit_set(2000.0, 5000.0);
        const auto r = optimal_limit_freeze(p);
        CHECK(r.status == SolveStatus::LowerBoundary);
        CHECK(r.limit_star == 2000.0);
        CHECK(newsvendor_limit(p).status == SolveStatus::LowerBoundary);
    }
}

TEST_CASE("status names") {
    CHECK(to_string(SolveStatus::Interior) == "interior");
    CHECK(to_string(SolveStatus::LowerBoundary) == "lower_boundary");
    CHECK(to_string(SolveStatus::UpperBoundary) == "upper_boundary");
}
