#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "translim/error.hpp"
#include "translim/ingest.hpp"

using namespace translim;

namespace {

const char* kHeader = "account_id,ts,amount,mcc_category,status,decline_reason\n";

LoadResult parse(const std::string& body) {
    std::istringstream in(std::string(kHeader) + body);
    return parse_transactions(in);
}

TransactionRecord purchase(double t_secs, double amount, std::string category = "supermarket") {
    TransactionRecord r;
    r.account_id = "A";
    r.timestamp = t_secs;
    r.amount = amount;
    r.merchant_category = std::move(category);
    return r;
}

std::vector<SeriesPoint> unit_gaps(std::size_t n) {
    std::vector<SeriesPoint> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back({static_cast<double>(i), 10.0 + static_cast<double>(i % 7)});
    return s;
}

std::vector<double> gamma_sample(double shape, double rate, std::size_t n) {
    // Deterministic quantile sample; its empirical law tracks the Gamma law.
    boost::math::gamma_distribution<> g(shape, 1.0 / rate);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(quantile(g, (i + 0.5) / n));
    return v;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("csv tokenizer") {
    const auto rows = parse_csv("\xEF\xBB\xBF" "a,b\n\"x, y\",\"he said \"\"hi\"\"\"\n\n\"two\nlines\",z\r\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fields == std::vector<std::string>{"a", "b"});
    CHECK(rows[1].fields == std::vector<std::string>{"x, y", "he said \"hi\""});
    CHECK(rows[2].line == 4);
    CHECK(rows[2].fields == std::vector<std::string>{"two\nlines", "z"});
}

TEST_CASE("timestamps") {
    CHECK(parse_timestamp("1297123200") == 1297123200.0);
    CHECK(parse_timestamp("2011-02-08T00:00:00Z") == 1297123200.0);
    CHECK(parse_timestamp("2011-02-08 01:30:00") == 1297123200.0 + 5400.0);
    CHECK(parse_timestamp("2012-03-01T00:00:00Z") == 1330560000.0);
    CHECK_FALSE(parse_timestamp("yesterday").has_value());
    CHECK_FALSE(parse_timestamp("2011-13-01T00:00:00Z").has_value());
}

TEST_CASE("transaction rows") {
    SUBCASE("header only") {
        const auto r = parse("");
        CHECK(r.records.empty());
        CHECK(r.errors.empty());
    }
    SUBCASE("three rows, sorted by time") {
        const auto r = parse(
            "A,1297123300,12.50,supermarket,approved,\n"
            "A,1297123200,40.00,fuel,approved,\n"
            "A,1297123400,9.99,supermarket,declined,insufficient_funds\n");
        REQUIRE(r.records.size() == 3);
        CHECK(r.records[0].amount == 40.0);
        CHECK(r.records[2].status == TxStatus::Declined);
        CHECK(r.records[2].decline_reason == std::optional<std::string>("insufficient_funds"));
    }
    SUBCASE("malformed amount is reported and skipped") {
        const auto r = parse(
            "A,1297123200,12.50,supermarket,approved,\n"
            "A,1297123300,twelve,supermarket,approved,\n"
            "A,1297123400,3.00,supermarket,approved,\n");
        CHECK(r.records.size() == 2);
        REQUIRE(r.errors.size() == 1);
        CHECK(r.errors[0].line == 3);
    }
    SUBCASE("refunds are counted, not loaded") {
        const auto r = parse("A,1297123200,-5.00,supermarket,approved,\nA,1297123300,0,supermarket,approved,\n");
        CHECK(r.records.empty());
        CHECK(r.skipped_non_purchases == 2);
    }
    SUBCASE("missing column") {
        std::istringstream in("account_id,ts,amount\nA,1,2\n");
        CHECK(code_of([&] { parse_transactions(in); }) == ErrorCode::SchemaMismatch);
    }
    SUBCASE("missing file") {
        CHECK(code_of([] { load_transactions("/nonexistent/tx.csv"); }) == ErrorCode::FileNotFound);
    }
}

TEST_CASE("csv writer round trip") {
    SyntheticConfig cfg;
    cfg.purchases = 40;
    const auto records = synthesize_transactions(cfg);
    std::stringstream buf;
    write_transactions_csv(buf, records);
    const auto back = parse_transactions(buf);
    REQUIRE(back.errors.empty());
    REQUIRE(back.records.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back.records[i].timestamp == records[i].timestamp);
        CHECK(back.records[i].amount == doctest::Approx(records[i].amount).epsilon(1e-12));
        CHECK(back.records[i].merchant_category == records[i].merchant_category);
    }
}

TEST_CASE("series preparation") {
    SeriesFilter f;
    f.category = "Supermarket";

    SUBCASE("half an hour apart merges") {
        std::vector<TransactionRecord> r{purchase(0, 10), purchase(1800, 5), purchase(86400, 7)};
        const auto s = prepare_series(r, f);
        REQUIRE(s.size() == 2);
        CHECK(s[0].value == 15.0);
        CHECK(s[0].time_days == 0.0);
        CHECK(s[1].time_days == 1.0);
    }
    SUBCASE("two hours apart stays separate") {
        std::vector<TransactionRecord> r{purchase(0, 10), purchase(7200, 5)};
        CHECK(prepare_series(r, f).size() == 2);
    }
    SUBCASE("chains through consecutive members") {
        std::vector<TransactionRecord> r{purchase(0, 1), purchase(3000, 2), purchase(6000, 3)};
        const auto s = prepare_series(r, f);
        REQUIRE(s.size() == 1);
        CHECK(s[0].value == 6.0);
    }
    SUBCASE("zero window is the identity") {
        f.cluster_window_secs = 0.0;
        std::vector<TransactionRecord> r{purchase(0, 10), purchase(60, 5), purchase(120, 1)};
        CHECK(prepare_series(r, f).size() == 3);
    }
    SUBCASE("filters categories and non-customer declines") {
        auto pos = purchase(500000, 99);
        pos.status = TxStatus::Declined;
        pos.decline_reason = "POS_ERROR";
        auto funds = purchase(600000, 4);
        funds.status = TxStatus::Declined;
        funds.decline_reason = "insufficient_funds";
        std::vector<TransactionRecord> r{purchase(0, 10), purchase(100000, 50, "fuel"), pos, funds};
        const auto s = prepare_series(r, f);
        REQUIRE(s.size() == 2);
        CHECK(s[1].value == 4.0);
    }
    SUBCASE("nothing left") {
        std::vector<TransactionRecord> r{purchase(0, 10, "fuel")};
        CHECK(code_of([&] { prepare_series(r, f); }) == ErrorCode::EmptySeriesAfterFilter);
    }
    SUBCASE("clustering conserves money") {
        SyntheticConfig cfg;
        const auto records = synthesize_transactions(cfg);
        f.cluster_window_secs = 0.0;
        const auto raw = prepare_series(records, f);
        f.cluster_window_secs = 3600.0;
        const auto merged = prepare_series(records, f);
        auto total = [](const auto& s) {
            return std::accumulate(s.begin(), s.end(), 0.0, [](double a, const SeriesPoint& p) { return a + p.value; });
        };
        CHECK(merged.size() < raw.size());
        CHECK(total(merged) == doctest::Approx(total(raw)).epsilon(1e-12));
    }
}

TEST_CASE("interarrival rate") {
    const auto e = fit_interarrival(unit_gaps(11));
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.se == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));

    // 305 gaps at the fitted customer's rate.
    std::vector<SeriesPoint> s;
    for (int i = 0; i <= 305; ++i) s.push_back({i / 0.6451, 1.0});
    CHECK(std::abs(fit_interarrival(s).se - 0.0369) < 5e-5);

    CHECK(code_of([] { fit_interarrival(unit_gaps(1)); }) == ErrorCode::InsufficientData);
}

TEST_CASE("gamma maximum likelihood") {
    const auto v = gamma_sample(2.8946, 0.0769, 305);
    const auto fit = fit_gamma_mle(v);
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double mean_log = 0.0;
    for (double x : v) mean_log += std::log(x) / n;
    // Both score equations vanish at the estimate.
    CHECK(fit.shape.value / fit.rate.value == doctest::Approx(mean).epsilon(1e-10));
    CHECK(std::log(fit.shape.value) - boost::math::digamma(fit.shape.value) ==
          doctest::Approx(std::log(mean) - mean_log).epsilon(1e-9));
    CHECK(std::abs(fit.shape.value - 2.8946) < 3 * fit.shape.se);
    CHECK(std::abs(fit.rate.value - 0.0769) < 3 * fit.rate.se);
    CHECK(fit.shape.se > 0.0);

    SUBCASE("scale equivariance") {
        std::vector<double> scaled;
        for (double x : v) scaled.push_back(4.0 * x);
        const auto fs = fit_gamma_mle(scaled);
        CHECK(fs.shape.value == doctest::Approx(fit.shape.value).epsilon(1e-9));
        CHECK(fs.rate.value == doctest::Approx(fit.rate.value / 4.0).epsilon(1e-9));
    }
    SUBCASE("degenerate inputs") {
        const std::vector<double> same(20, 7.0);
        CHECK(code_of([&] { fit_gamma_mle(same); }) == ErrorCode::NoConvergence);
        std::vector<double> neg(v.begin(), v.begin() + 20);
        neg[3] = -1.0;
        CHECK(code_of([&] { fit_gamma_mle(neg); }) == ErrorCode::NonPositiveValue);
        CHECK(code_of([&] { fit_gamma_mle(std::vector<double>(v.begin(), v.begin() + 5)); }) ==
              ErrorCode::InsufficientData);
    }
}

TEST_CASE("kolmogorov-smirnov") {
    CHECK(kolmogorov_q(0.0) == 1.0);
    CHECK(kolmogorov_q(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436).epsilon(1e-8));
    CHECK(kolmogorov_q(5.0) < 1e-20);

    const auto dist = DistributionSpec::gamma(2.0, 0.1, DistRole::Mark);
    boost::math::gamma_distribution<> g(2.0, 10.0);
    CHECK(ks_test(std::vector<double>{median(g)}, dist).statistic == doctest::Approx(0.5).epsilon(1e-12));

    const auto q = gamma_sample(2.0, 0.1, 200);
    const auto r = ks_test(q, dist);
    CHECK(r.statistic == doctest::Approx(0.5 / 200).epsilon(1e-9));
    CHECK(r.p_value > 0.999);

    std::vector<double> scaled;
    for (double x : q) scaled.push_back(3.0 * x);
    const auto rs = ks_test(scaled, DistributionSpec::gamma(2.0, 0.1 / 3.0, DistRole::Mark));
    CHECK(rs.statistic == doctest::Approx(r.statistic).epsilon(1e-9));

    // A wrong law is rejected.
    CHECK(ks_test(q, DistributionSpec::exponential(0.1, DistRole::Mark)).p_value < 0.01);
}

TEST_CASE("synthetic recovery and fit report") {
    SyntheticConfig cfg;
    SeriesFilter f;
    f.category = cfg.category;
    const auto series = prepare_series(synthesize_transactions(cfg), f);
    const auto rep = fit_series(series);
    // About 2.6% of genuine gaps fall inside the hour window and fuse.
    CHECK(rep.n_obs <= 306);
    CHECK(rep.n_obs >= 290);
    CHECK(std::abs(rep.lambda.value - cfg.arrival_rate) < 3 * rep.lambda.se);
    CHECK(std::abs(rep.shape.value - cfg.shape) < 3 * rep.shape.se);
    CHECK(std::abs(rep.rate.value - cfg.rate) < 3 * rep.rate.se);

    const auto j = rep.to_json();
    for (const char* key : {"lambda_hat", "lambda_se", "shape_hat", "shape_se", "rate_hat", "rate_se", "ks_d",
                            "ks_p", "n_obs"}) {
        CHECK(j.contains(key));
    }
    const auto back = FitReport::from_json(j);
    CHECK(back.shape.value == rep.shape.value);
    CHECK(back.mark_dist().kind() == DistKind::Gamma);
    CHECK(back.arrival_dist().rate() == rep.lambda.value);
    CHECK(code_of([] { FitReport::from_json(nlohmann::json{{"lambda_hat", 1.0}}); }) == ErrorCode::SchemaMismatch);
}
