#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "translim/distribution.hpp"

namespace translim {

enum class TxStatus { Approved, Declined };

struct TransactionRecord {
    std::string account_id;
    double timestamp = 0.0;  // seconds since the Unix epoch
    double amount = 0.0;     // dollars
    std::string merchant_category;
    TxStatus status = TxStatus::Approved;
    std::optional<std::string> decline_reason;
};

// Column names of the transaction CSV.
struct CsvSchema {
    std::string account_id = "account_id";
    std::string timestamp = "ts";
    std::string amount = "amount";
    std::string category = "mcc_category";
    std::string status = "status";
    std::string decline_reason = "decline_reason";
};

struct RowError {
    std::size_t line = 0;  // 1-based physical line where the row starts
    std::string message;
};

struct LoadResult {
    std::vector<TransactionRecord> records;  // sorted by timestamp
    std::vector<RowError> errors;
    std::size_t skipped_non_purchases = 0;  // rows with amount <= 0
};

// RFC 4180 rows of a CSV document, each tagged with its starting line.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);

// Parses "1297123200", "1297123200.5", "2011-02-08T00:00:00Z" or
// "2011-02-08 00:00:00" (UTC) into epoch seconds.
std::optional<double> parse_timestamp(std::string_view text);

LoadResult parse_transactions(std::istream& in, const CsvSchema& schema = {});
LoadResult load_transactions(const std::filesystem::path& path, const CsvSchema& schema = {});

void write_transactions_csv(std::ostream& out, std::span<const TransactionRecord> records,
                            const CsvSchema& schema = {});

struct SeriesFilter {
    std::optional<std::string> category;
    std::optional<std::string> account;
    // Declines with these reasons are not attempted purchases by the
    // customer and are dropped; other declines (insufficient funds) stay.
    std::vector<std::string> excluded_decline_reasons{"pos_error", "incorrect_pin"};
    double cluster_window_secs = 3600.0;
};

struct SeriesPoint {
    double time_days = 0.0;  // since the first retained purchase
    double value = 0.0;
};

// Filters records and merges purchases closer than the cluster window to the
// previous member of the current cluster. A merged purchase keeps the time
// of its first member and the total value.
std::vector<SeriesPoint> prepare_series(std::span<const TransactionRecord> records,
                                        const SeriesFilter& filter);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

// Exponential inter-purchase rate: reciprocal mean gap, SE = rate / sqrt(gaps).
Estimate fit_interarrival(std::span<const SeriesPoint> series);

struct GammaFit {
    Estimate shape;
    Estimate rate;
    int iterations = 0;
    double log_likelihood = 0.0;
};

// Maximum-likelihood Gamma fit by Newton iteration on the shape profile
// equation log k - digamma(k) = log(mean) - mean(log x). Standard errors come
// from the inverse Fisher information.
GammaFit fit_gamma_mle(std::span<const double> values);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// Kolmogorov complementary distribution Q(x) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 x^2}.
double kolmogorov_q(double x);

// Two-sided one-sample KS test against `fitted`; p-value = Q(sqrt(n) D_n).
KsResult ks_test(std::span<const double> values, const DistributionSpec& fitted);

struct FitReport {
    Estimate lambda;
    Estimate shape;
    Estimate rate;
    KsResult ks;
    std::size_t n_obs = 0;

    nlohmann::json to_json() const;
    static FitReport from_json(const nlohmann::json& j);
    DistributionSpec mark_dist() const;
    DistributionSpec arrival_dist() const;
};

// fit_interarrival + fit_gamma_mle + ks_test on a prepared series.
FitReport fit_series(std::span<const SeriesPoint> series);

// Synthetic single-account transaction history: Poisson purchases of Gamma
// values in `category`, with some purchases split into two rows minutes
// apart and some noise rows (other categories, POS-error declines).
struct SyntheticConfig {
    std::size_t purchases = 306;
    double arrival_rate = 0.6451;  // per day
    double shape = 2.8946;
    double rate = 0.0769;          // per dollar
    double split_fraction = 0.05;  // purchases emitted as a clustered pair
    double noise_fraction = 0.10;  // extra rows that the filter removes
    std::string account_id = "ACC-0001";
    std::string category = "supermarket";
    double start_epoch = 1297123200.0;  // 2011-02-08T00:00:00Z
    std::uint64_t seed = 20110208;
};
std::vector<TransactionRecord> synthesize_transactions(const SyntheticConfig& config);

}  // namespace translim
