#include "translim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>

#include "translim/error.hpp"
#include "translim/random.hpp"

namespace translim {

namespace {

constexpr double kSecondsPerDay = 86400.0;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// Days since 1970-01-01 of a proleptic Gregorian date.
long long days_from_civil(long long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

bool is_excluded(const std::optional<std::string>& reason, const std::vector<std::string>& excluded) {
    if (!reason) return false;
    const auto r = lower(*reason);
    return std::any_of(excluded.begin(), excluded.end(), [&](const auto& e) { return lower(e) == r; });
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    std::size_t line = 1;
    row.line = 1;
    bool in_quotes = false;
    bool field_started = false;
    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&](std::size_t next_line) {
        end_field();
        const bool blank = row.fields.size() == 1 && row.fields[0].empty();
        if (!blank) rows.push_back(std::move(row));
        row = CsvRow{};
        row.line = next_line;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field_started) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(c);
                }
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                ++line;
                end_row(line);
                break;
            case '\n':
                ++line;
                end_row(line);
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (!field.empty() || !row.fields.empty() || field_started) end_row(line);
    return rows;
}

std::optional<double> parse_timestamp(std::string_view text) {
    text = trim(text);
    if (auto v = parse_double(text)) return v;
    // YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    const auto y = parse_int(text.substr(0, 4));
    const auto mo = parse_int(text.substr(5, 2));
    const auto d = parse_int(text.substr(8, 2));
    const auto h = parse_int(text.substr(11, 2));
    const auto mi = parse_int(text.substr(14, 2));
    std::string_view rest = text.substr(17);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    const auto s = parse_double(rest);
    if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
    if (*mo < 1 || *mo > 12 || *d < 1 || *d > 31 || *h > 23 || *mi > 59 || *s < 0.0 || *s >= 61.0)
        return std::nullopt;
    const long long days = days_from_civil(*y, static_cast<unsigned>(*mo), static_cast<unsigned>(*d));
    return static_cast<double>(days) * kSecondsPerDay + *h * 3600.0 + *mi * 60.0 + *s;
}

LoadResult parse_transactions(std::istream& in, const CsvSchema& schema) {
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto rows = parse_csv(buf.str());
    if (rows.empty()) throw Error(ErrorCode::SchemaMismatch, "missing header row");

    const auto& header = rows.front().fields;
    auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        if (required) throw Error(ErrorCode::SchemaMismatch, "header has no column '" + name + "'");
        return std::nullopt;
    };
    const auto c_account = *column(schema.account_id, true);
    const auto c_ts = *column(schema.timestamp, true);
    const auto c_amount = *column(schema.amount, true);
    const auto c_category = *column(schema.category, true);
    const auto c_status = *column(schema.status, true);
    const auto c_reason = column(schema.decline_reason, false);

    LoadResult out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto fail = [&](const std::string& msg) { out.errors.push_back({row.line, msg}); };
        if (row.fields.size() != header.size()) {
            fail("expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(row.fields.size()));
            continue;
        }
        TransactionRecord rec;
        rec.account_id = std::string(trim(row.fields[c_account]));
        const auto ts = parse_timestamp(row.fields[c_ts]);
        if (!ts) {
            fail("malformed timestamp '" + row.fields[c_ts] + "'");
            continue;
        }
        rec.timestamp = *ts;
        const auto amount = parse_double(row.fields[c_amount]);
        if (!amount) {
            fail("malformed amount '" + row.fields[c_amount] + "'");
            continue;
        }
        rec.amount = *amount;
        rec.merchant_category = std::string(trim(row.fields[c_category]));
        const auto status = lower(trim(row.fields[c_status]));
        if (status == "approved") {
            rec.status = TxStatus::Approved;
        } else if (status == "declined") {
            rec.status = TxStatus::Declined;
        } else {
            fail("unknown status '" + row.fields[c_status] + "'");
            continue;
        }
        if (c_reason) {
            const auto reason = trim(row.fields[*c_reason]);
            if (!reason.empty()) rec.decline_reason = std::string(reason);
        }
        if (!(rec.amount > 0.0)) {
            ++out.skipped_non_purchases;
            continue;
        }
        out.records.push_back(std::move(rec));
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

LoadResult load_transactions(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
    return parse_transactions(in, schema);
}

void write_transactions_csv(std::ostream& out, std::span<const TransactionRecord> records,
                            const CsvSchema& schema) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q.push_back('"');
            q.push_back(c);
        }
        q.push_back('"');
        return q;
    };
    out << quote(schema.account_id) << ',' << quote(schema.timestamp) << ',' << quote(schema.amount)
        << ',' << quote(schema.category) << ',' << quote(schema.status) << ','
        << quote(schema.decline_reason) << '\n';
    std::ostringstream row;
    row.imbue(std::locale::classic());
    for (const auto& r : records) {
        row.str("");
        row << quote(r.account_id) << ',' << std::fixed << std::setprecision(0) << r.timestamp << ','
            << std::setprecision(2) << r.amount << ',' << quote(r.merchant_category) << ','
            << (r.status == TxStatus::Approved ? "approved" : "declined") << ','
            << quote(r.decline_reason.value_or("")) << '\n';
        out << row.str();
    }
}

std::vector<SeriesPoint> prepare_series(std::span<const TransactionRecord> records,
                                        const SeriesFilter& filter) {
    if (!(filter.cluster_window_secs >= 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "cluster window must be non-negative");
    }
    std::vector<const TransactionRecord*> kept;
    for (const auto& r : records) {
        if (!(r.amount > 0.0)) continue;
        if (filter.category && lower(r.merchant_category) != lower(*filter.category)) continue;
        if (filter.account && r.account_id != *filter.account) continue;
        if (r.status == TxStatus::Declined && is_excluded(r.decline_reason, filter.excluded_decline_reasons))
            continue;
        kept.push_back(&r);
    }
    if (kept.empty()) throw Error(ErrorCode::EmptySeriesAfterFilter, "no purchases left after filtering");
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });

    const double origin = kept.front()->timestamp;
    std::vector<SeriesPoint> series;
    double last_member = 0.0;
    for (const auto* r : kept) {
        if (!series.empty() && r->timestamp - last_member < filter.cluster_window_secs) {
            series.back().value += r->amount;
        } else {
            series.push_back({(r->timestamp - origin) / kSecondsPerDay, r->amount});
        }
        last_member = r->timestamp;
    }
    return series;
}

Estimate fit_interarrival(std::span<const SeriesPoint> series) {
    if (series.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two purchases");
    const double span = series.back().time_days - series.front().time_days;
    const auto gaps = static_cast<double>(series.size() - 1);
    if (!(span > 0.0)) throw Error(ErrorCode::InsufficientData, "all purchases share one time");
    const double rate = gaps / span;
    return {rate, rate / std::sqrt(gaps)};
}

GammaFit fit_gamma_mle(std::span<const double> values) {
    if (values.size() < 10) throw Error(ErrorCode::InsufficientData, "need at least 10 values");
    double sum = 0.0;
    double sum_log = 0.0;
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::NonPositiveValue, "Gamma fit needs strictly positive values");
        }
        sum += v;
        sum_log += std::log(v);
    }
    const auto n = static_cast<double>(values.size());
    const double mean = sum / n;
    const double s = std::log(mean) - sum_log / n;
    if (!(s > 1e-12)) {
        throw Error(ErrorCode::NoConvergence, "values have no spread; the shape estimate diverges");
    }

    // Minka's closed-form start, then Newton on log k - digamma(k) = s.
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    int it = 0;
    bool converged = false;
    while (it < 100) {
        ++it;
        const double g = std::log(k) - boost::math::digamma(k) - s;
        const double dg = 1.0 / k - boost::math::trigamma(k);
        double next = k - g / dg;
        if (!(next > 0.0)) next = 0.5 * k;
        const double step = std::abs(next - k);
        k = next;
        if (step <= 1e-10 * std::max(1.0, k)) {
            converged = true;
            break;
        }
    }
    if (!converged || !std::isfinite(k) || k > 1e8) {
        throw Error(ErrorCode::NoConvergence, "shape iteration did not converge");
    }
    const double rate = k / mean;
    const double tg = boost::math::trigamma(k);
    const double denom = n * (k * tg - 1.0);

    GammaFit fit;
    fit.shape = {k, std::sqrt(k / denom)};
    fit.rate = {rate, std::sqrt(tg * rate * rate / denom)};
    fit.iterations = it;
    fit.log_likelihood = n * (k * std::log(rate) - std::lgamma(k)) + (k - 1.0) * sum_log - rate * sum;
    return fit;
}

double kolmogorov_q(double x) {
    if (!(x > 0.0)) return 1.0;
    if (x < 1.18) {
        // Jacobi-transformed series converges fast for small x.
        const double pi = std::numbers::pi;
        const double c = -pi * pi / (8.0 * x * x);
        double sum = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double odd = 2.0 * j - 1.0;
            const double term = std::exp(c * odd * odd);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> values, const DistributionSpec& fitted) {
    if (values.empty()) throw Error(ErrorCode::InsufficientData, "KS test needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = fitted.cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return {d, kolmogorov_q(std::sqrt(n) * d)};
}

nlohmann::json FitReport::to_json() const {
    return nlohmann::json{
        {"lambda_hat", lambda.value}, {"lambda_se", lambda.se}, {"shape_hat", shape.value},
        {"shape_se", shape.se},       {"rate_hat", rate.value}, {"rate_se", rate.se},
        {"ks_d", ks.statistic},       {"ks_p", ks.p_value},     {"n_obs", n_obs},
    };
}

FitReport FitReport::from_json(const nlohmann::json& j) {
    FitReport r;
    try {
        r.lambda = {j.at("lambda_hat").get<double>(), j.value("lambda_se", 0.0)};
        r.shape = {j.at("shape_hat").get<double>(), j.value("shape_se", 0.0)};
        r.rate = {j.at("rate_hat").get<double>(), j.value("rate_se", 0.0)};
        r.ks = {j.value("ks_d", 0.0), j.value("ks_p", 0.0)};
        r.n_obs = j.value("n_obs", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("fit report: ") + e.what());
    }
    return r;
}

DistributionSpec FitReport::mark_dist() const {
    return DistributionSpec::gamma(shape.value, rate.value, DistRole::Mark);
}

DistributionSpec FitReport::arrival_dist() const {
    return DistributionSpec::exponential(lambda.value, DistRole::InterArrival);
}

FitReport fit_series(std::span<const SeriesPoint> series) {
    FitReport r;
    r.lambda = fit_interarrival(series);
    std::vector<double> values;
    values.reserve(series.size());
    for (const auto& p : series) values.push_back(p.value);
    const auto g = fit_gamma_mle(values);
    r.shape = g.shape;
    r.rate = g.rate;
    r.ks = ks_test(values, DistributionSpec::gamma(g.shape.value, g.rate.value, DistRole::Mark));
    r.n_obs = values.size();
    return r;
}

std::vector<TransactionRecord> synthesize_transactions(const SyntheticConfig& c) {
    PhiloxEngine eng(c.seed, 0);
    boost::random::exponential_distribution<double> gap(c.arrival_rate);
    boost::random::gamma_distribution<double> value(c.shape, 1.0 / c.rate);
    const char* other_categories[] = {"fuel", "restaurant", "department_store"};

    std::vector<TransactionRecord> out;
    auto row = [&](double ts, double amount, std::string category) {
        TransactionRecord r;
        r.account_id = c.account_id;
        r.timestamp = std::round(ts);
        r.amount = std::max(0.01, std::round(amount * 100.0) / 100.0);
        r.merchant_category = std::move(category);
        return r;
    };
    double t = c.start_epoch;
    for (std::size_t i = 0; i < c.purchases; ++i) {
        t += gap(eng) * kSecondsPerDay;
        const double v = value(eng);
        if (eng.uniform_open() < c.split_fraction) {
            const double part = 0.2 + 0.6 * eng.uniform_open();
            const double delay = 600.0 + 2400.0 * eng.uniform_open();
            out.push_back(row(t, v * part, c.category));
            out.push_back(row(t + delay, v * (1.0 - part), c.category));
        } else {
            out.push_back(row(t, v, c.category));
        }
        if (eng.uniform_open() < c.noise_fraction) {
            const double offset = (0.1 + 0.8 * eng.uniform_open()) / c.arrival_rate * kSecondsPerDay;
            if (eng.uniform_open() < 0.5) {
                auto r = row(t + offset, value(eng), c.category);
                r.status = TxStatus::Declined;
                r.decline_reason = eng.uniform_open() < 0.5 ? "pos_error" : "incorrect_pin";
                out.push_back(std::move(r));
            } else {
                const auto which = static_cast<std::size_t>(eng.uniform_open() * 3.0);
                out.push_back(row(t + offset, 2.0 * value(eng), other_categories[std::min<std::size_t>(which, 2)]));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    return out;
}

}  // namespace translim
