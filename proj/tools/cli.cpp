#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "translim/error.hpp"
#include "translim/ingest.hpp"
#include "translim/model.hpp"
#include "translim/optimizer.hpp"
#include "translim/simulator.hpp"

namespace translim::cli {

namespace {

// Reports keep their keys in insertion order.
using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::array<double, 5> kGridRates{1, 2, 3, 4, 5};
constexpr std::array<double, 5> kGridMeans{20, 40, 60, 80, 100};

struct ModelFlags {
    double gamma = 0.0054;
    double nu = 0.0007;
    double period = 30.0;
    double interest_free = 0.0;
    double limit_lo = 0.0;
    double limit_hi = 5000.0;
    std::optional<double> lambda;
    std::optional<std::string> mark_dist;  // exp, or gamma with a fit report
    std::optional<double> mark_rate;
    std::optional<double> mark_shape;
    std::string fit_report;
};

struct OutputFlags {
    std::string format = "json";
    std::string output;
};

// What a command produced. `table` replaces the generic flattening for csv
// and pretty output when a command has a natural row layout.
struct Report {
    json body;
    std::optional<json> table;
    bool pretty_as_table = false;
    int table_decimals = -1;  // pretty precision of table cells; -1 picks by column
    int exit_code = kExitOk;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
    sub->add_option("--gamma", f.gamma, "Interchange revenue per dollar of balance")->capture_default_str();
    sub->add_option("--nu", f.nu, "Funding cost per dollar of limit")->capture_default_str();
    sub->add_option("--period", f.period, "Statement period in days")->capture_default_str();
    sub->add_option("--interest-free", f.interest_free, "Extra interest-free days")->capture_default_str();
    sub->add_option("--limit-lo", f.limit_lo, "Smallest admissible limit")->capture_default_str();
    sub->add_option("--limit-hi", f.limit_hi, "Largest admissible limit")->capture_default_str();
    sub->add_option("--lambda", f.lambda, "Purchases per day");
    sub->add_option("--mark-dist", f.mark_dist, "Purchase size law")->check(CLI::IsMember({"exp", "gamma"}));
    sub->add_option("--mark-rate", f.mark_rate, "Rate of the purchase size law, per dollar");
    sub->add_option("--mark-shape", f.mark_shape, "Shape of a Gamma purchase size law");
    sub->add_option("--fit-report", f.fit_report, "FitReport JSON supplying lambda and a Gamma law");
}

void add_output_flags(CLI::App* sub, OutputFlags& f) {
    sub->add_option("--format", f.format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "pretty"}))
        ->capture_default_str();
    sub->add_option("--output", f.output, "Write the report to this file instead of stdout");
}

ModelParams build_params(const ModelFlags& f) {
    std::optional<double> lambda = f.lambda;
    std::optional<double> rate = f.mark_rate;
    std::optional<double> shape = f.mark_shape;
    std::string dist = f.mark_dist.value_or(f.fit_report.empty() ? "exp" : "gamma");
    if (!f.fit_report.empty()) {
        std::ifstream in(f.fit_report);
        if (!in) throw Error(ErrorCode::FileNotFound, "cannot open fit report " + f.fit_report);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, std::string("fit report: ") + e.what());
        }
        const auto rep = FitReport::from_json(j);
        if (!lambda) lambda = rep.lambda.value;
        if (!rate) rate = rep.rate.value;
        if (!shape) shape = rep.shape.value;
    }
    if (!lambda) throw UsageError("--lambda (or --fit-report) is required");
    if (!rate) throw UsageError("--mark-rate (or --fit-report) is required");
    if (dist == "gamma" && !shape) throw UsageError("--mark-dist gamma needs --mark-shape");
    const auto mark = dist == "gamma" ? DistributionSpec::gamma(*shape, *rate, DistRole::Mark)
                                      : DistributionSpec::exponential(*rate, DistRole::Mark);
    const ModelConfig cfg{.gamma_interchange = f.gamma,
                          .nu_funding = f.nu,
                          .period_days = f.period,
                          .interest_free_days = f.interest_free,
                          .limit_lo = f.limit_lo,
                          .limit_hi = f.limit_hi,
                          .mark = mark,
                          .arrival = DistributionSpec::exponential(*lambda, DistRole::InterArrival)};
    return ModelParams(cfg);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("TRANSLIM_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw UsageError("TRANSLIM_SEED is not an unsigned integer: " + std::string(s));
        }
        return v;
    }
    return kDefaultSeed;
}

json params_json(const ModelParams& p) {
    return {{"gamma", p.gamma_interchange()},
            {"nu", p.nu_funding()},
            {"period_days", p.period_days()},
            {"interest_free_days", p.interest_free_days()},
            {"limit_lo", p.limit_lo()},
            {"limit_hi", p.limit_hi()},
            {"arrival_rate", p.poisson_rate()},
            {"mark", p.mark_dist().describe()},
            {"expected_spend", p.expected_spend()}};
}

json result_json(const OptimizationResult& r) {
    return {{"limit_star", r.limit_star},
            {"profit_at_star", r.profit_at_star},
            {"decline_prob_at_star", r.decline_prob_at_star},
            {"iterations", r.iterations},
            {"residual", r.residual},
            {"status", std::string(to_string(r.status))},
            {"fallback_used", r.fallback_used},
            {"warning", r.warning}};
}

json limit_json(const LimitReport& r) {
    return {{"limit", r.limit},
            {"expected_balance", r.expected_balance},
            {"expected_min", r.expected_min},
            {"expected_profit", r.expected_profit},
            {"expected_profit_truncation", r.expected_profit_truncation},
            {"decline_prob", r.decline_prob}};
}

json sim_json(const SimReport& r) {
    return {{"policy", std::string(to_string(r.policy))},
            {"limit", r.limit},
            {"mean_balance", r.mean_balance},
            {"std_err", r.std_err},
            {"decline_frequency", r.decline_frequency},
            {"mean_undershoot_given_exceed", r.mean_undershoot_given_exceed},
            {"replications", r.replications},
            {"seed", r.seed}};
}

// ---- rendering ----

const std::set<std::string>& money_keys() {
    static const std::set<std::string> keys{
        "limit", "limit_star", "profit_at_star", "expected_balance", "expected_min",
        "expected_profit", "expected_profit_truncation", "lower", "upper", "gap",
        "mean_balance", "std_err", "mean_undershoot_given_exceed", "revised_limit",
        "original_limit", "expected_spend", "limit_lo", "limit_hi", "profit"};
    return keys;
}

std::string shortest(double x) {
    if (std::isnan(x)) return "NaN";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string fixed(double x, int decimals) {
    if (!std::isfinite(x)) return shortest(x);
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::fixed, decimals);
    return std::string(buf.data(), res.ptr);
}

std::string scalar_text(const json& v, const std::string& key, bool pretty, int decimals = -1) {
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (!pretty) return shortest(x);
        if (decimals >= 0) return fixed(x, decimals);
        if (money_keys().count(key)) return fixed(x, 2);
        std::ostringstream os;
        os.imbue(std::locale::classic());
        os << std::setprecision(6) << x;
        return os.str();
    }
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return pretty ? "-" : "NaN";
    return v.dump();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

bool is_table(const json& j) {
    return j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), [](const json& r) { return r.is_object(); });
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, const json*>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out.emplace_back(prefix, &j);
    }
}

std::string leaf_key(const std::string& dotted) {
    const auto pos = dotted.rfind('.');
    return pos == std::string::npos ? dotted : dotted.substr(pos + 1);
}

void render_csv_table(const json& rows, std::ostream& os) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_field(keys[i]);
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            os << (i ? "," : "") << csv_field(scalar_text(row.at(keys[i]), keys[i], false));
        }
        os << '\n';
    }
}

void render_pretty_table(const json& rows, int decimals, std::ostream& os) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) width[i] = keys[i].size();
    for (const auto& row : rows) {
        auto& line = cells.emplace_back();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            const auto& v = row.at(keys[i]);
            line.push_back(scalar_text(v, keys[i], true, v.is_number_float() ? decimals : -1));
            width[i] = std::max(width[i], line.back().size());
        }
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << keys[i];
    }
    os << '\n';
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
            os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << line[i];
        }
        os << '\n';
    }
}

void render_pretty(const json& j, const std::string& prefix, std::ostream& os) {
    for (const auto& [k, v] : j.items()) {
        const std::string name = prefix.empty() ? k : prefix + "." + k;
        if (v.is_object()) {
            render_pretty(v, name, os);
        } else if (is_table(v)) {
            os << name << ":\n";
            render_pretty_table(v, -1, os);
        } else if (v.is_array()) {
            if (v.empty()) continue;
            os << std::left << std::setw(40) << name << std::right;
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << scalar_text(v[i], k, true);
            os << '\n';
        } else if (!(v.is_string() && v.get<std::string>().empty())) {
            os << std::left << std::setw(40) << name << std::right << scalar_text(v, k, true) << '\n';
        }
    }
}

void render(const Report& rep, const std::string& format, std::ostream& os) {
    if (format == "json") {
        os << rep.body.dump(2) << '\n';
        return;
    }
    if (format == "csv") {
        if (rep.table) {
            render_csv_table(*rep.table, os);
            return;
        }
        std::vector<std::pair<std::string, const json*>> leaves;
        flatten(rep.body, "", leaves);
        os << "key,value\n";
        for (const auto& [k, v] : leaves) os << csv_field(k) << ',' << csv_field(scalar_text(*v, leaf_key(k), false)) << '\n';
        return;
    }
    if (rep.table && rep.pretty_as_table) {
        render_pretty_table(*rep.table, rep.table_decimals, os);
    } else {
        render_pretty(rep.body, "", os);
    }
}

// ---- commands ----

Report cmd_fit(const std::string& input, const std::optional<std::string>& category, double window,
               std::ostream& err) {
    const auto loaded = load_transactions(input);
    for (const auto& e : loaded.errors) err << "warning: line " << e.line << ": " << e.message << '\n';
    SeriesFilter filter;
    filter.category = category;
    filter.cluster_window_secs = window;
    const auto series = prepare_series(loaded.records, filter);
    Report rep;
    rep.body = json::parse(fit_series(series).to_json().dump());
    return rep;
}

Report cmd_optimize(const ModelParams& params, double original, std::ostream& err) {
    const SolverOptions opt;
    Report rep;
    json warnings = json::array();
    const auto freeze = optimal_limit_freeze(params, opt);
    if (!freeze.warning.empty()) warnings.push_back("freeze: " + freeze.warning);

    OptimizationResult newsvendor;
    try {
        newsvendor = newsvendor_limit(params, opt);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RatioUnattainable) throw;
        newsvendor.limit_star = params.limit_lo();
        newsvendor.status = SolveStatus::LowerBoundary;
        newsvendor.decline_prob_at_star = decline_probability(make_query(params, params.limit_lo()));
        newsvendor.profit_at_star =
            expected_profit(make_query(params, params.limit_lo()), PolicyKind::NewsvendorTruncation);
        newsvendor.warning = e.what();
    }
    if (!newsvendor.warning.empty()) warnings.push_back("newsvendor: " + newsvendor.warning);

    const double revised = revised_limit(params, freeze.limit_star);
    json rows = json::array();
    for (const auto& [label, l] : {std::pair<const char*, double>{"original", original},
                                   {"optimal", freeze.limit_star},
                                   {"revised", revised}}) {
        json row = {{"label", label}};
        row.update(limit_json(evaluate_limit(params, l, opt.euler)));
        rows.push_back(row);
    }
    for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << '\n';

    rep.body = {{"params", params_json(params)},
                {"freeze", result_json(freeze)},
                {"newsvendor", result_json(newsvendor)},
                {"bounds",
                 {{"lower", newsvendor.limit_star},
                  {"upper", freeze.limit_star},
                  {"gap", freeze.limit_star - newsvendor.limit_star}}},
                {"original_limit", original},
                {"revised_limit", revised},
                {"rows", rows},
                {"warnings", warnings}};
    rep.table = rows;
    return rep;
}

Report cmd_evaluate(const ModelParams& params, double limit) {
    Report rep;
    const auto r = evaluate_limit(params, limit);
    rep.body = limit_json(r);
    rep.body["params"] = params_json(params);
    return rep;
}

Report cmd_bounds(const ModelParams& params) {
    const auto b = retrial_bounds(params);
    Report rep;
    rep.body = {{"lower", b.lower},
                {"upper", b.upper},
                {"gap", b.gap},
                {"newsvendor", result_json(b.newsvendor)},
                {"freeze", result_json(b.freeze)},
                {"params", params_json(params)}};
    return rep;
}

Report cmd_simulate(const ModelParams& params, double limit, const std::string& policy,
                    std::uint64_t reps, std::uint64_t seed) {
    std::vector<PolicyKind> policies;
    if (policy == "all") {
        policies = {PolicyKind::Freeze, PolicyKind::Retrial, PolicyKind::NewsvendorTruncation};
    } else if (auto p = parse_policy(policy)) {
        policies = {*p};
    } else {
        throw Error(ErrorCode::InvalidSpec, "unknown policy '" + policy + "'");
    }
    json runs = json::array();
    for (auto p : policies) runs.push_back(sim_json(simulate_policy(params, limit, p, reps, seed)));
    Report rep;
    rep.body = policies.size() == 1 ? runs.front() : json{{"runs", runs}};
    rep.table = runs;
    rep.pretty_as_table = true;
    return rep;
}

Report cmd_tables(const std::string& which) {
    const std::vector<double> rates(kGridRates.begin(), kGridRates.end());
    const std::vector<double> means(kGridMeans.begin(), kGridMeans.end());
    const auto cells = limit_grid(rates, means);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Report rep;
    json values = json::array();
    json table = json::array();
    std::size_t k = 0;
    for (double rate : rates) {
        json row = json::array();
        json trow = {{"arrival_rate", static_cast<int>(rate)}};
        for (double mean : means) {
            const auto& c = cells[k++];
            double v = nan;
            if (c.ok) {
                if (which == "optimal") v = c.freeze.limit_star;
                else if (which == "decline") v = c.freeze.decline_prob_at_star;
                else if (which == "newsvendor") v = c.newsvendor.limit_star;
                else v = c.freeze.limit_star - c.newsvendor.limit_star;
            } else {
                rep.exit_code = kExitNumeric;
            }
            row.push_back(v);
            trow["mean_" + shortest(mean)] = v;
        }
        values.push_back(row);
        table.push_back(trow);
    }
    rep.body = {{"table", which}, {"arrival_rates", rates}, {"mean_marks", means}, {"values", values}};
    rep.table = table;
    rep.pretty_as_table = true;
    rep.table_decimals = which == "decline" ? 10 : 2;
    return rep;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::FileNotFound:
        case ErrorCode::SchemaMismatch:
        case ErrorCode::ParseError:
            return kExitUsage;
        default:
            return kExitNumeric;
    }
}

bool emit(const Report& rep, const OutputFlags& of, std::ostream& out, std::ostream& err) {
    if (of.output.empty()) {
        render(rep, of.format, out);
        return true;
    }
    std::ofstream file(of.output, std::ios::binary);
    if (!file) {
        err << "error: cannot write " << of.output << '\n';
        return false;
    }
    render(rep, of.format, file);
    return static_cast<bool>(file);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Profit-maximizing credit limits for transactor card accounts", "translim"};
    app.require_subcommand(1);

    ModelFlags mf;
    OutputFlags of;
    OutputFlags table_of{"csv", ""};
    std::optional<std::uint64_t> seed;
    std::uint64_t reps = 100000;
    double limit = 0.0;
    double original = 5000.0;
    std::string policy = "freeze";
    std::string which;
    std::string input;
    std::optional<std::string> category;
    double window = 3600.0;

    auto* fit = app.add_subcommand("fit", "Fit purchase rate and size law to a transaction CSV");
    fit->add_option("--input", input, "Transaction CSV")->required();
    fit->add_option("--category", category, "Merchant category to keep");
    fit->add_option("--cluster-window-secs", window, "Merge purchases closer than this")->capture_default_str();
    add_output_flags(fit, of);

    auto* optimize = app.add_subcommand("optimize", "Optimal limit, newsvendor bound and revised limit");
    add_model_flags(optimize, mf);
    optimize->add_option("--original-limit", original, "Current limit of the account")->capture_default_str();
    add_output_flags(optimize, of);

    auto* evaluate = app.add_subcommand("evaluate", "Balance, profit and decline probability at a limit");
    add_model_flags(evaluate, mf);
    evaluate->add_option("--limit", limit, "Credit limit in dollars")->required();
    add_output_flags(evaluate, of);

    auto* bounds = app.add_subcommand("bounds", "Bounds on the retrial-policy optimal limit");
    add_model_flags(bounds, mf);
    add_output_flags(bounds, of);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo balance under a control policy");
    add_model_flags(simulate, mf);
    simulate->add_option("--limit", limit, "Credit limit in dollars")->required();
    simulate->add_option("--policy", policy, "freeze, retrial, truncation or all")->capture_default_str();
    simulate->add_option("--reps", reps, "Simulated periods")->capture_default_str();
    simulate->add_option("--seed", seed, "Random seed (default: TRANSLIM_SEED or a fixed constant)");
    add_output_flags(simulate, of);

    auto* tables = app.add_subcommand("tables", "Reference grid over purchase rate and mean purchase");
    tables->add_option("--which", which, "Grid to compute")
        ->required()
        ->check(CLI::IsMember({"optimal", "decline", "newsvendor", "differences"}));
    add_output_flags(tables, table_of);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        Report rep;
        if (*fit) {
            rep = cmd_fit(input, category, window, err);
        } else if (*optimize) {
            rep = cmd_optimize(build_params(mf), original, err);
        } else if (*evaluate) {
            rep = cmd_evaluate(build_params(mf), limit);
        } else if (*bounds) {
            rep = cmd_bounds(build_params(mf));
        } else if (*simulate) {
            const auto params = build_params(mf);
            rep = cmd_simulate(params, limit, policy, reps, resolve_seed(seed));
        } else if (*tables) {
            rep = cmd_tables(which);
            if (rep.exit_code != kExitOk) err << "error: some grid cells failed; marked NaN\n";
        }
        if (!emit(rep, *tables ? table_of : of, out, err)) return kExitUsage;
        return rep.exit_code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

int run_synth(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Write a synthetic single-account transaction CSV", "translim-synth"};
    SyntheticConfig cfg;
    std::string output;
    app.add_option("--purchases", cfg.purchases, "Genuine purchases to generate")->capture_default_str();
    app.add_option("--lambda", cfg.arrival_rate, "Purchases per day")->capture_default_str();
    app.add_option("--mark-shape", cfg.shape, "Gamma shape of purchase sizes")->capture_default_str();
    app.add_option("--mark-rate", cfg.rate, "Gamma rate of purchase sizes, per dollar")->capture_default_str();
    app.add_option("--split-fraction", cfg.split_fraction, "Share of purchases split into two rows")
        ->capture_default_str();
    app.add_option("--noise-fraction", cfg.noise_fraction, "Extra rows the series filter removes")
        ->capture_default_str();
    app.add_option("--category", cfg.category, "Merchant category of genuine purchases")->capture_default_str();
    app.add_option("--account", cfg.account_id, "Account id")->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--output", output, "CSV path (default stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        const auto records = synthesize_transactions(cfg);
        if (output.empty()) {
            write_transactions_csv(out, records);
            return kExitOk;
        }
        std::ofstream file(output, std::ios::binary);
        if (!file) {
            err << "error: cannot write " << output << '\n';
            return kExitUsage;
        }
        write_transactions_csv(file, records);
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
}

}  // namespace translim::cli
