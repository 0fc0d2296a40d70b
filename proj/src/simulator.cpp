#include "translim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>

#include "translim/error.hpp"
#include "translim/random.hpp"

namespace translim {

namespace {

constexpr std::uint64_t kChunk = 1u << 14;
std::atomic<unsigned> g_threads{0};

class Sampler {
public:
    explicit Sampler(const DistributionSpec& spec)
        : spec_(spec), gamma_(spec.kind() == DistKind::Gamma ? spec.shape() : 1.0, 1.0) {}

    double operator()(PhiloxEngine& eng) {
        switch (spec_.kind()) {
            case DistKind::Exponential: return exp_(eng) / spec_.rate();
            case DistKind::Gamma: return gamma_(eng) / spec_.rate();
            case DistKind::Deterministic: return spec_.value();
        }
        return 0.0;
    }

private:
    DistributionSpec spec_;
    boost::random::exponential_distribution<double> exp_{1.0};
    boost::random::gamma_distribution<double> gamma_;
};

void validate(double limit, std::uint64_t replications) {
    if (replications < 1) throw Error(ErrorCode::InvalidReplications, "need at least one replication");
    if (!(limit >= 0.0) || !std::isfinite(limit)) {
        throw Error(ErrorCode::ArgumentOutsideRegion, "limit must be finite and non-negative");
    }
}

// Attempted purchases of replication `rep`, strictly inside (0, T].
struct PathGenerator {
    explicit PathGenerator(const ModelParams& params)
        : horizon(params.horizon()), gaps(params.arrival_dist()), sizes(params.mark_dist()) {}

    void generate(std::uint64_t seed, std::uint64_t rep, std::vector<double>& marks) {
        marks.clear();
        PhiloxEngine eng(seed, rep);
        double t = 0.0;
        for (;;) {
            t += gaps(eng);
            if (t > horizon) break;
            marks.push_back(sizes(eng));
        }
    }

    double horizon;
    Sampler gaps;
    Sampler sizes;
};

PathOutcome evaluate_path(std::span<const double> marks, double limit) {
    PathOutcome out;
    bool frozen = false;
    for (double x : marks) {
        out.attempted += x;
        if (!frozen) {
            if (out.freeze + x <= limit) {
                out.freeze += x;
            } else {
                frozen = true;
            }
        }
        if (out.retrial + x <= limit) out.retrial += x;
    }
    out.exceeded = out.attempted > limit;
    out.truncation = std::min(out.attempted, limit);
    return out;
}

double retrial_balance(std::span<const double> marks, double limit) {
    double b = 0.0;
    for (double x : marks) {
        if (b + x <= limit) b += x;
    }
    return b;
}

// Runs fn(begin, end) over fixed-size chunks of [0, n) on worker threads and
// returns the per-chunk results in chunk order.
template <class Result>
std::vector<Result> run_chunks(std::uint64_t n,
                               const std::function<Result(std::uint64_t, std::uint64_t)>& fn) {
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<Result> results(chunks);
    unsigned threads = g_threads.load();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            results[c] = fn(c * kChunk, std::min(n, (c + 1) * kChunk));
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return results;
}

// Welford accumulator with Chan's pairwise merge.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }

    double std_err() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

struct PolicyChunk {
    Moments balance;
    double declines = 0.0;
    double undershoot = 0.0;
};

double policy_balance(const PathOutcome& p, PolicyKind policy) {
    switch (policy) {
        case PolicyKind::Freeze: return p.freeze;
        case PolicyKind::Retrial: return p.retrial;
        case PolicyKind::NewsvendorTruncation: return p.truncation;
    }
    return 0.0;
}

}  // namespace

void set_simulation_threads(unsigned threads) noexcept { g_threads.store(threads); }

std::vector<PathOutcome> simulate_paths(const ModelParams& params, double limit,
                                        std::uint64_t replications, std::uint64_t seed) {
    validate(limit, replications);
    auto chunks = run_chunks<std::vector<PathOutcome>>(
        replications, [&](std::uint64_t begin, std::uint64_t end) {
            PathGenerator gen(params);
            std::vector<double> marks;
            std::vector<PathOutcome> out;
            out.reserve(end - begin);
            for (std::uint64_t r = begin; r < end; ++r) {
                gen.generate(seed, r, marks);
                out.push_back(evaluate_path(marks, limit));
            }
            return out;
        });
    std::vector<PathOutcome> all;
    all.reserve(replications);
    for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
    return all;
}

SimReport simulate_policy(const ModelParams& params, double limit, PolicyKind policy,
                          std::uint64_t replications, std::uint64_t seed) {
    validate(limit, replications);
    if (!(limit > 0.0)) throw Error(ErrorCode::ArgumentOutsideRegion, "limit must be positive");
    auto chunks = run_chunks<PolicyChunk>(replications, [&](std::uint64_t begin, std::uint64_t end) {
        PathGenerator gen(params);
        std::vector<double> marks;
        PolicyChunk acc;
        for (std::uint64_t r = begin; r < end; ++r) {
            gen.generate(seed, r, marks);
            const auto p = evaluate_path(marks, limit);
            const double b = policy_balance(p, policy);
            acc.balance.add(b);
            if (p.exceeded) {
                acc.declines += 1.0;
                acc.undershoot += limit - b;
            }
        }
        return acc;
    });
    PolicyChunk total;
    for (const auto& c : chunks) {
        total.balance.merge(c.balance);
        total.declines += c.declines;
        total.undershoot += c.undershoot;
    }
    SimReport rep;
    rep.policy = policy;
    rep.limit = limit;
    rep.mean_balance = total.balance.mean;
    rep.std_err = total.balance.std_err();
    rep.decline_frequency = total.declines / static_cast<double>(replications);
    rep.mean_undershoot_given_exceed = total.declines > 0.0 ? total.undershoot / total.declines : 0.0;
    rep.replications = replications;
    rep.seed = seed;
    return rep;
}

double simulate_aggregate_tail(const ModelParams& params, double limit,
                               std::uint64_t replications, std::uint64_t seed) {
    validate(limit, replications);
    auto chunks = run_chunks<std::uint64_t>(replications, [&](std::uint64_t begin, std::uint64_t end) {
        PathGenerator gen(params);
        std::vector<double> marks;
        std::uint64_t hits = 0;
        for (std::uint64_t r = begin; r < end; ++r) {
            gen.generate(seed, r, marks);
            double a = 0.0;
            for (double x : marks) a += x;
            if (a > limit) ++hits;
        }
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : chunks) hits += h;
    return static_cast<double>(hits) / static_cast<double>(replications);
}

std::vector<RetrialPoint> retrial_profit_curve(const ModelParams& params,
                                               std::span<const double> grid,
                                               std::uint64_t replications, std::uint64_t seed) {
    if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "retrial grid is empty");
    for (double l : grid) validate(l, replications);
    const std::vector<double> limits(grid.begin(), grid.end());
    auto chunks = run_chunks<std::vector<Moments>>(
        replications, [&](std::uint64_t begin, std::uint64_t end) {
            PathGenerator gen(params);
            std::vector<double> marks;
            std::vector<Moments> acc(limits.size());
            for (std::uint64_t r = begin; r < end; ++r) {
                gen.generate(seed, r, marks);
                for (std::size_t i = 0; i < limits.size(); ++i) {
                    acc[i].add(retrial_balance(marks, limits[i]));
                }
            }
            return acc;
        });
    std::vector<Moments> total(limits.size());
    for (const auto& c : chunks) {
        for (std::size_t i = 0; i < limits.size(); ++i) total[i].merge(c[i]);
    }
    std::vector<RetrialPoint> curve;
    curve.reserve(limits.size());
    for (std::size_t i = 0; i < limits.size(); ++i) {
        RetrialPoint p;
        p.limit = limits[i];
        p.mean_balance = total[i].mean;
        p.std_err = total[i].std_err();
        p.profit = params.gamma_interchange() * p.mean_balance - params.nu_funding() * p.limit;
        curve.push_back(p);
    }
    return curve;
}

double estimate_retrial_optimum(const ModelParams& params, std::span<const double> grid,
                                std::uint64_t replications, std::uint64_t seed) {
    const auto curve = retrial_profit_curve(params, grid, replications, seed);
    const auto best = std::max_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.profit < b.profit; });
    return best->limit;
}

}  // namespace translim
