#include "gafzeros/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"
#include "gafzeros/zero_count.hpp"

namespace gafz {

namespace {

// Integer tallies merge by addition, so the merged result is independent of
// how replicas were distributed over threads.
struct Tally {
    std::size_t successes = 0;
    std::size_t inconclusive = 0;
    std::size_t retries = 0;
    std::size_t certified = 0;
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;

    void merge(const Tally& o) {
        successes += o.successes;
        inconclusive += o.inconclusive;
        retries += o.retries;
        certified += o.certified;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

template <class Replica>
Tally run_replicas(std::size_t trials, unsigned threads, Replica replica) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, trials))));
    std::atomic<std::size_t> next{0};
    std::vector<Tally> partial(workers);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](unsigned w) {
        try {
            constexpr std::size_t kChunk = 256;
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= trials) break;
                const std::size_t end = std::min(trials, begin + kChunk);
                for (std::size_t i = begin; i < end; ++i) replica(i, partial[w]);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(trials);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    Tally total;
    for (const auto& t : partial) total.merge(t);
    return total;
}

double radius_of_use_for(const GafModel& model, double r) {
    const double grown = r * (1.0 + 1e-5);
    return model.is_hyperbolic() ? std::min(grown, 0.5 * (1.0 + r)) : grown;
}

GafCount count_with_depth(const GafModel& model, double r, RandomStream& rng, int max_retries, std::size_t N) {
    const TruncatedGaf f(model, sample_coefficients(rng, N), radius_of_use_for(model, r));
    const CountResult res = count_zeros_with_retry(as_analytic(f), r, f.tail_sup_bound(r), max_retries);
    return {res.count, res.retries};
}

// Evaluates `count(rng) -> optional<(count, retries)>` for each replica.
template <class CountFn>
Tally tally_counts(const McOptions& options, std::size_t m, CountFn count) {
    if (options.trials < 1) throw DomainError("trials must be >= 1");
    return run_replicas(options.trials, options.threads, [&](std::size_t i, Tally& t) {
        RandomStream rng(options.seed, i);
        try {
            const GafCount c = count(rng);
            const auto n = static_cast<std::uint64_t>(c.count);
            t.retries += static_cast<std::size_t>(c.retries);
            t.certified += 1;
            t.sum += n;
            t.sum_sq += n * n;
            if (static_cast<std::size_t>(c.count) >= m) t.successes += 1;
        } catch (const InconclusiveError&) {
            t.inconclusive += 1;
            t.retries += static_cast<std::size_t>(options.max_retries);
        }
    });
}

Tally tally_process(const PointProcess& process, double r, std::size_t m, const McOptions& options) {
    if (const auto* model = std::get_if<GafModel>(&process)) {
        model->check_radius(r);
        const std::size_t N = default_truncation(*model, radius_of_use_for(*model, r));
        return tally_counts(options, m, [&](RandomStream& rng) {
            return count_with_depth(*model, r, rng, options.max_retries, N);
        });
    }
    const RadialEnsemble ens = std::get<RadialEnsemble>(process);
    const std::size_t depth = count_depth(ens, r);
    return tally_counts(options, m, [&](RandomStream& rng) {
        return GafCount{static_cast<int>(count_below(ens, r, rng, depth)), 0};
    });
}

}  // namespace

std::string to_string(TailMethod method) {
    switch (method) {
        case TailMethod::ExactDP:
            return "ExactDP";
        case TailMethod::MonteCarlo:
            return "MonteCarlo";
        case TailMethod::EventLowerBound:
            return "EventLowerBound";
    }
    return "Unknown";
}

Interval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n) throw DomainError("clopper_pearson requires 0 <= k <= n, n >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
    const double a = 0.5 * (1.0 - confidence);
    const auto kd = static_cast<double>(k);
    const auto nd = static_cast<double>(n);
    Interval out;
    out.lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, a);
    out.hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - a);
    return out;
}

GafCount count_gaf_zeros(const GafModel& model, double r, RandomStream& rng, int max_retries) {
    model.check_radius(r);
    return count_with_depth(model, r, rng, max_retries, default_truncation(model, radius_of_use_for(model, r)));
}

TailEstimate direct_mc_tail(const PointProcess& process, double r, std::size_t m, const McOptions& options) {
    TailEstimate out;
    out.method = TailMethod::MonteCarlo;
    out.samples = options.trials;
    out.seed = options.seed;
    if (m == 0) {
        if (options.trials < 1) throw DomainError("trials must be >= 1");
        out.successes = options.trials;
        return out;  // log 1 = 0 on every field
    }
    const Tally t = tally_process(process, r, m, options);
    out.successes = t.successes;
    out.inconclusive = t.inconclusive;
    out.retries = t.retries;
    const Interval ci = clopper_pearson(t.successes, options.trials, options.confidence);
    out.log_p = std::log(static_cast<double>(t.successes) / static_cast<double>(options.trials));
    out.log_lo = std::log(ci.lo);
    out.log_hi = std::log(ci.hi);
    return out;
}

TailEstimate exact_tail(RadialEnsemble ens, double r, std::size_t m) {
    const LogBracket b = poisson_binomial_tail_log(bernoulli_probs(ens, r), m);
    TailEstimate out;
    out.method = TailMethod::ExactDP;
    out.log_lo = b.log_lower;
    out.log_hi = b.log_upper;
    out.log_p = b.log_lower;
    return out;
}

TailEstimate event_lower_bound(const EventSpec& ev) {
    TailEstimate out;
    out.method = TailMethod::EventLowerBound;
    out.log_p = event_log_prob(ev).exact;
    out.log_lo = out.log_p;
    out.log_hi = 0.0;
    return out;
}

CountStats mc_count_stats(const PointProcess& process, double r, const McOptions& options) {
    const Tally t = tally_process(process, r, 0, options);
    CountStats out;
    out.samples = t.certified;
    out.inconclusive = t.inconclusive;
    out.retries = t.retries;
    if (t.certified == 0) return out;
    const auto n = static_cast<double>(t.certified);
    out.mean = static_cast<double>(t.sum) / n;
    if (t.certified > 1) {
        const double ss = static_cast<double>(t.sum_sq) - n * out.mean * out.mean;
        out.variance = std::max(0.0, ss / (n - 1.0));
    }
    out.std_error = std::sqrt(out.variance / n);
    return out;
}

}  // namespace gafz
