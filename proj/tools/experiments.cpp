#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "csv.hpp"
#include "gafzeros/bounds.hpp"
#include "gafzeros/errors.hpp"
#include "gafzeros/zero_count.hpp"

namespace gafz::cli {

namespace {

using u64 = std::uint64_t;

// Calls fn(i) for i in [0, n) on a pool; fn must only write to slot i of its output.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

struct Context {
    const RunConfig& cfg;
    std::filesystem::path dir;
    std::vector<std::string> written;

    Row row() const { return Row{cfg.hash, u64{cfg.seed}}; }

    void emit(const std::string& name, std::vector<std::string> header, const std::vector<Row>& rows) {
        header.insert(header.begin(), {"config_hash", "seed"});
        const std::string path = (dir / name).string();
        write_csv(path, header, rows);
        written.push_back(path);
    }
};

Cell opt(std::optional<double> v) { return v ? Cell{*v} : Cell{}; }

McOptions mc_options(const RunConfig& cfg, std::size_t trials, int max_retries) {
    McOptions o;
    o.trials = trials;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    o.max_retries = max_retries;
    return o;
}

void append_roots(const Context& ctx, std::vector<Row>& rows, std::size_t sample, const TruncatedGaf& f, double r,
                  double window) {
    const RootsResult roots = find_roots(f.scaled_coefficients());
    if (!roots.converged) throw InconclusiveError("root finder did not converge for sample " + std::to_string(sample));
    std::vector<cplx> kept;
    for (const cplx z : roots.roots) {
        if (std::abs(z) <= window) kept.push_back(z);
    }
    std::sort(kept.begin(), kept.end(), [](cplx a, cplx b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : std::arg(a) < std::arg(b);
    });
    for (const cplx z : kept) {
        Row row = ctx.row();
        row.insert(row.end(), {u64{sample}, z.real(), z.imag(), std::abs(z) < r});
        rows.push_back(std::move(row));
    }
}

void run_scatter(Context& ctx, const ScatterConfig& c) {
    BuildOptions opts;
    opts.alpha_override = c.alpha;
    const EventSpec ev = build_planar_domination(c.r, c.m, opts);
    const std::size_t N = std::max(event_truncation(ev), default_truncation(ev.model, c.window));
    const double tail = event_tail_bound(ev, N);
    std::vector<std::vector<Row>> cond(c.samples);
    std::vector<std::vector<Row>> free(c.samples);
    std::vector<Row> summary(c.samples);
    parallel_for(c.samples, ctx.cfg.threads, [&](std::size_t i) {
        RandomStream rc(ctx.cfg.seed, 2 * i);
        const CoefficientDraw d = conditioned_sample(ev, rc, N);
        const TruncatedGaf fc(ev.model, d, c.window);
        append_roots(ctx, cond[i], i, fc, c.r, c.window);
        RandomStream ru(ctx.cfg.seed, 2 * i + 1);
        const TruncatedGaf fu = sample_truncated_gaf(ev.model, c.window, ru);
        append_roots(ctx, free[i], i, fu, c.r, c.window);

        Row s = ctx.row();
        s.push_back(u64{i});
        s.push_back(verify_domination(ev, d));
        try {
            const CountResult cr = count_zeros_winding(as_analytic(fc), c.r, tail);
            s.push_back(std::int64_t{cr.count});
            s.push_back(cr.certified);
        } catch (const InconclusiveError&) {
            s.insert(s.end(), {Cell{}, false});
        }
        summary[i] = std::move(s);
    });
    auto flatten = [](std::vector<std::vector<Row>>& parts) {
        std::vector<Row> out;
        for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
        return out;
    };
    const std::vector<std::string> header{"sample", "re", "im", "in_disk"};
    ctx.emit("scatter_conditioned.csv", header, flatten(cond));
    ctx.emit("scatter_unconditioned.csv", header, flatten(free));
    ctx.emit("scatter_summary.csv", {"sample", "dominated", "count_in_disk", "certified"}, summary);
}

void run_mc_tail(Context& ctx, const McTailConfig& c) {
    const McOptions o = [&] {
        McOptions x = mc_options(ctx.cfg, c.trials, c.max_retries);
        x.confidence = c.confidence;
        return x;
    }();
    std::vector<Row> rows;
    for (const double r : c.radii) {
        for (const std::size_t m : c.ms) {
            const TailEstimate t = direct_mc_tail(c.process.process(), r, m, o);
            Row row = ctx.row();
            row.insert(row.end(), {c.process.name(), r, u64{m}, u64{t.samples}, u64{t.successes}, u64{t.inconclusive},
                                   u64{t.retries}, c.confidence, t.log_p, t.log_lo, t.log_hi});
            rows.push_back(std::move(row));
        }
    }
    ctx.emit("mc_tail.csv",
             {"process", "r", "m", "trials", "successes", "inconclusive", "retries", "confidence", "log_p",
              "log_p_lo", "log_p_hi"},
             rows);
}

std::string ensemble_name(RadialEnsemble e) { return e == RadialEnsemble::Ginibre ? "ginibre" : "hyperbolic-one"; }

void run_exact_tail(Context& ctx, const ExactTailConfig& c) {
    std::vector<Row> rows;
    for (const double r : c.radii) {
        const BernoulliProfile prof = bernoulli_probs(c.ensemble, r);
        for (const std::size_t m : c.ms) {
            const LogBracket b = poisson_binomial_tail_log(prof, m);
            Row row = ctx.row();
            row.insert(row.end(), {ensemble_name(c.ensemble), r, u64{m}, b.log_lower, b.log_upper, u64{b.indices}});
            std::optional<double> lo;
            std::optional<double> hi;
            if (c.ensemble == RadialEnsemble::Ginibre && m >= 1 && static_cast<double>(m) >= r * r) {
                const GinibreBrackets g = ginibre_thm21_brackets(r, m);
                lo = g.log_lower;
                hi = g.log_upper;
            } else if (c.ensemble == RadialEnsemble::HyperbolicOne && m >= 1) {
                const HyperbolicSandwich s = hyperbolic_one_sandwich(r, m);
                lo = s.log_lower;
                hi = s.log_upper;
            }
            row.insert(row.end(), {opt(lo), opt(hi)});
            row.push_back(lo ? Cell{*lo <= b.log_lower && b.log_upper <= *hi} : Cell{});
            rows.push_back(std::move(row));
        }
    }
    ctx.emit("exact_tail.csv",
             {"ensemble", "r", "m", "log_p_lower", "log_p_upper", "dp_indices", "bound_lower", "bound_upper",
              "contained"},
             rows);
}

struct EventRow {
    double r = 0.0;
    std::size_t m = 0;
    EventSpec ev;
    EventProbability prob;
    double scale = 0.0;
};

// Normalization of -log P for each kind.
double event_scale(const EventSpec& ev) {
    const double md = static_cast<double>(ev.m);
    switch (ev.kind) {
        case EventKind::PlanarDomination:
            return md * md * std::log(md);
        case EventKind::HyperbolicDomination:
            return md * (md + 1.0) * std::abs(std::log(ev.r));
        case EventKind::VeryLargeDomination:
            return *ev.params.gamma * *ev.params.gamma * std::pow(ev.r, 2.0 * *ev.params.alpha) * std::log(ev.r);
        case EventKind::ModerateGrouped:
            return std::pow(*ev.params.gamma, 3.0) * std::pow(ev.r, 3.0 * *ev.params.alpha - 2.0);
    }
    return 1.0;
}

std::vector<EventRow> event_rows(const EventBoundConfig& c) {
    std::vector<EventRow> out;
    auto add = [&](EventSpec ev) {
        EventRow row;
        row.r = ev.r;
        row.m = ev.m;
        row.prob = event_log_prob(ev);
        row.scale = event_scale(ev);
        row.ev = std::move(ev);
        out.push_back(std::move(row));
    };
    for (const double r : c.radii) {
        switch (c.kind) {
            case EventKind::PlanarDomination:
                for (const std::size_t m : c.ms) add(build_planar_domination(r, m));
                break;
            case EventKind::HyperbolicDomination:
                for (const std::size_t m : c.ms) add(build_hyperbolic_domination(c.rho, r, m));
                break;
            case EventKind::VeryLargeDomination:
                add(build_very_large(r, c.alpha, c.gamma));
                break;
            case EventKind::ModerateGrouped:
                add(build_moderate(r, c.alpha, c.gamma));
                break;
        }
    }
    return out;
}

void run_event_bound(Context& ctx, const EventBoundConfig& c) {
    std::vector<Row> rows;
    for (const EventRow& e : event_rows(c)) {
        const DominationBudget budget = domination_budget(e.ev);
        Row row = ctx.row();
        row.insert(row.end(), {to_string(c.kind), e.r, u64{e.m}, opt(e.ev.params.C), opt(e.ev.params.lambda),
                               e.ev.params.p ? Cell{u64{*e.ev.params.p}} : Cell{}, e.prob.exact, e.prob.bound_form,
                               e.scale, e.prob.exact / e.scale, budget.others_over_lead, budget.lead_threshold,
                               budget.implies_domination()});
        rows.push_back(std::move(row));
    }
    ctx.emit("event_bound.csv",
             {"kind", "r", "m", "C", "lambda", "group_width", "log_p_exact", "log_p_bound_form", "scale",
              "ratio_exact", "others_over_lead", "lead_threshold", "implies_domination"},
             rows);
}

void run_exponent_fit(Context& ctx, const ExponentFitConfig& c) {
    std::vector<FitPoint> pts;
    std::optional<double> alpha;
    if (const auto* e = std::get_if<ExactTailConfig>(&c.data)) {
        const BernoulliProfile prof = bernoulli_probs(e->ensemble, e->radii.front());
        for (const std::size_t m : e->ms) {
            pts.push_back({static_cast<double>(m), -poisson_binomial_tail_log(prof, m).log_lower});
        }
    } else {
        const auto& ev = std::get<EventBoundConfig>(c.data);
        const bool r_basis = c.basis == FitBasis::R2AlphaLogR || c.basis == FitBasis::R3AlphaMinus2;
        if (r_basis) alpha = ev.alpha;
        for (const EventRow& e : event_rows(ev)) {
            pts.push_back({r_basis ? e.r : static_cast<double>(e.m), -e.prob.exact});
        }
    }
    const FitResult fit = exponent_fit(pts, c.basis, alpha, c.flag_threshold);
    Row row = ctx.row();
    row.insert(row.end(), {to_string(c.basis), u64{pts.size()}, fit.coefficients[0],
                           fit.coefficients.size() > 1 ? Cell{fit.coefficients[1]} : Cell{},
                           fit.max_relative_residual, fit.residual_flag});
    ctx.emit("exponent_fit.csv", {"basis", "points", "c1", "c2", "max_relative_residual", "residual_flag"}, {row});
    std::vector<Row> rows;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Row p = ctx.row();
        p.insert(p.end(), {pts[i].x, -pts[i].y, fit.relative_residuals[i]});
        rows.push_back(std::move(p));
    }
    ctx.emit("exponent_fit_points.csv", {"x", "log_p", "relative_residual"}, rows);
}

void run_jensen(Context& ctx, const JensenConfig& c) {
    std::vector<Row> rows(c.samples);
    parallel_for(c.samples, ctx.cfg.threads, [&](std::size_t i) {
        RandomStream rng(ctx.cfg.seed, i);
        const double r = c.r_min + (c.r_max - c.r_min) * rng.uniform();
        const double R = std::min(c.outer_max, c.outer_factor * r);
        const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), R, rng);
        Row row = ctx.row();
        row.insert(row.end(), {u64{i}, r, R, u64{f.degree()}});
        if (f.degree() > c.max_degree) {
            row.insert(row.end(), {std::string("degree-cap"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}});
            rows[i] = std::move(row);
            return;
        }
        CountResult cr;
        try {
            cr = count_zeros_with_retry(as_analytic(f), r, f.tail_sup_bound(r));
        } catch (const InconclusiveError&) {
            row.insert(row.end(), {std::string("inconclusive"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}});
            rows[i] = std::move(row);
            return;
        }
        const RootsResult roots = find_roots(f.scaled_coefficients());
        JensenCheck j;
        try {
            j = jensen_residual(f, r, R);
        } catch (const InconclusiveError&) {
            row.insert(row.end(), {std::string("jensen-inconclusive"), std::int64_t{cr.count},
                                   roots.converged ? Cell{u64{count_in_disk(roots.roots, cr.radius)}} : Cell{},
                                   std::int64_t{cr.retries}, Cell{}, Cell{}, Cell{}, Cell{}});
            rows[i] = std::move(row);
            return;
        }
        const double lhs = static_cast<double>(j.n_r) * std::log(R / r);
        row.insert(row.end(), {std::string("certified"), std::int64_t{cr.count},
                               roots.converged ? Cell{u64{count_in_disk(roots.roots, cr.radius)}} : Cell{},
                               std::int64_t{cr.retries}, j.residual, lhs, j.integral_n_over_u,
                               lhs <= j.integral_n_over_u + 1e-12});
        rows[i] = std::move(row);
    });
    ctx.emit("jensen_check.csv",
             {"sample", "r", "R", "degree", "status", "winding_count", "root_count", "retries", "jensen_residual",
              "n_r_log_ratio", "integral_n_over_u", "inequality_holds"},
             rows);
}

void run_intensity(Context& ctx, const IntensityConfig& c) {
    const McOptions o = mc_options(ctx.cfg, c.trials, c.max_retries);
    std::vector<Row> rows;
    for (const double r : c.radii) {
        const CountStats s = mc_count_stats(c.process.process(), r, o);
        const double expected = c.process.expected_count(r);
        Row row = ctx.row();
        row.insert(row.end(), {c.process.name(), r, u64{c.trials}, u64{s.samples}, u64{s.inconclusive},
                               u64{s.retries}, s.mean, s.variance, s.std_error, expected,
                               s.std_error > 0.0 ? Cell{(s.mean - expected) / s.std_error} : Cell{}});
        rows.push_back(std::move(row));
    }
    ctx.emit("intensity_check.csv",
             {"process", "r", "trials", "samples", "inconclusive", "retries", "mean", "variance", "std_error",
              "expected", "z_score"},
             rows);
}

void run_kappa(Context& ctx, const KappaConfig& c) {
    std::vector<Row> rows;
    for (const double r : c.radii) {
        const KappaResult k = kappa(r, c.tol);
        const PoissonKernelConstants pk = poisson_kernel_constants(r, k.argmax_eps);
        Row row = ctx.row();
        row.insert(row.end(), {r, k.kappa, k.argmax_eps, pk.B, pk.A, 1.0 / std::abs(std::log(r))});
        rows.push_back(std::move(row));
    }
    ctx.emit("kappa.csv", {"r", "kappa", "argmax_eps", "B_at_argmax", "A_at_argmax", "inverse_abs_log_r"}, rows);
}

}  // namespace

std::vector<std::string> run_experiment(const RunConfig& config, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Context ctx{config, out_dir, {}};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ScatterConfig>) run_scatter(ctx, p);
            else if constexpr (std::is_same_v<T, McTailConfig>) run_mc_tail(ctx, p);
            else if constexpr (std::is_same_v<T, ExactTailConfig>) run_exact_tail(ctx, p);
            else if constexpr (std::is_same_v<T, EventBoundConfig>) run_event_bound(ctx, p);
            else if constexpr (std::is_same_v<T, ExponentFitConfig>) run_exponent_fit(ctx, p);
            else if constexpr (std::is_same_v<T, JensenConfig>) run_jensen(ctx, p);
            else if constexpr (std::is_same_v<T, IntensityConfig>) run_intensity(ctx, p);
            else run_kappa(ctx, p);
        },
        config.params);
    return ctx.written;
}

}  // namespace gafz::cli
