#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gafzeros/bounds.hpp"
#include "gafzeros/errors.hpp"
#include "gafzeros/fit.hpp"
#include "gafzeros/montecarlo.hpp"
#include "gafzeros/radial.hpp"
#include "gafzeros/rare_event.hpp"
#include "gafzeros/zero_count.hpp"

namespace py = pybind11;
using namespace gafz;

namespace {

RadialEnsemble ensemble(const std::string& name) {
    if (name == "ginibre") return RadialEnsemble::Ginibre;
    if (name == "hyperbolic-one") return RadialEnsemble::HyperbolicOne;
    throw DomainError("unknown ensemble '" + name + "'");
}

PointProcess process(const std::string& name, double rho) {
    if (name == "planar") return GafModel::planar();
    if (name == "hyperbolic") return GafModel::hyperbolic(rho);
    return ensemble(name);
}

py::dict tail_dict(const TailEstimate& t) {
    py::dict d;
    d["log_p"] = t.log_p;
    d["log_lo"] = t.log_lo;
    d["log_hi"] = t.log_hi;
    d["method"] = to_string(t.method);
    d["samples"] = t.samples;
    d["successes"] = t.successes;
    d["inconclusive"] = t.inconclusive;
    return d;
}

EventSpec build_event(const std::string& kind, double r, std::size_t m, double rho, double alpha, double gamma) {
    switch (event_kind_from_string(kind)) {
        case EventKind::PlanarDomination:
            return build_planar_domination(r, m);
        case EventKind::HyperbolicDomination:
            return build_hyperbolic_domination(rho, r, m);
        case EventKind::VeryLargeDomination:
            return build_very_large(r, alpha, gamma);
        case EventKind::ModerateGrouped:
            return build_moderate(r, alpha, gamma);
    }
    throw DomainError("unknown event kind");
}

}  // namespace

PYBIND11_MODULE(_gafzeros, mod) {
    mod.doc() = "Zeros of Gaussian analytic functions: exact tails, bounds, events and Monte Carlo";
    py::register_exception<DomainError>(mod, "DomainError", PyExc_ValueError);
    py::register_exception<InconclusiveError>(mod, "InconclusiveError", PyExc_RuntimeError);

    mod.def("bernoulli_probs", [](const std::string& ens, double r, double eps) {
        return bernoulli_probs(ensemble(ens), r, eps).probs();
    }, py::arg("ensemble"), py::arg("r"), py::arg("eps") = 1e-12);

    mod.def("exact_tail", [](const std::string& ens, double r, std::size_t m) {
        return tail_dict(exact_tail(ensemble(ens), r, m));
    }, py::arg("ensemble"), py::arg("r"), py::arg("m"));

    mod.def("direct_mc_tail", [](const std::string& proc, double r, std::size_t m, std::size_t trials,
                                 std::uint64_t seed, unsigned threads, double rho) {
        McOptions o;
        o.trials = trials;
        o.seed = seed;
        o.threads = threads;
        const PointProcess pp = process(proc, rho);
        TailEstimate t;
        {
            py::gil_scoped_release release;
            t = direct_mc_tail(pp, r, m, o);
        }
        return tail_dict(t);
    }, py::arg("process"), py::arg("r"), py::arg("m"), py::arg("trials"), py::arg("seed"),
       py::arg("threads") = 1, py::arg("rho") = 1.0);

    mod.def("ginibre_brackets", [](double r, std::size_t m) {
        const GinibreBrackets b = ginibre_thm21_brackets(r, m);
        return std::pair{b.log_lower, b.log_upper};
    }, py::arg("r"), py::arg("m"));

    mod.def("hyperbolic_sandwich", [](double r, std::size_t m) {
        const HyperbolicSandwich s = hyperbolic_one_sandwich(r, m);
        return std::pair{s.log_lower, s.log_upper};
    }, py::arg("r"), py::arg("m"));

    mod.def("sum_n_log_n", [](std::size_t m) {
        const SumNLogN s = sum_n_log_n(m);
        return std::tuple{s.exact, s.closed_form, s.upper};
    }, py::arg("m"));

    mod.def("kappa", [](double r) {
        const KappaResult k = kappa(r);
        return std::pair{k.kappa, k.argmax_eps};
    }, py::arg("r"));

    mod.def("predicted_exponent", [](const std::string& regime, std::optional<double> m, std::optional<double> r,
                                     std::optional<double> alpha, std::optional<double> gamma,
                                     std::optional<double> t, std::optional<double> eps) {
        ExponentParams p;
        p.m = m;
        p.r = r;
        p.alpha = alpha;
        p.gamma = gamma;
        p.t = t;
        p.eps = eps;
        return predicted_exponent(exponent_regime_from_string(regime), p);
    }, py::arg("regime"), py::kw_only(), py::arg("m") = py::none(), py::arg("r") = py::none(),
       py::arg("alpha") = py::none(), py::arg("gamma") = py::none(), py::arg("t") = py::none(),
       py::arg("eps") = py::none());

    mod.def("event_log_prob", [](const std::string& kind, double r, std::size_t m, double rho, double alpha,
                                 double gamma) {
        const EventSpec ev = build_event(kind, r, m, rho, alpha, gamma);
        const EventProbability p = event_log_prob(ev);
        py::dict d;
        d["m"] = ev.m;
        d["exact"] = p.exact;
        d["bound_form"] = p.bound_form;
        d["implies_domination"] = domination_budget(ev).implies_domination();
        return d;
    }, py::arg("kind"), py::arg("r"), py::arg("m") = 0, py::arg("rho") = 1.0, py::arg("alpha") = 0.0,
       py::arg("gamma") = 0.0);

    mod.def("find_roots", [](std::vector<cplx> coeffs) { return find_roots(coeffs).roots; }, py::arg("coeffs"));

    mod.def("count_zeros", [](std::vector<cplx> coeffs, double r) {
        return count_zeros_winding(as_analytic(Polynomial(std::move(coeffs))), r, 0.0).count;
    }, py::arg("coeffs"), py::arg("r"));

    mod.def("exponent_fit", [](const std::vector<double>& x, const std::vector<double>& y, const std::string& basis,
                               std::optional<double> alpha) {
        if (x.size() != y.size()) throw DomainError("x and y differ in length");
        std::vector<FitPoint> pts;
        for (std::size_t i = 0; i < x.size(); ++i) pts.push_back({x[i], y[i]});
        const FitResult f = exponent_fit(pts, fit_basis_from_string(basis), alpha);
        py::dict d;
        d["coefficients"] = f.coefficients;
        d["max_relative_residual"] = f.max_relative_residual;
        d["residual_flag"] = f.residual_flag;
        return d;
    }, py::arg("x"), py::arg("y"), py::arg("basis"), py::arg("alpha") = py::none());
}
