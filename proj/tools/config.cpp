#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gafzeros/errors.hpp"
#include "json.hpp"

namespace gafz::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object with path-aware errors and unknown-key detection.
class Fields {
  public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* get(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& need(const std::string& key) {
        const json* v = get(key);
        if (!v) throw ConfigError(at(key), "required field is missing");
        return *v;
    }

    double number(const std::string& key) { return as_number(need(key), at(key)); }
    double number_or(const std::string& key, double fallback) {
        const json* v = get(key);
        return v ? as_number(*v, at(key)) : fallback;
    }
    std::optional<double> optional_number(const std::string& key) {
        const json* v = get(key);
        if (!v) return std::nullopt;
        return as_number(*v, at(key));
    }

    std::uint64_t count(const std::string& key) { return as_count(need(key), at(key)); }
    std::uint64_t count_or(const std::string& key, std::uint64_t fallback) {
        const json* v = get(key);
        return v ? as_count(*v, at(key)) : fallback;
    }

    std::string text(const std::string& key) {
        const json& v = need(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    /// A number or an array of numbers.
    std::vector<double> numbers(const std::string& key) {
        const json& v = need(key);
        if (v.is_number()) return {as_number(v, at(key))};
        if (!v.is_array() || v.empty()) throw ConfigError(at(key), "expected a number or a non-empty array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at(key) + "/" + std::to_string(i)));
        return out;
    }

    /// An integer, an array of integers, or {"from", "to", "step"}.
    std::vector<std::size_t> counts(const std::string& key) {
        const json& v = need(key);
        const std::string p = at(key);
        if (v.is_number()) return {as_count(v, p)};
        if (v.is_array()) {
            if (v.empty()) throw ConfigError(p, "expected a non-empty array");
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_count(v[i], p + "/" + std::to_string(i)));
            return out;
        }
        Fields range(v, p);
        const std::uint64_t from = range.count("from");
        const std::uint64_t to = range.count("to");
        const std::uint64_t step = range.count_or("step", 1);
        range.finish();
        if (step == 0) throw ConfigError(p + "/step", "must be >= 1");
        if (to < from) throw ConfigError(p + "/to", "must be >= from");
        if ((to - from) / step >= 1'000'000) throw ConfigError(p, "range has too many entries");
        std::vector<std::size_t> out;
        for (std::uint64_t m = from; m <= to; m += step) out.push_back(m);
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) throw ConfigError(at(key), "unknown field");
        }
    }

  private:
    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
        return x;
    }

    static std::uint64_t as_count(const json& v, const std::string& path) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) throw ConfigError(path, "must be nonnegative");
        throw ConfigError(path, "expected a nonnegative integer");
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

void check_radii(const std::vector<double>& radii, const std::string& path, double upper, const char* what) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require(radii[i] > 0.0 && radii[i] < upper, path + "/" + std::to_string(i), what);
    }
}

void check_ms(const std::vector<std::size_t>& ms, const std::string& path, std::size_t min, std::size_t max) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
        require(ms[i] >= min && ms[i] <= max, path + "/" + std::to_string(i),
                "must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    }
}

ProcessSpec parse_process(Fields& f) {
    ProcessSpec p;
    const std::string name = f.text("process");
    if (name == "planar") {
        p.kind = ProcessSpec::Kind::Planar;
    } else if (name == "hyperbolic") {
        p.kind = ProcessSpec::Kind::Hyperbolic;
        p.rho = f.number("rho");
        require(p.rho > 0.0, f.at("rho"), "must be > 0");
    } else if (name == "ginibre") {
        p.kind = ProcessSpec::Kind::Ginibre;
    } else if (name == "hyperbolic-one") {
        p.kind = ProcessSpec::Kind::HyperbolicOne;
    } else {
        throw ConfigError(f.at("process"), "expected planar, hyperbolic, ginibre or hyperbolic-one");
    }
    return p;
}

bool hyperbolic(const ProcessSpec& p) {
    return p.kind == ProcessSpec::Kind::Hyperbolic || p.kind == ProcessSpec::Kind::HyperbolicOne;
}

RadialEnsemble parse_ensemble(Fields& f) {
    const std::string name = f.text("ensemble");
    if (name == "ginibre") return RadialEnsemble::Ginibre;
    if (name == "hyperbolic-one") return RadialEnsemble::HyperbolicOne;
    throw ConfigError(f.at("ensemble"), "expected ginibre or hyperbolic-one");
}

ScatterConfig parse_scatter(Fields& f) {
    ScatterConfig c;
    c.r = f.number("r");
    require(c.r > 0.0 && c.r <= 10.0, f.at("r"), "must lie in (0, 10]");
    c.m = f.count("m");
    require(c.m >= 1 && c.m <= 400, f.at("m"), "must lie in [1, 400]");
    c.samples = f.count_or("samples", 1);
    require(c.samples >= 1 && c.samples <= 100000, f.at("samples"), "must lie in [1, 100000]");
    c.window = f.number_or("window", 2.0 * c.r);
    require(c.window >= c.r && c.window <= 20.0, f.at("window"), "must lie in [r, 20]");
    c.alpha = f.optional_number("alpha");
    if (c.alpha) require(*c.alpha >= 0.0, f.at("alpha"), "must be >= 0");
    return c;
}

McTailConfig parse_mc_tail(Fields& f) {
    McTailConfig c;
    c.process = parse_process(f);
    c.radii = f.numbers("radii");
    check_radii(c.radii, f.at("radii"), hyperbolic(c.process) ? 1.0 : 50.0,
                hyperbolic(c.process) ? "must lie in (0, 1)" : "must lie in (0, 50)");
    c.ms = f.counts("m");
    check_ms(c.ms, f.at("m"), 0, 100000);
    c.trials = f.count("trials");
    require(c.trials >= 1 && c.trials <= 1'000'000'000, f.at("trials"), "must lie in [1, 1e9]");
    c.confidence = f.number_or("confidence", 0.99);
    require(c.confidence > 0.0 && c.confidence < 1.0, f.at("confidence"), "must lie in (0, 1)");
    c.max_retries = static_cast<int>(f.count_or("max_retries", 3));
    require(c.max_retries <= 20, f.at("max_retries"), "must be <= 20");
    return c;
}

ExactTailConfig parse_exact_tail(Fields& f) {
    ExactTailConfig c;
    c.ensemble = parse_ensemble(f);
    c.radii = f.numbers("radii");
    const bool hyp = c.ensemble == RadialEnsemble::HyperbolicOne;
    check_radii(c.radii, f.at("radii"), hyp ? 1.0 : 50.0, hyp ? "must lie in (0, 1)" : "must lie in (0, 50)");
    c.ms = f.counts("m");
    check_ms(c.ms, f.at("m"), 0, 100000);
    return c;
}

EventBoundConfig parse_event_bound(Fields& f) {
    EventBoundConfig c;
    const std::string kind = f.text("kind");
    try {
        c.kind = event_kind_from_string(kind);
    } catch (const DomainError&) {
        throw ConfigError(f.at("kind"),
                          "expected PlanarDomination, HyperbolicDomination, VeryLargeDomination or ModerateGrouped");
    }
    c.radii = f.numbers("radii");
    switch (c.kind) {
        case EventKind::PlanarDomination:
            check_radii(c.radii, f.at("radii"), 50.0, "must lie in (0, 50)");
            c.ms = f.counts("m");
            check_ms(c.ms, f.at("m"), 1, 100000);
            break;
        case EventKind::HyperbolicDomination:
            c.rho = f.number("rho");
            require(c.rho > 0.0, f.at("rho"), "must be > 0");
            check_radii(c.radii, f.at("radii"), 1.0, "must lie in (0, 1)");
            c.ms = f.counts("m");
            check_ms(c.ms, f.at("m"), 1, 100000);
            break;
        case EventKind::VeryLargeDomination:
            c.alpha = f.number("alpha");
            c.gamma = f.number("gamma");
            require(c.alpha > 2.0 && c.alpha <= 6.0, f.at("alpha"), "must lie in (2, 6]");
            require(c.gamma > 0.0, f.at("gamma"), "must be > 0");
            check_radii(c.radii, f.at("radii"), 50.0, "must lie in (0, 50)");
            for (std::size_t i = 0; i < c.radii.size(); ++i) {
                require(c.radii[i] > 1.0, f.at("radii") + "/" + std::to_string(i), "must be > 1");
            }
            for (std::size_t i = 0; i < c.radii.size(); ++i) {
                require(c.radii[i] * c.radii[i] + c.gamma * std::pow(c.radii[i], c.alpha) <= 1e5,
                        f.at("radii") + "/" + std::to_string(i), "r^2 + gamma r^alpha must be <= 1e5");
            }
            break;
        case EventKind::ModerateGrouped:
            c.alpha = f.number("alpha");
            c.gamma = f.number("gamma");
            require(c.alpha > 1.0 && c.alpha < 2.0, f.at("alpha"), "must lie in (1, 2)");
            require(c.gamma > 0.0, f.at("gamma"), "must be > 0");
            check_radii(c.radii, f.at("radii"), 300.0, "must lie in (0, 300)");
            for (std::size_t i = 0; i < c.radii.size(); ++i) {
                const double r = c.radii[i];
                const double x = r * r;
                const double excess = c.gamma * std::pow(r, c.alpha);
                require(std::floor(x - excess) >= 1.0 && std::floor(2.0 * x) > std::ceil(x + excess),
                        f.at("radii") + "/" + std::to_string(i), "needs r^2 - gamma r^alpha >= 1 and 2 r^2 > m");
            }
            break;
    }
    return c;
}

ExponentFitConfig parse_exponent_fit(Fields& f) {
    ExponentFitConfig c;
    const std::string basis = f.text("basis");
    try {
        c.basis = fit_basis_from_string(basis);
    } catch (const DomainError&) {
        throw ConfigError(f.at("basis"), "expected m2logm+m2, m2logm, r2alogr or r3a-2");
    }
    c.flag_threshold = f.number_or("flag_threshold", 1e-2);
    require(c.flag_threshold > 0.0, f.at("flag_threshold"), "must be > 0");
    Fields data(f.need("data"), f.at("data"));
    const std::string source = data.text("source");
    const bool r_basis = c.basis == FitBasis::R2AlphaLogR || c.basis == FitBasis::R3AlphaMinus2;
    if (source == "exact-tail") {
        ExactTailConfig e = parse_exact_tail(data);
        require(!r_basis, f.at("basis"), "the exact-tail source fits against m; use an m basis");
        require(e.radii.size() == 1, data.at("radii"), "an m fit needs a single radius");
        c.data = e;
    } else if (source == "event-bound") {
        EventBoundConfig e = parse_event_bound(data);
        const bool derived_m = e.kind == EventKind::VeryLargeDomination || e.kind == EventKind::ModerateGrouped;
        if (r_basis) {
            require(derived_m, data.at("kind"), "an r basis needs VeryLargeDomination or ModerateGrouped");
        } else {
            require(!derived_m, data.at("kind"), "an m basis needs PlanarDomination or HyperbolicDomination");
            require(e.radii.size() == 1, data.at("radii"), "an m fit needs a single radius");
        }
        c.data = e;
    } else {
        throw ConfigError(data.at("source"), "expected exact-tail or event-bound");
    }
    data.finish();
    return c;
}

JensenConfig parse_jensen(Fields& f) {
    JensenConfig c;
    c.samples = f.count("samples");
    require(c.samples >= 1 && c.samples <= 1'000'000, f.at("samples"), "must lie in [1, 1e6]");
    c.r_min = f.number_or("r_min", c.r_min);
    c.r_max = f.number_or("r_max", c.r_max);
    c.outer_factor = f.number_or("outer_factor", c.outer_factor);
    c.outer_max = f.number_or("outer_max", c.outer_max);
    c.max_degree = f.count_or("max_degree", c.max_degree);
    require(c.r_min > 0.0, f.at("r_min"), "must be > 0");
    require(c.r_max >= c.r_min, f.at("r_max"), "must be >= r_min");
    require(c.outer_factor > 1.0, f.at("outer_factor"), "must be > 1");
    require(c.outer_max > c.r_max && c.outer_max <= 10.0, f.at("outer_max"), "must lie in (r_max, 10]");
    require(c.max_degree >= 1 && c.max_degree <= 2000, f.at("max_degree"), "must lie in [1, 2000]");
    return c;
}

IntensityConfig parse_intensity(Fields& f) {
    IntensityConfig c;
    c.process = parse_process(f);
    c.radii = f.numbers("radii");
    check_radii(c.radii, f.at("radii"), hyperbolic(c.process) ? 1.0 : 50.0,
                hyperbolic(c.process) ? "must lie in (0, 1)" : "must lie in (0, 50)");
    c.trials = f.count("trials");
    require(c.trials >= 2 && c.trials <= 1'000'000'000, f.at("trials"), "must lie in [2, 1e9]");
    c.max_retries = static_cast<int>(f.count_or("max_retries", 3));
    require(c.max_retries <= 20, f.at("max_retries"), "must be <= 20");
    return c;
}

KappaConfig parse_kappa(Fields& f) {
    KappaConfig c;
    c.radii = f.numbers("radii");
    check_radii(c.radii, f.at("radii"), 1.0, "must lie in (0, 1)");
    c.tol = f.number_or("tol", c.tol);
    require(c.tol > 0.0 && c.tol < 1e-2, f.at("tol"), "must lie in (0, 1e-2)");
    return c;
}

}  // namespace

PointProcess ProcessSpec::process() const {
    switch (kind) {
        case Kind::Planar:
            return GafModel::planar();
        case Kind::Hyperbolic:
            return GafModel::hyperbolic(rho);
        case Kind::Ginibre:
            return RadialEnsemble::Ginibre;
        case Kind::HyperbolicOne:
            return RadialEnsemble::HyperbolicOne;
    }
    return GafModel::planar();
}

std::string ProcessSpec::name() const {
    switch (kind) {
        case Kind::Planar:
            return "planar";
        case Kind::Hyperbolic:
            return "hyperbolic";
        case Kind::Ginibre:
            return "ginibre";
        case Kind::HyperbolicOne:
            return "hyperbolic-one";
    }
    return "unknown";
}

double ProcessSpec::expected_count(double r) const {
    switch (kind) {
        case Kind::Planar:
        case Kind::Ginibre:
            return r * r;
        case Kind::Hyperbolic:
            return gafz::expected_count(GafModel::hyperbolic(rho), r);
        case Kind::HyperbolicOne:
            return r * r / (1.0 - r * r);
    }
    return 0.0;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"scatter",      "mc-tail",      "exact-tail",      "event-bound",
                                                "exponent-fit", "jensen-check", "intensity-check", "kappa"};
    return names;
}

std::string config_hash(const std::string& canonical_json) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : canonical_json) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const std::string& json_text, const std::string& experiment,
                       std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    Fields f(doc, "");
    RunConfig cfg;
    cfg.experiment = experiment;
    if (const json* name = f.get("experiment")) {
        if (!name->is_string() || name->get<std::string>() != experiment) {
            throw ConfigError("/experiment", "does not match the subcommand '" + experiment + "'");
        }
    }
    if (seed_override) {
        f.get("seed");
        cfg.seed = *seed_override;
    } else {
        cfg.seed = f.count("seed");
    }
    const std::uint64_t threads = f.count_or("threads", 1);
    require(threads >= 1 && threads <= 1024, "/threads", "must lie in [1, 1024]");
    cfg.threads = static_cast<unsigned>(threads);

    if (experiment == "scatter") cfg.params = parse_scatter(f);
    else if (experiment == "mc-tail") cfg.params = parse_mc_tail(f);
    else if (experiment == "exact-tail") cfg.params = parse_exact_tail(f);
    else if (experiment == "event-bound") cfg.params = parse_event_bound(f);
    else if (experiment == "exponent-fit") cfg.params = parse_exponent_fit(f);
    else if (experiment == "jensen-check") cfg.params = parse_jensen(f);
    else if (experiment == "intensity-check") cfg.params = parse_intensity(f);
    else if (experiment == "kappa") cfg.params = parse_kappa(f);
    else throw ConfigError("/experiment", "unknown experiment '" + experiment + "'");
    f.finish();

    json canonical = doc;
    canonical.erase("seed");
    canonical.erase("threads");
    canonical["experiment"] = experiment;
    cfg.hash = config_hash(canonical.dump());
    return cfg;
}

RunConfig load_config(const std::string& path, const std::string& experiment,
                      std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("/", "cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), experiment, seed_override);
}

}  // namespace gafz::cli
