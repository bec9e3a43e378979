#include "scenver/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "scenver/systems/barriers.hpp"

namespace scenver {

namespace {

using nlohmann::json;

/// A JSON object whose keys are checked against an allowed set.
class Section {
public:
    Section(const json& obj, std::string path, std::set<std::string> allowed) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
        for (const auto& [key, _] : obj_.items()) {
            if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in '" + path_ + "'");
        }
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    const json& raw(const std::string& key) const { return obj_.at(key); }
    std::string child(const std::string& key) const { return path_ + "." + key; }

    double number(const std::string& key, double fallback, double lo, double hi, bool lo_open = false) const
    {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) throw ConfigError("'" + child(key) + "' must be a number");
        const double x = v.get<double>();
        const bool low_ok = lo_open ? x > lo : x >= lo;
        if (!std::isfinite(x) || !low_ok || x > hi) {
            throw ConfigError("'" + child(key) + "' = " + std::to_string(x) + " is out of range");
        }
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi) const
    {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) throw ConfigError("'" + child(key) + "' must be an integer");
        const auto x = v.get<std::int64_t>();
        if (x < lo || x > hi) throw ConfigError("'" + child(key) + "' = " + std::to_string(x) + " is out of range");
        return x;
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const
    {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError("'" + child(key) + "' must be a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) const
    {
        if (!has(key)) return fallback;
        if (!obj_.at(key).is_boolean()) throw ConfigError("'" + child(key) + "' must be true or false");
        return obj_.at(key).get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) const
    {
        if (!has(key)) return fallback;
        if (!obj_.at(key).is_string()) throw ConfigError("'" + child(key) + "' must be a string");
        return obj_.at(key).get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::size_t expected_size = 0) const
    {
        const json& v = obj_.at(key);
        if (!v.is_array()) throw ConfigError("'" + child(key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                throw ConfigError("'" + child(key) + "' must contain finite numbers");
            }
            out.push_back(e.get<double>());
        }
        if (expected_size && out.size() != expected_size) {
            throw ConfigError("'" + child(key) + "' must have " + std::to_string(expected_size) + " entries");
        }
        return out;
    }

    template <int N>
    Eigen::Matrix<double, N, 1> fixed(const std::string& key, const Eigen::Matrix<double, N, 1>& fallback) const
    {
        if (!has(key)) return fallback;
        const auto v = numbers(key, N);
        return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
    }

private:
    const json& obj_;
    std::string path_;
};

Eigen::VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

SystemConfig parse_system(const json& doc)
{
    SystemConfig cfg;
    const std::string type = doc.is_object() && doc.contains("type") && doc.at("type").is_string()
                                 ? doc.at("type").get<std::string>()
                                 : "";
    cfg.type = type;
    if (type == "unicycle_fleet") {
        Section s(doc, "system", {"type", "robots", "substeps", "gains", "limits", "filter", "workspace"});
        auto& u = cfg.unicycle;
        u.n_robots = static_cast<int>(s.integer("robots", 3, 1, 64));
        u.substeps = static_cast<int>(s.integer("substeps", 10, 1, 10000));
        if (s.has("gains")) {
            Section g(s.raw("gains"), s.child("gains"), {"k_rho", "k_alpha", "stop_radius"});
            u.gains.k_rho = g.number("k_rho", u.gains.k_rho, 0.0, 1e6, true);
            u.gains.k_alpha = g.number("k_alpha", u.gains.k_alpha, 0.0, 1e6, true);
            u.gains.stop_radius = g.number("stop_radius", u.gains.stop_radius, 0.0, 1e3);
        }
        if (s.has("limits")) {
            Section l(s.raw("limits"), s.child("limits"), {"v_max", "omega_max"});
            u.limits.v_max = l.number("v_max", u.limits.v_max, 0.0, 1e3, true);
            u.limits.omega_max = l.number("omega_max", u.limits.omega_max, 0.0, 1e3, true);
        }
        if (s.has("filter")) {
            Section f(s.raw("filter"), s.child("filter"), {"enabled", "lookahead", "alpha", "safety_radius",
                                                               "center_radius", "box_bounds"});
            u.filter.enabled = f.boolean("enabled", u.filter.enabled);
            u.filter.lookahead = f.number("lookahead", u.filter.lookahead, 0.0, 10.0, true);
            u.filter.alpha = f.number("alpha", u.filter.alpha, 0.0, 1e9, true);
            u.filter.safety_radius = f.number("safety_radius", u.filter.safety_radius, 0.0, 100.0);
            u.filter.center_radius = f.number("center_radius", u.filter.center_radius, 0.0, 100.0);
            u.filter.box_bounds = f.boolean("box_bounds", u.filter.box_bounds);
        }
        if (s.has("workspace")) {
            Section w(s.raw("workspace"), s.child("workspace"), {"lower", "upper"});
            u.workspace_lower = w.fixed<3>("lower", u.workspace_lower);
            u.workspace_upper = w.fixed<3>("upper", u.workspace_upper);
            if ((u.workspace_lower.array() > u.workspace_upper.array()).any()) {
                throw ConfigError("'system.workspace' lower exceeds upper");
            }
        }
    } else if (type == "analytic") {
        Section s(doc, "system", {"type", "variant"});
        cfg.variant = parse_analytic_variant(s.string("variant", "circle"));
    } else if (type == "obstacle_course") {
        Section s(doc, "system", {"type", "obstacles", "goal", "gain", "v_max", "alpha", "filter_radius", "substeps",
                                  "start_lower", "start_upper", "obstacle_lower", "obstacle_upper"});
        auto& c = cfg.course;
        c.n_obstacles = static_cast<int>(s.integer("obstacles", c.n_obstacles, 1, 64));
        c.goal = s.fixed<2>("goal", c.goal);
        c.gain = s.number("gain", c.gain, 0.0, 1e6, true);
        c.v_max = s.number("v_max", c.v_max, 0.0, 1e3, true);
        c.alpha = s.number("alpha", c.alpha, 0.0, 1e9, true);
        c.filter_radius = s.number("filter_radius", c.filter_radius, 0.0, 100.0);
        c.substeps = static_cast<int>(s.integer("substeps", c.substeps, 1, 10000));
        c.start_lower = s.fixed<2>("start_lower", c.start_lower);
        c.start_upper = s.fixed<2>("start_upper", c.start_upper);
        c.obstacle_lower = s.fixed<2>("obstacle_lower", c.obstacle_lower);
        c.obstacle_upper = s.fixed<2>("obstacle_upper", c.obstacle_upper);
    } else {
        throw ConfigError("'system.type' must be one of unicycle_fleet, analytic, obstacle_course");
    }
    return cfg;
}

BarrierConfig parse_barrier(const json& doc)
{
    Section s(doc, "barrier", {"type", "safety_radius", "radius", "value", "dim", "scale", "offset", "lower", "upper",
                               "range", "domain"});
    BarrierConfig cfg;
    cfg.type = s.string("type", "");
    static const std::set<std::string> kinds{"fleet_distance", "obstacle_distance", "constant", "affine", "interval"};
    if (!kinds.count(cfg.type)) {
        throw ConfigError("'barrier.type' must be one of fleet_distance, obstacle_distance, constant, affine, interval");
    }
    cfg.safety_radius = s.number("safety_radius", cfg.safety_radius, 0.0, 100.0);
    cfg.radius = s.number("radius", cfg.radius, 0.0, 100.0);
    cfg.value = s.number("value", cfg.value, -1e9, 1e9);
    cfg.dim = static_cast<int>(s.integer("dim", 0, 0, 1 << 20));
    cfg.scale = s.number("scale", cfg.scale, -1e9, 1e9);
    cfg.offset = s.number("offset", cfg.offset, -1e9, 1e9);
    cfg.lower = s.number("lower", cfg.lower, -1e9, 1e9);
    cfg.upper = s.number("upper", cfg.upper, -1e9, 1e9);
    if (!s.has("range")) throw ConfigError("'barrier.range' with bounds m and M is required");
    Section r(s.raw("range"), s.child("range"), {"m", "M"});
    if (!r.has("m") || !r.has("M")) throw ConfigError("'barrier.range' needs both m and M");
    cfg.m = r.number("m", 0.0, 0.0, 1e12, true);
    cfg.M = r.number("M", 0.0, 0.0, 1e12, true);
    if (s.has("domain")) {
        Section d(s.raw("domain"), s.child("domain"),
                  {"state_lower", "state_upper", "param_lower", "param_upper", "discrete"});
        if (d.has("state_lower") != d.has("state_upper") || d.has("param_lower") != d.has("param_upper")) {
            throw ConfigError("'barrier.domain' bounds must come in lower/upper pairs");
        }
        if (d.has("state_lower")) {
            cfg.domain.state_lower = d.numbers("state_lower");
            cfg.domain.state_upper = d.numbers("state_upper");
        }
        if (d.has("param_lower")) {
            cfg.domain.param_lower = d.numbers("param_lower");
            cfg.domain.param_upper = d.numbers("param_upper");
        }
        if (d.has("discrete")) {
            const json& disc = d.raw("discrete");
            if (!disc.is_array()) throw ConfigError("'barrier.domain.discrete' must be an array of arrays");
            std::vector<std::vector<double>> sets;
            for (const auto& set : disc) {
                if (!set.is_array() || set.empty()) throw ConfigError("each discrete set must be a non-empty array");
                std::vector<double> values;
                for (const auto& v : set) {
                    if (!v.is_number()) throw ConfigError("discrete values must be numbers");
                    values.push_back(v.get<double>());
                }
                sets.push_back(std::move(values));
            }
            cfg.domain.discrete = std::move(sets);
        }
    }
    return cfg;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc)
{
    Section top(doc, "config", {"system", "barrier", "sampling", "validation", "bounds", "output"});
    if (!top.has("system")) throw ConfigError("missing 'system' section");
    if (!top.has("barrier")) throw ConfigError("missing 'barrier' section");
    if (!top.has("sampling")) throw ConfigError("missing 'sampling' section");

    RunConfig cfg;
    cfg.system = parse_system(top.raw("system"));
    cfg.barrier = parse_barrier(top.raw("barrier"));

    Section s(top.raw("sampling"), "sampling", {"trials", "horizon", "dt", "seed", "max_rejections", "zero_tol"});
    cfg.plan.n_trials = s.integer("trials", 100, 1, std::int64_t{1} << 40);
    cfg.plan.horizon = s.integer("horizon", 100, 1, std::int64_t{1} << 32);
    cfg.plan.dt = s.number("dt", 0.03, 0.0, 1e6, true);
    cfg.plan.seed = s.unsigned_integer("seed", 0);
    cfg.plan.max_rejections = s.integer("max_rejections", 10000, 1, std::int64_t{1} << 40);
    cfg.zero_tol = s.number("zero_tol", 1e-9, 0.0, 1.0, true);

    if (top.has("validation")) {
        Section v(top.raw("validation"), "validation", {"enabled", "trials"});
        cfg.validation_enabled = v.boolean("enabled", false);
        cfg.validation_trials = v.integer("trials", 1000, 1, std::int64_t{1} << 40);
    }
    if (top.has("bounds")) {
        Section b(top.raw("bounds"), "bounds", {"beta"});
        cfg.beta = b.number("beta", 1e-6, 0.0, 1.0, true);
        if (!(cfg.beta < 1.0)) throw ConfigError("'bounds.beta' must lie in (0, 1)");
    }
    if (top.has("output")) {
        Section o(top.raw("output"), "output", {"directory", "transitions_csv"});
        cfg.output_directory = o.string("directory", cfg.output_directory);
        cfg.write_transitions = o.boolean("transitions_csv", true);
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

nlohmann::ordered_json resolved_config_json(const RunConfig& cfg)
{
    nlohmann::ordered_json j;
    nlohmann::ordered_json sys;
    sys["type"] = cfg.system.type;
    if (cfg.system.type == "unicycle_fleet") {
        const auto& u = cfg.system.unicycle;
        sys["robots"] = u.n_robots;
        sys["substeps"] = u.substeps;
        sys["gains"] = {{"k_rho", u.gains.k_rho}, {"k_alpha", u.gains.k_alpha}, {"stop_radius", u.gains.stop_radius}};
        sys["limits"] = {{"v_max", u.limits.v_max}, {"omega_max", u.limits.omega_max}};
        sys["filter"] = {{"enabled", u.filter.enabled},
                         {"lookahead", u.filter.lookahead},
                         {"alpha", u.filter.alpha},
                         {"safety_radius", u.filter.safety_radius},
                         {"center_radius", u.filter.center_radius},
                         {"box_bounds", u.filter.box_bounds}};
        sys["workspace"] = {{"lower", to_std(u.workspace_lower)}, {"upper", to_std(u.workspace_upper)}};
    } else if (cfg.system.type == "analytic") {
        sys["variant"] = to_string(cfg.system.variant);
    } else {
        const auto& c = cfg.system.course;
        sys["obstacles"] = c.n_obstacles;
        sys["goal"] = to_std(c.goal);
        sys["gain"] = c.gain;
        sys["v_max"] = c.v_max;
        sys["alpha"] = c.alpha;
        sys["filter_radius"] = c.filter_radius;
        sys["substeps"] = c.substeps;
        sys["start_lower"] = to_std(c.start_lower);
        sys["start_upper"] = to_std(c.start_upper);
        sys["obstacle_lower"] = to_std(c.obstacle_lower);
        sys["obstacle_upper"] = to_std(c.obstacle_upper);
    }
    j["system"] = sys;

    const auto& b = cfg.barrier;
    nlohmann::ordered_json bar;
    bar["type"] = b.type;
    if (b.type == "fleet_distance") bar["safety_radius"] = b.safety_radius;
    if (b.type == "obstacle_distance") bar["radius"] = b.radius;
    if (b.type == "constant") bar["value"] = b.value;
    if (b.type == "affine") {
        bar["dim"] = b.dim;
        bar["scale"] = b.scale;
        bar["offset"] = b.offset;
    }
    if (b.type == "interval") {
        bar["dim"] = b.dim;
        bar["lower"] = b.lower;
        bar["upper"] = b.upper;
    }
    bar["range"] = {{"m", b.m}, {"M", b.M}};
    nlohmann::ordered_json dom = nlohmann::ordered_json::object();
    if (b.domain.state_lower) {
        dom["state_lower"] = *b.domain.state_lower;
        dom["state_upper"] = *b.domain.state_upper;
    }
    if (b.domain.param_lower) {
        dom["param_lower"] = *b.domain.param_lower;
        dom["param_upper"] = *b.domain.param_upper;
    }
    if (b.domain.discrete) dom["discrete"] = *b.domain.discrete;
    if (!dom.empty()) bar["domain"] = dom;
    j["barrier"] = bar;

    j["sampling"] = {{"trials", cfg.plan.n_trials},
                     {"horizon", cfg.plan.horizon},
                     {"dt", cfg.plan.dt},
                     {"seed", cfg.plan.seed},
                     {"max_rejections", cfg.plan.max_rejections},
                     {"zero_tol", cfg.zero_tol}};
    j["validation"] = {{"enabled", cfg.validation_enabled}, {"trials", cfg.validation_trials}};
    j["bounds"] = {{"beta", cfg.beta}};
    j["output"] = {{"directory", cfg.output_directory}, {"transitions_csv", cfg.write_transitions}};
    return j;
}

std::unique_ptr<ClosedLoopSystem> make_system(const SystemConfig& cfg)
{
    if (cfg.type == "unicycle_fleet") return std::make_unique<UnicycleFleet>(cfg.unicycle);
    if (cfg.type == "analytic") return std::make_unique<AnalyticSystem>(cfg.variant);
    if (cfg.type == "obstacle_course") return std::make_unique<ObstacleCourse>(cfg.course);
    throw ConfigError("unknown system type '" + cfg.type + "'");
}

BarrierFunction make_barrier(const BarrierConfig& cfg, const ClosedLoopSystem& sys)
{
    DomainBox domain;
    domain.state = sys.state_box();
    domain.params = sys.param_spec();
    const auto& o = cfg.domain;
    if (o.state_lower) {
        if (o.state_lower->size() != sys.state_dim() || o.state_upper->size() != sys.state_dim()) {
            throw ConfigError("'barrier.domain' state bounds must have " + std::to_string(sys.state_dim()) +
                              " entries");
        }
        domain.state = Box(to_vector(*o.state_lower), to_vector(*o.state_upper));
    }
    if (o.param_lower) {
        if (o.param_lower->size() != domain.params.continuous.size() ||
            o.param_upper->size() != domain.params.continuous.size()) {
            throw ConfigError("'barrier.domain' parameter bounds must have " +
                              std::to_string(domain.params.continuous.size()) + " entries");
        }
        domain.params.continuous = Box(to_vector(*o.param_lower), to_vector(*o.param_upper));
    }
    if (o.discrete) {
        if (o.discrete->size() != domain.params.discrete.size()) {
            throw ConfigError("'barrier.domain.discrete' must declare " +
                              std::to_string(domain.params.discrete.size()) + " sets");
        }
        domain.params.discrete = *o.discrete;
    }

    if (cfg.type == "fleet_distance") return make_fleet_distance_barrier(cfg.safety_radius, cfg.m, cfg.M, domain);
    if (cfg.type == "obstacle_distance") return make_obstacle_distance_barrier(cfg.radius, cfg.m, cfg.M, domain);
    if (cfg.type == "constant") return make_constant_barrier(cfg.value, cfg.m, cfg.M, domain);
    if (cfg.type == "affine") return make_affine_barrier(cfg.dim, cfg.scale, cfg.offset, cfg.m, cfg.M, domain);
    return make_interval_barrier(cfg.dim, cfg.lower, cfg.upper, cfg.m, cfg.M, domain);
}

}  // namespace scenver
