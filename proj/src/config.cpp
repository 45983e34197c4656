#include "fspde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fspde/errors.hpp"

namespace fspde {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
        }
    }
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError("config: missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) throw ConfigError("config: key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

CoefficientSpec parse_coefficient(const json& obj, const std::string& where) {
    reject_unknown_keys(obj, where, {"family", "params"});
    if (!obj.contains("family")) throw ConfigError("config: missing 'family' in " + where);
    const std::string family = obj["family"].get<std::string>();
    const json params = obj.value("params", json::object());
    if (family == "linear") {
        reject_unknown_keys(params, where + ".params", {"lambda"});
        return CoefficientSpec::linear(require_number(params, where + ".params", "lambda"));
    }
    if (family == "affine") {
        reject_unknown_keys(params, where + ".params", {"lambda", "mu"});
        return CoefficientSpec::affine(require_number(params, where + ".params", "lambda"),
                                       require_number(params, where + ".params", "mu"));
    }
    if (family == "bounded_sine") {
        reject_unknown_keys(params, where + ".params", {"amplitude", "omega"});
        return CoefficientSpec::bounded_sine(require_number(params, where + ".params", "amplitude"),
                                             require_number(params, where + ".params", "omega"));
    }
    if (family == "loglip") {
        reject_unknown_keys(params, where + ".params", {"p"});
        return CoefficientSpec::loglip(require_number(params, where + ".params", "p"));
    }
    throw ConfigError("config: unknown coefficient family '" + family + "' in " + where);
}

json coefficient_to_json(const CoefficientSpec& spec) {
    json params;
    switch (spec.family) {
        case CoefficientFamily::linear:
            params = {{"lambda", spec.p1}};
            break;
        case CoefficientFamily::affine:
            params = {{"lambda", spec.p1}, {"mu", spec.p2}};
            break;
        case CoefficientFamily::bounded_sine:
            params = {{"amplitude", spec.p1}, {"omega", spec.p2}};
            break;
        case CoefficientFamily::loglip:
            params = {{"p", spec.p1}};
            break;
    }
    return {{"family", spec.family_name()}, {"params", params}};
}

}  // namespace

std::vector<double> InitialCondition::sample(const GridSpec& grid) const {
    switch (kind) {
        case InitialKind::constant:
            return constant_ic(grid, value);
        case InitialKind::spike:
            return spike_ic(grid);
        case InitialKind::table:
            if (table_values.size() != grid.nx) {
                throw ConfigError("config: initial.values length must equal grid.nx");
            }
            return table_values;
    }
    throw ConfigError("config: bad initial condition");
}

double InitialCondition::sup(const GridSpec& grid) const {
    const auto v = sample(grid);
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

void RunConfig::validate() const {
    model.validate();
    grid.validate();
    if (replicas == 0) throw ConfigError("config: ensemble.replicas must be positive");
    if (!(constant_c >= 1.0)) throw ConfigError("config: constants.c must be >= 1");
    for (double n : truncation_levels) {
        if (!(n > 0.0) || n > 700.0) throw ConfigError("config: truncation levels must lie in (0, 700]");
    }
    for (std::size_t i = 0; i + 1 < truncation_levels.size(); ++i) {
        if (!(truncation_levels[i] < truncation_levels[i + 1])) {
            throw ConfigError("config: truncation.N_list must be increasing");
        }
    }
    for (double t : probe_times) {
        if (!(t > 0.0) || t > grid.T * (1.0 + 1e-12)) {
            throw ConfigError("config: probe times must lie in (0, T]");
        }
    }
    for (double x : probe_positions) {
        if (std::abs(x) > grid.half_width) {
            throw ConfigError("config: probe positions must lie within the box");
        }
    }
    for (double k : moment_orders) {
        if (!(k >= 1.0)) throw ConfigError("config: moment orders must be >= 1");
    }
    if (initial.kind == InitialKind::table && initial.table_values.size() != grid.nx) {
        throw ConfigError("config: initial.values length must equal grid.nx");
    }
}

std::vector<ProbePoint> RunConfig::probes(std::vector<std::string>* warnings) const {
    std::vector<ProbePoint> out;
    const double dt = grid.dt();
    const double dx = grid.dx();
    for (double t : probe_times) {
        auto m = static_cast<std::size_t>(std::llround(t / dt));
        m = std::clamp<std::size_t>(m, 1, grid.nt);
        const double snapped_t = dt * static_cast<double>(m);
        if (warnings && std::abs(snapped_t - t) > 1e-9 * std::max(1.0, t)) {
            std::ostringstream os;
            os << "probe time " << t << " snapped to grid time " << snapped_t;
            warnings->push_back(os.str());
        }
        for (double x : probe_positions) {
            auto j = static_cast<std::size_t>(
                std::clamp<long long>(std::llround((x + grid.half_width) / dx), 0,
                                      static_cast<long long>(grid.nx) - 1));
            const double snapped_x = -grid.half_width + dx * static_cast<double>(j);
            if (warnings && std::abs(snapped_x - x) > 1e-9 * std::max(1.0, std::abs(x))) {
                std::ostringstream os;
                os << "probe position " << x << " snapped to grid point " << snapped_x;
                warnings->push_back(os.str());
            }
            out.push_back({m, j});
        }
    }
    return out;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    reject_unknown_keys(root, "top level",
                        {"model", "grid", "coefficients", "initial", "ensemble", "truncation",
                         "probes", "constants"});

    RunConfig cfg;
    if (!root.contains("model") || !root.contains("grid")) {
        throw ConfigError("config: 'model' and 'grid' sections are required");
    }

    const json& model = root["model"];
    reject_unknown_keys(model, "model", {"alpha", "beta"});
    cfg.model.alpha = require_number(model, "model", "alpha");
    cfg.model.beta = require_number(model, "model", "beta");

    const json& grid = root["grid"];
    reject_unknown_keys(grid, "grid", {"T", "nt", "half_width", "nx"});
    cfg.grid.T = require_number(grid, "grid", "T");
    cfg.grid.nt = static_cast<std::size_t>(require_number(grid, "grid", "nt"));
    cfg.grid.half_width = require_number(grid, "grid", "half_width");
    cfg.grid.nx = static_cast<std::size_t>(require_number(grid, "grid", "nx"));

    if (root.contains("coefficients")) {
        const json& coeffs = root["coefficients"];
        reject_unknown_keys(coeffs, "coefficients", {"b", "sigma"});
        if (coeffs.contains("b")) cfg.b = parse_coefficient(coeffs["b"], "coefficients.b");
        if (coeffs.contains("sigma")) cfg.sigma = parse_coefficient(coeffs["sigma"], "coefficients.sigma");
    }

    if (root.contains("initial")) {
        const json& init = root["initial"];
        reject_unknown_keys(init, "initial", {"kind", "value", "values"});
        const std::string kind = init.value("kind", "constant");
        if (kind == "constant") {
            cfg.initial.kind = InitialKind::constant;
            cfg.initial.value = init.value("value", 0.0);
        } else if (kind == "spike") {
            cfg.initial.kind = InitialKind::spike;
        } else if (kind == "table") {
            cfg.initial.kind = InitialKind::table;
            if (!init.contains("values")) throw ConfigError("config: initial.values required for kind=table");
            cfg.initial.table_values = init["values"].get<std::vector<double>>();
        } else {
            throw ConfigError("config: unknown initial.kind '" + kind + "'");
        }
    }

    if (root.contains("ensemble")) {
        const json& ens = root["ensemble"];
        reject_unknown_keys(ens, "ensemble", {"replicas", "base_seed"});
        cfg.replicas = static_cast<std::size_t>(ens.value("replicas", 100.0));
        cfg.base_seed = ens.value("base_seed", std::uint64_t{1});
    }

    if (root.contains("truncation")) {
        const json& tr = root["truncation"];
        reject_unknown_keys(tr, "truncation", {"N_list"});
        if (tr.contains("N_list")) cfg.truncation_levels = tr["N_list"].get<std::vector<double>>();
    }

    if (root.contains("probes")) {
        const json& pr = root["probes"];
        reject_unknown_keys(pr, "probes", {"times", "positions", "moment_orders"});
        if (pr.contains("times")) cfg.probe_times = pr["times"].get<std::vector<double>>();
        if (pr.contains("positions")) cfg.probe_positions = pr["positions"].get<std::vector<double>>();
        if (pr.contains("moment_orders")) cfg.moment_orders = pr["moment_orders"].get<std::vector<double>>();
    }

    if (root.contains("constants")) {
        const json& cs = root["constants"];
        reject_unknown_keys(cs, "constants", {"c", "K0"});
        cfg.constant_c = cs.value("c", 4.0);
        if (cs.contains("K0")) cfg.K0 = cs["K0"].get<double>();
    }

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string RunConfig::to_json_text() const {
    json init;
    switch (initial.kind) {
        case InitialKind::constant:
            init = {{"kind", "constant"}, {"value", initial.value}};
            break;
        case InitialKind::spike:
            init = {{"kind", "spike"}};
            break;
        case InitialKind::table:
            init = {{"kind", "table"}, {"values", initial.table_values}};
            break;
    }
    json root = {
        {"model", {{"alpha", model.alpha}, {"beta", model.beta}}},
        {"grid",
         {{"T", grid.T}, {"nt", grid.nt}, {"half_width", grid.half_width}, {"nx", grid.nx}}},
        {"coefficients", {{"b", coefficient_to_json(b)}, {"sigma", coefficient_to_json(sigma)}}},
        {"initial", init},
        {"ensemble", {{"replicas", replicas}, {"base_seed", base_seed}}},
        {"truncation", {{"N_list", truncation_levels}}},
        {"probes",
         {{"times", probe_times}, {"positions", probe_positions}, {"moment_orders", moment_orders}}},
        {"constants", K0 ? json{{"c", constant_c}, {"K0", *K0}} : json{{"c", constant_c}}},
    };
    return root.dump(2);
}

std::uint64_t RunConfig::content_hash() const {
    // FNV-1a over the canonical serialization.
    const std::string text = to_json_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace fspde
