#include "bolab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "bolab/errors.hpp"

namespace bolab {
namespace {

using nlohmann::json;

std::string join(const std::string& parent, const std::string& key) {
    return parent.empty() ? key : parent + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!keys.contains(item.key())) throw ConfigError(join(path, item.key()), "unknown field");
    }
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
    const std::string where = join(path, key);
    if (!parent.contains(key)) throw ConfigError(where, "required field is missing");
    const json& v = parent.at(key);
    if (!v.is_object()) throw ConfigError(where, "expected an object");
    return v;
}

double number_at(const json& parent, const std::string& key, const std::string& path) {
    const std::string where = join(path, key);
    if (!parent.contains(key)) throw ConfigError(where, "required field is missing");
    const json& v = parent.at(key);
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
    return x;
}

double number_or(const json& parent, const std::string& key, const std::string& path, double fallback) {
    return parent.contains(key) ? number_at(parent, key, path) : fallback;
}

std::size_t count_at(const json& parent, const std::string& key, const std::string& path) {
    const std::string where = join(path, key);
    if (!parent.contains(key)) throw ConfigError(where, "required field is missing");
    const json& v = parent.at(key);
    if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
    if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u == 0) throw ConfigError(where, "must be positive");
        return static_cast<std::size_t>(u);
    }
    const auto s = v.get<std::int64_t>();
    if (s <= 0) throw ConfigError(where, fmt::format("must be positive, got {}", s));
    return static_cast<std::size_t>(s);
}

std::size_t count_or(const json& parent, const std::string& key, const std::string& path, std::size_t fallback) {
    return parent.contains(key) ? count_at(parent, key, path) : fallback;
}

bool bool_or(const json& parent, const std::string& key, const std::string& path, bool fallback) {
    if (!parent.contains(key)) return fallback;
    const json& v = parent.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
    return v.get<bool>();
}

Grid1D fixed_grid(const json& g, const std::string& path) {
    const double lo = number_at(g, "x_min", path);
    const double hi = number_at(g, "x_max", path);
    const std::size_t n = count_at(g, "n", path);
    if (!(lo < hi)) throw ConfigError(join(path, "x_max"), fmt::format("x_max = {} must exceed x_min = {}", hi, lo));
    if (n < kMinGridPoints) {
        throw ConfigError(join(path, "n"), fmt::format("need at least {} interior points, got {}", kMinGridPoints, n));
    }
    return build_grid(lo, hi, n);
}

NuclearGridRule nuclear_grid(const json& g, const std::string& path) {
    NuclearGridRule rule;
    if (g.contains("half_width_in_nuclear_widths")) {
        reject_unknown(g, path, {"half_width_in_nuclear_widths", "n"});
        rule.half_width_in_widths = number_at(g, "half_width_in_nuclear_widths", path);
        if (!(rule.half_width_in_widths > 0.0)) {
            throw ConfigError(join(path, "half_width_in_nuclear_widths"), "must be positive");
        }
        rule.n = count_at(g, "n", path);
        if (rule.n < kMinGridPoints) {
            throw ConfigError(join(path, "n"), fmt::format("need at least {} interior points", kMinGridPoints));
        }
        return rule;
    }
    reject_unknown(g, path, {"x_min", "x_max", "n"});
    rule.fixed = fixed_grid(g, path);
    rule.n = rule.fixed->n;
    return rule;
}

void parse_heavy(const json& h, const std::string& path, const ModelSpec& model, HeavySettings& out) {
    reject_unknown(h, path, {"region", "region_widths", "t1_scale", "ratio_threshold"});
    if (h.contains("region") && h.contains("region_widths")) {
        throw ConfigError(join(path, "region"), "give either region or region_widths, not both");
    }
    if (h.contains("region")) {
        const json& r = h.at("region");
        const std::string where = join(path, "region");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
            throw ConfigError(where, "expected [alpha, beta]");
        }
        const Interval iv{r[0].get<double>(), r[1].get<double>()};
        if (!(iv.lo < iv.hi)) throw ConfigError(where, "empty region: need alpha < beta");
        out.region = iv;
    }
    out.region_widths = number_or(h, "region_widths", path, out.region_widths);
    if (!(out.region_widths > 0.0)) throw ConfigError(join(path, "region_widths"), "must be positive");

    if (h.contains("t1_scale")) {
        const json& t = h.at("t1_scale");
        const std::string where = join(path, "t1_scale");
        if (t.is_number()) {
            out.t1_choice = T1Choice::Fixed;
            out.t1_value = t.get<double>();
            if (!(std::isfinite(out.t1_value) && out.t1_value > 0.0)) throw ConfigError(where, "must be positive");
        } else if (t == "auto") {
            out.t1_choice = T1Choice::Spacing;
        } else if (t == "expectation") {
            out.t1_choice = T1Choice::Expectation;
        } else if (t == "level_max") {
            out.t1_choice = T1Choice::LevelMax;
        } else {
            throw ConfigError(where, "expected a positive number, \"auto\", \"expectation\" or \"level_max\"");
        }
    }
    if (out.t1_choice == T1Choice::Spacing) {
        const bool harmonic = std::holds_alternative<HarmonicCoupling>(model.potential) ||
                              std::holds_alternative<SeparableHarmonic>(model.potential);
        if (!harmonic || !(closed_form_surface_stiffness(model) > 0.0)) {
            throw ConfigError(join(path, "t1_scale"), "\"auto\" needs a harmonic model with k1 > 0");
        }
    }
    out.ratio_threshold = number_or(h, "ratio_threshold", path, out.ratio_threshold);
    if (!(out.ratio_threshold > 0.0)) throw ConfigError(join(path, "ratio_threshold"), "must be positive");
}

void parse_solver(const json& s, const std::string& path, ExactOptions& out) {
    reject_unknown(s, path, {"dense_below", "block_size", "max_basis", "max_restarts", "rel_tol", "abs_tol"});
    out.dense_below = s.contains("dense_below") ? count_at(s, "dense_below", path) : out.dense_below;
    out.krylov.block_size = count_or(s, "block_size", path, out.krylov.block_size);
    if (s.contains("max_basis")) out.krylov.max_basis = count_at(s, "max_basis", path);
    out.krylov.max_restarts = count_or(s, "max_restarts", path, out.krylov.max_restarts);
    out.krylov.rel_tol = number_or(s, "rel_tol", path, out.krylov.rel_tol);
    out.krylov.abs_tol = number_or(s, "abs_tol", path, out.krylov.abs_tol);
    if (!(out.krylov.rel_tol > 0.0)) throw ConfigError(join(path, "rel_tol"), "must be positive");
    if (!(out.krylov.abs_tol > 0.0)) throw ConfigError(join(path, "abs_tol"), "must be positive");
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return fmt::format("line {}, column {}", line, col);
}

}  // namespace

json model_to_json(const ModelSpec& spec) {
    json potential = std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HarmonicCoupling>) {
                return {{"family", "harmonic_coupling"}, {"k1", p.k1}, {"k2", p.k2}};
            } else if constexpr (std::is_same_v<T, SoftCoulomb>) {
                return {{"family", "soft_coulomb"}, {"z", p.z}, {"s", p.s}, {"k1", p.k1}};
            } else {
                return {{"family", "separable_harmonic"}, {"k1", p.k1}, {"k2", p.k2}};
            }
        },
        spec.potential);
    return {{"M", spec.M}, {"m", spec.m}, {"potential", potential}};
}

ModelSpec model_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    reject_unknown(j, path, {"M", "m", "potential"});
    ModelSpec spec;
    spec.M = number_at(j, "M", path);
    spec.m = number_at(j, "m", path);
    if (!(spec.M > 0.0)) throw ConfigError(join(path, "M"), "must be positive");
    if (!(spec.m > 0.0)) throw ConfigError(join(path, "m"), "must be positive");

    const std::string ppath = join(path, "potential");
    const json& p = object_at(j, "potential", path);
    if (!p.contains("family") || !p.at("family").is_string()) {
        throw ConfigError(join(ppath, "family"), "expected one of harmonic_coupling, soft_coulomb, separable_harmonic");
    }
    const auto family = p.at("family").get<std::string>();
    if (family == "harmonic_coupling") {
        reject_unknown(p, ppath, {"family", "k1", "k2"});
        HarmonicCoupling h{number_at(p, "k1", ppath), number_at(p, "k2", ppath)};
        if (!(h.k1 >= 0.0)) throw ConfigError(join(ppath, "k1"), "must be >= 0");
        if (!(h.k2 > 0.0)) throw ConfigError(join(ppath, "k2"), "must be > 0");
        spec.potential = h;
    } else if (family == "soft_coulomb") {
        reject_unknown(p, ppath, {"family", "z", "s", "k1"});
        SoftCoulomb s{number_at(p, "z", ppath), number_at(p, "s", ppath), number_or(p, "k1", ppath, 0.0)};
        if (!(s.z > 0.0)) throw ConfigError(join(ppath, "z"), "must be > 0");
        if (!(s.s > 0.0)) throw ConfigError(join(ppath, "s"), "must be > 0");
        if (!(s.k1 >= 0.0)) throw ConfigError(join(ppath, "k1"), "must be >= 0");
        spec.potential = s;
    } else if (family == "separable_harmonic") {
        reject_unknown(p, ppath, {"family", "k1", "k2"});
        SeparableHarmonic s{number_at(p, "k1", ppath), number_at(p, "k2", ppath)};
        if (!(s.k1 >= 0.0)) throw ConfigError(join(ppath, "k1"), "must be >= 0");
        if (!(s.k2 >= 0.0)) throw ConfigError(join(ppath, "k2"), "must be >= 0");
        spec.potential = s;
    } else {
        throw ConfigError(join(ppath, "family"), fmt::format("unknown family \"{}\"", family));
    }
    return spec;
}

RunConfig parse_run_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError(line_column(text, at), "JSON syntax error");
    }
    if (!root.is_object()) throw ConfigError("(root)", "expected a JSON object");
    reject_unknown(root, "",
                   {"schema_version", "model", "grid1", "grid2", "n_surfaces", "projector_rank", "nuclear_levels",
                    "exact_levels", "born_huang", "heavy", "sweep", "solver", "threads", "seed", "output_dir"});

    RunConfig cfg;
    if (!root.contains("schema_version") || !root.at("schema_version").is_number_integer()) {
        throw ConfigError("schema_version", fmt::format("required integer field (current version {})",
                                                        kConfigSchemaVersion));
    }
    cfg.schema_version = root.at("schema_version").get<int>();
    if (cfg.schema_version != kConfigSchemaVersion) {
        throw ConfigError("schema_version", fmt::format("unsupported version {} (expected {})", cfg.schema_version,
                                                        kConfigSchemaVersion));
    }

    PipelineSettings& s = cfg.pipeline;
    if (!root.contains("model")) throw ConfigError("model", "required field is missing");
    s.model = model_from_json(root.at("model"), "model");
    s.grid1 = nuclear_grid(object_at(root, "grid1", ""), "grid1");
    const json& g2 = object_at(root, "grid2", "");
    reject_unknown(g2, "grid2", {"x_min", "x_max", "n"});
    s.grid2 = fixed_grid(g2, "grid2");

    s.n_surfaces = count_or(root, "n_surfaces", "", s.n_surfaces);
    if (s.n_surfaces > s.grid2.n) throw ConfigError("n_surfaces", "cannot exceed grid2.n");
    s.projector_rank = count_or(root, "projector_rank", "", std::min(s.projector_rank, s.n_surfaces));
    if (s.projector_rank > s.n_surfaces) throw ConfigError("projector_rank", "cannot exceed n_surfaces");
    s.nuclear_levels = count_or(root, "nuclear_levels", "", s.nuclear_levels);
    if (s.nuclear_levels > s.grid1.n) throw ConfigError("nuclear_levels", "cannot exceed grid1.n");
    s.exact_levels = count_or(root, "exact_levels", "", s.exact_levels);
    if (s.exact_levels > kMaxExactLevels) {
        throw ConfigError("exact_levels", fmt::format("at most {} levels are supported", kMaxExactLevels));
    }
    s.born_huang = bool_or(root, "born_huang", "", false);

    if (root.contains("heavy")) {
        parse_heavy(object_at(root, "heavy", ""), "heavy", s.model, s.heavy);
    } else {
        HeavySettings defaults;
        const bool harmonic = std::holds_alternative<HarmonicCoupling>(s.model.potential) ||
                              std::holds_alternative<SeparableHarmonic>(s.model.potential);
        if (!harmonic || !(closed_form_surface_stiffness(s.model) > 0.0)) defaults.t1_choice = T1Choice::Expectation;
        s.heavy = defaults;
    }
    if (root.contains("solver")) parse_solver(object_at(root, "solver", ""), "solver", s.exact);
    s.threads = count_or(root, "threads", "", 1);
    if (root.contains("seed")) {
        const json& v = root.at("seed");
        if (!v.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
        s.exact.krylov.seed = v.get<std::uint64_t>();
    }

    if (root.contains("sweep")) {
        const json& sw = object_at(root, "sweep", "");
        reject_unknown(sw, "sweep", {"mass_ratios"});
        if (!sw.contains("mass_ratios") || !sw.at("mass_ratios").is_array() || sw.at("mass_ratios").empty()) {
            throw ConfigError("sweep.mass_ratios", "expected a non-empty array of numbers");
        }
        const json& list = sw.at("mass_ratios");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = fmt::format("sweep.mass_ratios[{}]", i);
            if (!list[i].is_number()) throw ConfigError(where, "expected a number");
            const double r = list[i].get<double>();
            if (!(std::isfinite(r) && r > 0.0)) throw ConfigError(where, "must be positive");
            if (!cfg.mass_ratios.empty() && !(r > cfg.mass_ratios.back())) {
                throw ConfigError(where, "mass ratios must be strictly ascending");
            }
            cfg.mass_ratios.push_back(r);
        }
    }

    if (root.contains("output_dir")) {
        const json& v = root.at("output_dir");
        if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError("output_dir", "expected a path");
        cfg.output_dir = v.get<std::string>();
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", fmt::format("cannot read {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

}  // namespace bolab
