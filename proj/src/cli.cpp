#include "bolab/cli.hpp"

#include <map>
#include <stdexcept>
#include <system_error>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "bolab/bo.hpp"
#include "bolab/errors.hpp"
#include "bolab/io.hpp"
#include "bolab/projection.hpp"

namespace bolab {
namespace {

namespace fs = std::filesystem;

void emit(const fs::path& dir, const std::string& name, const std::string& text, std::ostream& log) {
    write_text(dir / name, text);
    fmt::print(log, "wrote {}\n", (dir / name).string());
}

ElectronicField scan(const PipelineSettings& s, std::ostream& log) {
    const Grid1D grid1 = resolve_nuclear_grid(s, s.model);
    ScanOptions opt;
    opt.threads = s.threads;
    ElectronicField field = scan_pes(s.model, grid1, s.grid2, s.n_surfaces, opt);
    std::size_t crossings = 0;
    for (const auto& f : field.flags) crossings += f.kind == SliceFlag::Kind::Crossing ? 1 : 0;
    if (crossings > 0) fmt::print(log, "warning: {} slice pairs flagged as possible surface crossings\n", crossings);
    return field;
}

std::map<std::size_t, NuclearSolution> nuclear_all(const PipelineSettings& s, const ElectronicField& field) {
    NuclearOptions opt;
    opt.include_born_huang = s.born_huang;
    std::map<std::size_t, NuclearSolution> out;
    for (std::size_t a = 0; a < field.n_surfaces; ++a) {
        out.emplace(a, solve_nuclear(field, s.model, a, s.nuclear_levels, opt));
    }
    return out;
}

ExactSolution exact_for(const PipelineSettings& s, const FullHamiltonian& h) {
    return solve_exact(h, std::max<std::size_t>(s.exact_levels, 1), s.exact);
}

void run_pes(const RunConfig& c, std::ostream& log) {
    emit(c.output_dir, "pes.csv", pes_csv(scan(c.pipeline, log)), log);
}

void run_bo(const RunConfig& c, std::ostream& log) {
    const ElectronicField field = scan(c.pipeline, log);
    const auto nuclear = nuclear_all(c.pipeline, field);
    const FullHamiltonian h(c.pipeline.model, field.grid1, field.grid2);
    emit(c.output_dir, "theta.csv", theta_csv(nuclear), log);
    emit(c.output_dir, "bo_energies.json", dump_json(bo_energies_json(nuclear, field, h)), log);
}

void run_exact(const RunConfig& c, std::ostream& log) {
    const Grid1D grid1 = resolve_nuclear_grid(c.pipeline, c.pipeline.model);
    const FullHamiltonian h(c.pipeline.model, grid1, c.pipeline.grid2);
    emit(c.output_dir, "exact_energies.json", dump_json(exact_energies_json(exact_for(c.pipeline, h))), log);
}

void run_project(const RunConfig& c, std::ostream& log) {
    const ElectronicField field = scan(c.pipeline, log);
    const FullHamiltonian h(c.pipeline.model, field.grid1, field.grid2);
    const ExactSolution exact = exact_for(c.pipeline, h);
    std::vector<EffectiveSolution> by_rank;
    for (std::size_t rank = 1; rank <= c.pipeline.projector_rank; ++rank) {
        const Projector p(field, rank);
        by_rank.push_back(solve_effective(p, h, std::min<std::size_t>(exact.energies.size(), p.subspace_dim())));
    }
    emit(c.output_dir, "heff_energies.json", dump_json(heff_energies_json(by_rank, exact)), log);
}

void run_compare(const RunConfig& c, std::ostream& log) {
    emit(c.output_dir, "report.json", dump_json(report_to_json(compare_report(c.pipeline))), log);
}

void run_scaling(const RunConfig& c, std::ostream& log) {
    if (c.mass_ratios.empty()) throw ConfigError("sweep.mass_ratios", "the scaling command needs a mass-ratio sweep");
    const ComparisonReport report = kappa_scaling_study(c.pipeline, c.mass_ratios);
    emit(c.output_dir, "scaling.csv", scaling_csv(report), log);
    emit(c.output_dir, "report.json", dump_json(report_to_json(report)), log);
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"pes", "bo", "exact", "project", "compare", "scaling"};
    return names;
}

std::string usage() {
    return "usage: bolab <command> --config <path> [--out <dir>] [--threads <n>] [--seed <u64>]\n"
           "commands:\n"
           "  pes      scan the clamped surfaces          -> pes.csv\n"
           "  bo       nuclear levels on every surface    -> theta.csv, bo_energies.json\n"
           "  exact    full two-body eigenpairs           -> exact_energies.json\n"
           "  project  projected effective Hamiltonian    -> heff_energies.json\n"
           "  compare  consolidated BO vs exact report    -> report.json\n"
           "  scaling  mass-ratio sweep                   -> scaling.csv, report.json\n"
           "environment: BO_LAB_CONFIG, BO_LAB_OUT, BO_LAB_THREADS, BO_LAB_SEED\n";
}

void apply_overrides(RunConfig& config, const RunOverrides& overrides) {
    if (overrides.out) config.output_dir = *overrides.out;
    if (overrides.threads) {
        if (*overrides.threads == 0) throw ConfigError("--threads", "must be positive");
        config.pipeline.threads = *overrides.threads;
    }
    if (overrides.seed) config.pipeline.exact.krylov.seed = *overrides.seed;
}

int run(const std::string& command, const RunConfig& config, std::ostream& log) {
    static const std::map<std::string, void (*)(const RunConfig&, std::ostream&)> table = {
        {"pes", run_pes},         {"bo", run_bo},           {"exact", run_exact},
        {"project", run_project}, {"compare", run_compare}, {"scaling", run_scaling},
    };
    const auto it = table.find(command);
    if (it == table.end()) {
        fmt::print(log, "unknown command \"{}\"\n{}", command, usage());
        return kExitUsage;
    }
    try {
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec || !fs::is_directory(config.output_dir)) {
            throw ConfigError("output_dir", fmt::format("cannot create {}: {}", config.output_dir.string(), ec.message()));
        }
        it->second(config, log);
        return kExitOk;
    } catch (const ConfigError& e) {
        fmt::print(log, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const SolverError& e) {
        fmt::print(log, "solver failure: {}\n", e.what());
        if (!e.residuals().empty()) {
            fmt::print(log, "residuals:");
            for (double r : e.residuals()) fmt::print(log, " {:.3e}", r);
            fmt::print(log, "\n");
        }
        return kExitSolver;
    } catch (const std::invalid_argument& e) {
        fmt::print(log, "config error: {}\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        fmt::print(log, "error: {}\n", e.what());
        return kExitSolver;
    }
}

int run_command(const std::string& command, const fs::path& config_path, const RunOverrides& overrides,
                std::ostream& log) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        fmt::print(log, "unknown command \"{}\"\n{}", command, usage());
        return kExitUsage;
    }
    RunConfig config;
    try {
        config = load_run_config(config_path);
        apply_overrides(config, overrides);
    } catch (const ConfigError& e) {
        fmt::print(log, "config error in {}: {}\n", config_path.string(), e.what());
        return kExitConfig;
    }
    return run(command, config, log);
}

}  // namespace bolab
