#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "bolab/bo.hpp"
#include "bolab/clamped.hpp"
#include "bolab/diagnostics.hpp"
#include "bolab/exact.hpp"
#include "bolab/projection.hpp"

namespace bolab {

/// 17-significant-digit decimal text, as used in every CSV column.
std::string format_number(double x);

std::string pes_csv(const ElectronicField& field);
std::string theta_csv(const std::map<std::size_t, NuclearSolution>& nuclear);
std::string scaling_csv(const ComparisonReport& report);

nlohmann::json bo_energies_json(const std::map<std::size_t, NuclearSolution>& nuclear, const ElectronicField& field,
                                const FullHamiltonian& h);
nlohmann::json exact_energies_json(const ExactSolution& exact);
nlohmann::json heff_energies_json(const std::vector<EffectiveSolution>& by_rank, const ExactSolution& exact);

nlohmann::json report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const nlohmann::json& j);

/// Serialized JSON text with a trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Writes `text` to `path` in binary mode; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bolab
