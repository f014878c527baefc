#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlneumann/asymptotics.hpp"
#include "nlneumann/mismatch.hpp"
#include "nlneumann/nonlinearity.hpp"
#include "nlneumann/rstar.hpp"
#include "nlneumann/solver.hpp"

namespace nlneumann {

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`. Throws std::runtime_error on I/O failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// %.17g; NaN prints as an empty field.
std::string format_number(double value);

std::string solution_csv(const DirichletSolution& solution);
std::string curve_csv(const MismatchCurve& curve);
std::string rates_csv(const RateFit& fit);
std::string identity_csv(const std::vector<IdentityResidual>& rows);
std::string trace_csv(const std::vector<TraceRow>& rows);

nlohmann::json to_json(const ExistenceReport& report, const std::vector<MismatchRoot>& roots);
nlohmann::json to_json(const RstarEstimate& estimate);
nlohmann::json to_json(const AssumptionReport& report);

}  // namespace nlneumann
