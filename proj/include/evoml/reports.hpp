#pragma once

#include "evoml/analysis.hpp"
#include "evoml/evolution.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoml {

inline constexpr int kReportFormatVersion = 1;

class ReportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(RunReport const& r);
RunReport run_report_from_json(nlohmann::json const& j);

nlohmann::json to_json(GenerationLog const& log);

nlohmann::json to_json(ComparisonDocument const& doc);
ComparisonDocument comparison_from_json(nlohmann::json const& j);

/// Wraps run reports in a versioned envelope (run_report.json).
nlohmann::json run_reports_document(std::vector<RunReport> const& reports);
std::vector<RunReport> run_reports_from_document(nlohmann::json const& j);

/// Reads a JSON report file and checks its format version; errors name the file.
nlohmann::json read_report_file(std::filesystem::path const& path);

std::string render_comparison_table(ComparisonDocument const& doc);
std::string render_runs_table(std::vector<RunReport> const& reports);

/// dataset,obj1_a,obj2_a,obj1_b,obj2_b,dominance with a = dynamic and b = static.
std::string dominance_csv(ComparisonDocument const& doc);

/// seed,score_a,score_b followed by the running means and which pipeline won each seed.
std::string seed_sensitivity_csv(std::vector<SeedScore> const& rows);

} // namespace evoml
