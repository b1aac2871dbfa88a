#pragma once

#include "evoml/evolution.hpp"

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace evoml::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

enum class Replication { single, five_by_two };

struct RunConfig {
    std::vector<std::filesystem::path> data;
    std::vector<std::string> labels; // empty: last column; one entry: shared; else one per dataset
    EvolutionConfig evolution;
    std::filesystem::path out { "evoml_out" };
    std::vector<FitnessMode> modes { FitnessMode::dynamic };
    Replication replication { Replication::single };
    double test_fraction { 0.5 };
    double bonferroni { 3.0 };

    void validate() const;
};

/// Flat `key=value` lines; `#` starts a comment. Keys mirror the long flag names.
std::map<std::string, std::string> read_config_file(std::filesystem::path const& path);

/// Builds a RunConfig from merged settings (config file overlaid by flags).
RunConfig make_run_config(std::map<std::string, std::string> const& settings, Replication default_replication);

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace evoml::cli
