#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "richstate/experiments/stats.hpp"
#include "richstate/explorer/explorer.hpp"
#include "richstate/personas/persona.hpp"
#include "richstate/platform/faults.hpp"

namespace richstate {

class Population;

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<std::string> builds;
    std::uint32_t runs_per_build = 200;
    std::uint32_t budget = 100;
    Policy policy = Policy::novelty;
    double beta = 1.0;
    std::uint64_t seed = 0;
    /// Population registry entry both arms start from.
    std::string population = "sapienz_default";
    /// Mode of each arm. Setting both to the same mode is a self-comparison.
    StateMode rich_arm = StateMode::rich;
    StateMode empty_arm = StateMode::empty;
    /// Rich-arm runs between maintenance passes.
    std::uint32_t maintenance_batch = 25;
    unsigned jobs = 1;
    std::optional<std::string> output_dir;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Errors name the offending field, e.g. "experiment.builds[1]".
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

/// Base population for an experiment: the registry entry named by
/// config.population, created from the "population" substream of the seed.
/// Throws Error(configuration) for an unknown name.
Population experiment_population(const ExperimentConfig& config,
                                 std::span<const PopulationConfig> registry);

struct BuildRuns {
    std::string build_id;
    std::vector<RunResult> rich;
    std::vector<RunResult> empty;
};

/// Runs both arms on every build. Each (build, arm) starts from its own copy
/// of `base`, and run i of both arms shares one seed. Builds run in id order.
std::vector<BuildRuns> run_shadow_comparison(const ExperimentConfig& config,
                                             const Population& base,
                                             std::span<const FaultSpec> corpus);

struct MetricSummary {
    std::size_t empty_unique = 0;
    std::size_t rich_unique = 0;
    std::size_t empty_total = 0;
    std::size_t rich_total = 0;
    std::size_t shared = 0;
    /// Empty when the empty total is zero.
    std::optional<int> increase_pct;
    double p_value = 1.0;
    double a12 = 0.5;
    /// Mean per-run coverage for build rows, mean over builds for the sum row.
    double empty_mean = 0.0;
    double rich_mean = 0.0;

    friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct CoverageRow {
    std::string label;
    MetricSummary endpoints;
    MetricSummary probes;

    friend bool operator==(const CoverageRow&, const CoverageRow&) = default;
};

struct CrashRow {
    std::string label;
    /// Crashes found in this build alone.
    MetricSummary single;
    /// Crashes found in this and every earlier build.
    MetricSummary multi;

    friend bool operator==(const CrashRow&, const CrashRow&) = default;
};

struct ComparisonReport {
    ExperimentConfig config;
    /// One row per build, then "All (sum)" when there are builds.
    std::vector<CoverageRow> coverage;
    std::vector<CrashRow> crashes;
    /// Mean cumulative unique coverage per run index; builds are the replicates.
    std::vector<double> probe_growth_rich, probe_growth_empty;
    std::vector<double> endpoint_growth_rich, endpoint_growth_empty;
    VennCounts endpoint_venn, probe_venn, crash_venn;
    /// Crash signatures over all builds.
    std::set<std::string> rich_crashes, empty_crashes;

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

inline constexpr std::string_view kSumRowLabel = "All (sum)";

ComparisonReport build_report(const ExperimentConfig& config, std::span<const BuildRuns> runs);

nlohmann::json to_json(const ComparisonReport& report);

std::string coverage_table_csv(const ComparisonReport& report);
std::string crashes_table_csv(const ComparisonReport& report);
std::string growth_curves_csv(const ComparisonReport& report);
std::string venn_csv(const ComparisonReport& report);

/// Writes report.json, coverage_table.csv, crashes_table.csv,
/// growth_curves.csv and venn.csv. Throws Error(io) naming the path.
void emit_report(const ComparisonReport& report, const std::filesystem::path& directory);

/// Human-readable tables for the terminal.
std::string summary_table(const ComparisonReport& report);

}  // namespace richstate
