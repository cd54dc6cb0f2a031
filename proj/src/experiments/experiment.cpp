#include "richstate/experiments/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "richstate/core/error.hpp"
#include "richstate/populations/population.hpp"

namespace richstate {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    throw Error(ErrorKind::configuration, "experiment." + field + ": " + what);
}

std::uint32_t positive_u32(const json& doc, const char* key, std::uint32_t fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > UINT32_MAX) {
        field_error(key, "must be a positive integer");
    }
    return v.get<std::uint32_t>();
}

StateMode arm_mode(const json& arms, const char* key, StateMode fallback) {
    if (!arms.contains(key)) return fallback;
    if (!arms.at(key).is_string()) field_error(std::string("arms.") + key, "must be rich or empty");
    auto mode = parse_state_mode(arms.at(key).get<std::string>());
    if (!mode) field_error(std::string("arms.") + key, "must be rich or empty");
    return *mode;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::configuration, "experiment config must be an object");
    static const std::set<std::string> known = {
        "name", "builds", "runs_per_build", "budget", "policy", "beta", "seed", "population",
        "arms", "maintenance_batch", "jobs", "output_dir"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) field_error(key, "unknown field");
    }
    ExperimentConfig c;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) field_error("name", "must be a string");
        c.name = doc["name"].get<std::string>();
    }
    if (!doc.contains("builds") || !doc["builds"].is_array()) field_error("builds", "must be an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc["builds"].size(); ++i) {
        const auto& b = doc["builds"][i];
        const std::string field = "builds[" + std::to_string(i) + "]";
        if (!b.is_string() || b.get<std::string>().empty()) field_error(field, "must be a non-empty string");
        if (!seen.insert(b.get<std::string>()).second) field_error(field, "duplicate build id");
        c.builds.push_back(b.get<std::string>());
    }
    c.runs_per_build = positive_u32(doc, "runs_per_build", c.runs_per_build);
    c.budget = positive_u32(doc, "budget", c.budget);
    c.maintenance_batch = positive_u32(doc, "maintenance_batch", c.maintenance_batch);
    c.jobs = positive_u32(doc, "jobs", c.jobs);
    if (doc.contains("policy")) {
        auto p = doc["policy"].is_string() ? parse_policy(doc["policy"].get<std::string>()) : std::nullopt;
        if (!p) field_error("policy", "must be uniform or novelty");
        c.policy = *p;
    }
    if (doc.contains("beta")) {
        if (!doc["beta"].is_number()) field_error("beta", "must be a number");
        c.beta = doc["beta"].get<double>();
        if (!(c.beta > 0.0 && c.beta <= 1.0)) field_error("beta", "must lie in (0, 1]");
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) field_error("seed", "must be a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("population")) {
        if (!doc["population"].is_string()) field_error("population", "must be a string");
        c.population = doc["population"].get<std::string>();
    }
    if (doc.contains("arms")) {
        if (!doc["arms"].is_object()) field_error("arms", "must be an object");
        c.rich_arm = arm_mode(doc["arms"], "rich", c.rich_arm);
        c.empty_arm = arm_mode(doc["arms"], "empty", c.empty_arm);
    }
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) field_error("output_dir", "must be a string");
        c.output_dir = doc["output_dir"].get<std::string>();
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    json j{{"name", c.name},
           {"builds", c.builds},
           {"runs_per_build", c.runs_per_build},
           {"budget", c.budget},
           {"policy", to_string(c.policy)},
           {"beta", c.beta},
           {"seed", c.seed},
           {"population", c.population},
           {"arms", {{"rich", to_string(c.rich_arm)}, {"empty", to_string(c.empty_arm)}}},
           {"maintenance_batch", c.maintenance_batch},
           {"jobs", c.jobs}};
    if (c.output_dir) j["output_dir"] = *c.output_dir;
    return j;
}

Population experiment_population(const ExperimentConfig& config,
                                 std::span<const PopulationConfig> registry) {
    for (const auto& entry : registry) {
        if (entry.name == config.population) {
            return Population::create(entry, Rng::derive_seed(config.seed, "population"));
        }
    }
    throw Error(ErrorKind::configuration, "experiment.population: unknown population " + config.population);
}

namespace {

std::vector<RunResult> run_arm(const ExperimentConfig& config, const Population& base,
                               StateMode mode, const std::string& build,
                               std::span<const FaultSpec> live, const Instrumentation& inst) {
    Population population = base;
    ExplorationConfig ec;
    ec.budget = config.budget;
    ec.policy = config.policy;
    ec.beta = config.beta;
    ec.seed = config.seed;
    ec.mode = mode;
    std::vector<RunResult> results;
    results.reserve(config.runs_per_build);
    for (std::uint32_t start = 0; start < config.runs_per_build; start += config.maintenance_batch) {
        const std::uint32_t n = std::min(config.maintenance_batch, config.runs_per_build - start);
        const auto plans = plan_runs(population, ec, n, build, start);
        auto batch = execute_runs(plans, ec, live, inst, config.jobs);
        std::move(batch.begin(), batch.end(), std::back_inserter(results));
        if (mode == StateMode::rich) population.maintain();
    }
    return results;
}

}  // namespace

std::vector<BuildRuns> run_shadow_comparison(const ExperimentConfig& config,
                                             const Population& base,
                                             std::span<const FaultSpec> corpus) {
    if (config.maintenance_batch == 0 || config.runs_per_build == 0) {
        throw Error(ErrorKind::configuration, "runs_per_build and maintenance_batch must be positive");
    }
    std::vector<std::string> builds = config.builds;
    std::sort(builds.begin(), builds.end());
    if (std::adjacent_find(builds.begin(), builds.end()) != builds.end()) {
        throw Error(ErrorKind::configuration, "build ids must be unique");
    }
    std::vector<BuildRuns> out;
    for (const auto& build : builds) {
        const auto live = live_faults(corpus, build);
        const Instrumentation inst = Instrumentation::for_build(build);
        BuildRuns br;
        br.build_id = build;
        br.rich = run_arm(config, base, config.rich_arm, build, live, inst);
        br.empty = run_arm(config, base, config.empty_arm, build, live, inst);
        out.push_back(std::move(br));
    }
    return out;
}

namespace {

using Strings = std::set<std::string>;

std::set<std::string> crash_set(const RunResult& r) {
    std::set<std::string> out;
    for (const auto& c : r.crashes()) out.insert(c.signature());
    return out;
}

template <class Extract>
std::vector<Strings> per_run(const std::vector<RunResult>& runs, Extract extract) {
    std::vector<Strings> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(extract(r));
    return out;
}

Strings union_of(const std::vector<Strings>& sets) {
    Strings out;
    for (const auto& s : sets) out.insert(s.begin(), s.end());
    return out;
}

std::vector<double> sizes(const std::vector<Strings>& sets) {
    std::vector<double> out;
    for (const auto& s : sets) out.push_back(static_cast<double>(s.size()));
    return out;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

std::optional<int> maybe_increase(std::size_t empty_total, std::size_t rich_total) {
    if (empty_total == 0) return std::nullopt;
    return increase_pct(empty_total, rich_total);
}

/// Totals and set-based columns for one pair of coverage sets.
MetricSummary compare_sets(const Strings& rich, const Strings& empty) {
    const VennCounts v = venn_partition(empty, rich);
    MetricSummary m;
    m.empty_unique = v.only_a;
    m.rich_unique = v.only_b;
    m.shared = v.both;
    m.empty_total = empty.size();
    m.rich_total = rich.size();
    m.increase_pct = maybe_increase(m.empty_total, m.rich_total);
    return m;
}

void add_paired(MetricSummary& m, const std::vector<double>& rich, const std::vector<double>& empty) {
    if (rich.empty() || rich.size() != empty.size()) return;
    m.p_value = wilcoxon_signed_rank(rich, empty);
    m.a12 = vargha_delaney_a12(rich, empty);
    m.rich_mean = mean(rich);
    m.empty_mean = mean(empty);
}

/// Sum row: totals and uniques add up; pairing is by build.
MetricSummary sum_row(const std::vector<MetricSummary>& rows, const std::vector<double>& rich_by_build,
                      const std::vector<double>& empty_by_build, const std::vector<double>& rich_means,
                      const std::vector<double>& empty_means) {
    MetricSummary m;
    for (const auto& r : rows) {
        m.empty_unique += r.empty_unique;
        m.rich_unique += r.rich_unique;
        m.empty_total += r.empty_total;
        m.rich_total += r.rich_total;
        m.shared += r.shared;
    }
    m.increase_pct = maybe_increase(m.empty_total, m.rich_total);
    add_paired(m, rich_by_build, empty_by_build);
    m.rich_mean = mean(rich_means);
    m.empty_mean = mean(empty_means);
    return m;
}

}  // namespace

ComparisonReport build_report(const ExperimentConfig& config, std::span<const BuildRuns> input) {
    std::vector<const BuildRuns*> runs;
    for (const auto& b : input) runs.push_back(&b);
    std::sort(runs.begin(), runs.end(),
              [](const BuildRuns* a, const BuildRuns* b) { return a->build_id < b->build_id; });

    ComparisonReport report;
    report.config = config;
    std::vector<MetricSummary> ep_rows, pr_rows, single_rows;
    std::vector<double> ep_rich_totals, ep_empty_totals, pr_rich_totals, pr_empty_totals;
    std::vector<double> ep_rich_means, ep_empty_means, pr_rich_means, pr_empty_means;
    std::vector<double> cr_rich_totals, cr_empty_totals, cr_rich_means, cr_empty_means;
    std::vector<std::vector<Strings>> ep_rep_rich, ep_rep_empty, pr_rep_rich, pr_rep_empty;
    Strings all_ep_rich, all_ep_empty, all_pr_rich, all_pr_empty;
    Strings cum_rich, cum_empty;

    auto endpoints = [](const RunResult& r) { return Strings(r.coverage.endpoints_hit.begin(), r.coverage.endpoints_hit.end()); };
    auto probes = [](const RunResult& r) { return Strings(r.coverage.probes_hit.begin(), r.coverage.probes_hit.end()); };

    for (const BuildRuns* b : runs) {
        const auto ep_r = per_run(b->rich, endpoints), ep_e = per_run(b->empty, endpoints);
        const auto pr_r = per_run(b->rich, probes), pr_e = per_run(b->empty, probes);
        const auto cr_r = per_run(b->rich, crash_set), cr_e = per_run(b->empty, crash_set);

        CoverageRow row;
        row.label = b->build_id;
        row.endpoints = compare_sets(union_of(ep_r), union_of(ep_e));
        add_paired(row.endpoints, sizes(ep_r), sizes(ep_e));
        row.probes = compare_sets(union_of(pr_r), union_of(pr_e));
        add_paired(row.probes, sizes(pr_r), sizes(pr_e));
        report.coverage.push_back(row);
        ep_rows.push_back(row.endpoints);
        pr_rows.push_back(row.probes);
        ep_rich_totals.push_back(static_cast<double>(row.endpoints.rich_total));
        ep_empty_totals.push_back(static_cast<double>(row.endpoints.empty_total));
        pr_rich_totals.push_back(static_cast<double>(row.probes.rich_total));
        pr_empty_totals.push_back(static_cast<double>(row.probes.empty_total));
        ep_rich_means.push_back(row.endpoints.rich_mean);
        ep_empty_means.push_back(row.endpoints.empty_mean);
        pr_rich_means.push_back(row.probes.rich_mean);
        pr_empty_means.push_back(row.probes.empty_mean);

        const Strings single_rich = union_of(cr_r), single_empty = union_of(cr_e);
        cum_rich.insert(single_rich.begin(), single_rich.end());
        cum_empty.insert(single_empty.begin(), single_empty.end());
        CrashRow crow;
        crow.label = b->build_id;
        crow.single = compare_sets(single_rich, single_empty);
        add_paired(crow.single, sizes(cr_r), sizes(cr_e));
        crow.multi = compare_sets(cum_rich, cum_empty);
        report.crashes.push_back(crow);
        single_rows.push_back(crow.single);
        cr_rich_totals.push_back(static_cast<double>(crow.single.rich_total));
        cr_empty_totals.push_back(static_cast<double>(crow.single.empty_total));
        cr_rich_means.push_back(crow.single.rich_mean);
        cr_empty_means.push_back(crow.single.empty_mean);

        ep_rep_rich.push_back(ep_r);
        ep_rep_empty.push_back(ep_e);
        pr_rep_rich.push_back(pr_r);
        pr_rep_empty.push_back(pr_e);
        all_ep_rich.merge(union_of(ep_r));
        all_ep_empty.merge(union_of(ep_e));
        all_pr_rich.merge(union_of(pr_r));
        all_pr_empty.merge(union_of(pr_e));
    }

    if (!runs.empty()) {
        CoverageRow all;
        all.label = std::string(kSumRowLabel);
        all.endpoints = sum_row(ep_rows, ep_rich_totals, ep_empty_totals, ep_rich_means, ep_empty_means);
        all.probes = sum_row(pr_rows, pr_rich_totals, pr_empty_totals, pr_rich_means, pr_empty_means);
        report.coverage.push_back(all);

        CrashRow call;
        call.label = std::string(kSumRowLabel);
        call.single = sum_row(single_rows, cr_rich_totals, cr_empty_totals, cr_rich_means, cr_empty_means);
        call.multi = compare_sets(cum_rich, cum_empty);
        report.crashes.push_back(call);
    }

    report.endpoint_growth_rich = coverage_growth_curve(ep_rep_rich);
    report.endpoint_growth_empty = coverage_growth_curve(ep_rep_empty);
    report.probe_growth_rich = coverage_growth_curve(pr_rep_rich);
    report.probe_growth_empty = coverage_growth_curve(pr_rep_empty);
    report.endpoint_venn = venn_partition(all_ep_empty, all_ep_rich);
    report.probe_venn = venn_partition(all_pr_empty, all_pr_rich);
    report.crash_venn = venn_partition(cum_empty, cum_rich);
    report.rich_crashes = cum_rich;
    report.empty_crashes = cum_empty;
    return report;
}

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string pct(const std::optional<int>& v) { return v ? std::to_string(*v) : "NA"; }

json metric_json(const MetricSummary& m) {
    return {{"empty_unique", m.empty_unique},
            {"rich_unique", m.rich_unique},
            {"empty_total", m.empty_total},
            {"rich_total", m.rich_total},
            {"shared", m.shared},
            {"increase_pct", m.increase_pct ? json(*m.increase_pct) : json(nullptr)},
            {"p_value", m.p_value},
            {"a12", m.a12},
            {"empty_mean", m.empty_mean},
            {"rich_mean", m.rich_mean}};
}

json venn_json(const VennCounts& v) {
    return {{"only_empty", v.only_a}, {"both", v.both}, {"only_rich", v.only_b}};
}

}  // namespace

json to_json(const ComparisonReport& report) {
    json coverage = json::array();
    for (const auto& row : report.coverage) {
        coverage.push_back({{"build", row.label},
                            {"endpoints", metric_json(row.endpoints)},
                            {"probes", metric_json(row.probes)}});
    }
    json crashes = json::array();
    for (const auto& row : report.crashes) {
        crashes.push_back({{"build", row.label},
                           {"single", metric_json(row.single)},
                           {"multi", metric_json(row.multi)}});
    }
    return {{"config", to_json(report.config)},
            {"coverage", coverage},
            {"crashes", crashes},
            {"growth",
             {{"probes", {{"rich", report.probe_growth_rich}, {"empty", report.probe_growth_empty}}},
              {"endpoints",
               {{"rich", report.endpoint_growth_rich}, {"empty", report.endpoint_growth_empty}}}}},
            {"venn",
             {{"endpoints", venn_json(report.endpoint_venn)},
              {"probes", venn_json(report.probe_venn)},
              {"crashes", venn_json(report.crash_venn)}}},
            {"rich_crashes", report.rich_crashes},
            {"empty_crashes", report.empty_crashes}};
}

std::string coverage_table_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "build,endpoints_unique_empty,endpoints_unique_rich,endpoints_total_empty,"
           "endpoints_total_rich,probes_unique_empty,probes_unique_rich,probes_total_empty,"
           "probes_total_rich,endpoints_increase_pct,probes_increase_pct,endpoints_p_value,"
           "probes_p_value,endpoints_a12,probes_a12\n";
    for (const auto& r : report.coverage) {
        const auto& e = r.endpoints;
        const auto& p = r.probes;
        out << r.label << ',' << e.empty_unique << ',' << e.rich_unique << ',' << e.empty_total << ','
            << e.rich_total << ',' << p.empty_unique << ',' << p.rich_unique << ',' << p.empty_total
            << ',' << p.rich_total << ',' << pct(e.increase_pct) << ',' << pct(p.increase_pct) << ','
            << fixed(e.p_value, 6) << ',' << fixed(p.p_value, 6) << ',' << fixed(e.a12, 4) << ','
            << fixed(p.a12, 4) << '\n';
    }
    return out.str();
}

std::string crashes_table_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "build,single_unique_empty,single_unique_rich,single_total_empty,single_total_rich,"
           "multi_unique_empty,multi_unique_rich,multi_total_empty,multi_total_rich,"
           "single_increase_pct,multi_increase_pct,single_p_value,single_a12\n";
    for (const auto& r : report.crashes) {
        const auto& s = r.single;
        const auto& m = r.multi;
        out << r.label << ',' << s.empty_unique << ',' << s.rich_unique << ',' << s.empty_total << ','
            << s.rich_total << ',' << m.empty_unique << ',' << m.rich_unique << ',' << m.empty_total
            << ',' << m.rich_total << ',' << pct(s.increase_pct) << ',' << pct(m.increase_pct) << ','
            << fixed(s.p_value, 6) << ',' << fixed(s.a12, 4) << '\n';
    }
    return out.str();
}

std::string growth_curves_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "run_index,mode,mean_cumulative\n";
    auto emit = [&](const std::vector<double>& curve, const char* mode) {
        for (std::size_t i = 0; i < curve.size(); ++i) {
            out << (i + 1) << ',' << mode << ',' << fixed(curve[i], 4) << '\n';
        }
    };
    emit(report.probe_growth_empty, "empty");
    emit(report.probe_growth_rich, "rich");
    return out.str();
}

std::string venn_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "metric,only_empty,both,only_rich\n";
    auto row = [&](const char* name, const VennCounts& v) {
        out << name << ',' << v.only_a << ',' << v.both << ',' << v.only_b << '\n';
    };
    row("endpoints", report.endpoint_venn);
    row("probes", report.probe_venn);
    row("crashes", report.crash_venn);
    return out.str();
}

void emit_report(const ComparisonReport& report, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + directory.string() + ": " + ec.message());
    auto write = [&](const char* name, const std::string& body) {
        const auto path = directory / name;
        std::ofstream f(path, std::ios::binary);
        f << body;
        f.close();
        if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
    };
    write("report.json", to_json(report).dump(2) + "\n");
    write("coverage_table.csv", coverage_table_csv(report));
    write("crashes_table.csv", crashes_table_csv(report));
    write("growth_curves.csv", growth_curves_csv(report));
    write("venn.csv", venn_csv(report));
}

std::string summary_table(const ComparisonReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %9s %9s %7s %9s %9s %7s %9s\n", "build", "ep empty",
                  "ep rich", "ep +%", "pr empty", "pr rich", "pr +%", "pr p");
    out << line;
    for (const auto& r : report.coverage) {
        std::snprintf(line, sizeof line, "%-12s %9zu %9zu %7s %9zu %9zu %7s %9.2g\n", r.label.c_str(),
                      r.endpoints.empty_total, r.endpoints.rich_total,
                      pct(r.endpoints.increase_pct).c_str(), r.probes.empty_total, r.probes.rich_total,
                      pct(r.probes.increase_pct).c_str(), r.probes.p_value);
        out << line;
    }
    out << '\n';
    std::snprintf(line, sizeof line, "%-12s %12s %12s %12s %12s\n", "build", "single empty",
                  "single rich", "multi empty", "multi rich");
    out << line;
    for (const auto& r : report.crashes) {
        std::snprintf(line, sizeof line, "%-12s %12zu %12zu %12zu %12zu\n", r.label.c_str(),
                      r.single.empty_total, r.single.rich_total, r.multi.empty_total,
                      r.multi.rich_total);
        out << line;
    }
    out << "\nvenn (only empty / both / only rich)\n";
    auto venn = [&](const char* name, const VennCounts& v) {
        out << "  " << name << ": " << v.only_a << " / " << v.both << " / " << v.only_b << '\n';
    };
    venn("endpoints", report.endpoint_venn);
    venn("probes", report.probe_venn);
    venn("crashes", report.crash_venn);
    return out.str();
}

}  // namespace richstate
