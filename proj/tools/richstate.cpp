#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "richstate/core/error.hpp"
#include "richstate/experiments/experiment.hpp"
#include "richstate/explorer/explorer.hpp"
#include "richstate/populations/population.hpp"
#include "richstate/universe/universe.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace richstate;

namespace {

struct CliConfig {
    std::string data_dir = "data";
    std::string registry;
    std::string personas;
    std::string org;
    std::string faults;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    fs::path data(const std::string& override_path, const char* file) const {
        return override_path.empty() ? fs::path(data_dir) / file : fs::path(override_path);
    }
};

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::configuration, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::configuration, path.string() + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& body) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    out << body;
    out.close();
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
}

PersonaLibrary load_library(const CliConfig& cli) {
    const auto path = cli.data(cli.personas, "personas.json");
    if (cli.personas.empty() && !fs::exists(path)) return default_persona_library();
    return persona_library_from_json(read_json(path));
}

json load_registry_doc(const CliConfig& cli) { return read_json(cli.data(cli.registry, "populations.json")); }

std::vector<PopulationConfig> load_registry(const CliConfig& cli) {
    return population_registry_from_json(load_registry_doc(cli), load_library(cli));
}

PopulationConfig registry_entry(const CliConfig& cli, const std::string& name) {
    for (auto& entry : load_registry(cli)) {
        if (entry.name == name) return entry;
    }
    throw Error(ErrorKind::configuration, "unknown population " + name);
}

fs::path population_file(const CliConfig& cli, const std::string& name) {
    return fs::path(cli.out_dir) / "populations" / (name + ".json");
}

Population load_population(const CliConfig& cli, const std::string& name) {
    const auto path = population_file(cli, name);
    if (!fs::exists(path)) {
        registry_entry(cli, name);
        throw Error(ErrorKind::configuration,
                    "population " + name + " has not been created; run `population create " + name + "`");
    }
    return Population::from_json(read_json(path));
}

void save_population(const CliConfig& cli, const std::string& name, const Population& p) {
    write_file(population_file(cli, name), p.to_json().dump(2) + "\n");
}

std::vector<FaultSpec> load_faults(const CliConfig& cli) {
    const auto path = cli.data(cli.faults, "faults.json");
    if (cli.faults.empty() && !fs::exists(path)) return {};
    return parse_fault_corpus(read_json(path));
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::validation:
    case ErrorKind::workflow:
        return 2;
    default:
        return 1;
    }
}

// population ---------------------------------------------------------------

void population_commands(CLI::App& app, CliConfig& cli, std::function<void()>& action) {
    auto* pop = app.add_subcommand("population", "Create, evolve, maintain and inspect populations");
    pop->require_subcommand(1);
    static std::string name;
    static std::optional<Generation> clock;

    auto* create = pop->add_subcommand("create", "Create a population from its registry entry");
    create->add_option("name", name, "Registry entry")->required();
    create->callback([&] {
        action = [&] {
            auto p = Population::create(registry_entry(cli, name), Rng::derive_seed(cli.seed, name));
            save_population(cli, name, p);
            std::cout << p.status().dump(2) << "\n";
        };
    });

    auto* evolve = pop->add_subcommand("evolve", "Advance an evolving population by one generation");
    evolve->add_option("name", name)->required();
    evolve->callback([&] {
        action = [&] {
            auto p = load_population(cli, name);
            p.evolve();
            save_population(cli, name, p);
            std::cout << p.status().dump(2) << "\n";
        };
    });

    auto* maintain = pop->add_subcommand("maintain", "Replace used-up users and restore the pool ratio");
    maintain->add_option("name", name)->required();
    maintain->callback([&] {
        action = [&] {
            auto p = load_population(cli, name);
            const auto report = p.maintain();
            save_population(cli, name, p);
            std::cout << "deactivated " << report.deactivated << ", created " << report.created << "\n"
                      << to_json(report).dump(2) << "\n";
        };
    });

    auto* status = pop->add_subcommand("status", "Print the status document");
    status->add_option("name", name)->required();
    status->callback([&] {
        action = [&] { std::cout << load_population(cli, name).status().dump(2) << "\n"; };
    });

    auto* reconcile = pop->add_subcommand("reconcile", "One runner pass over the registry");
    reconcile->add_option("--clock", clock, "Target generation for evolving populations");
    reconcile->callback([&] {
        action = [&] {
            std::map<std::string, Population> managed;
            const fs::path dir = fs::path(cli.out_dir) / "populations";
            if (fs::exists(dir)) {
                for (const auto& entry : fs::directory_iterator(dir)) {
                    if (entry.path().extension() != ".json") continue;
                    managed.emplace(entry.path().stem().string(), Population::from_json(read_json(entry.path())));
                }
            }
            const auto actions = runner_reconcile(load_registry_doc(cli), managed, clock, cli.seed,
                                                  load_library(cli));
            for (const auto& [n, p] : managed) save_population(cli, n, p);
            for (const auto& a : actions) {
                std::cout << a.population << ": " << a.action;
                if (!a.detail.empty()) std::cout << " (" << a.detail << ")";
                std::cout << "\n";
            }
        };
    });
}

// explore ------------------------------------------------------------------

struct ExploreOptions {
    std::string population;
    std::string mode = "rich";
    std::string policy = "novelty";
    std::uint32_t runs = 1;
    std::uint32_t budget = 100;
    double beta = 1.0;
    std::optional<std::uint64_t> seed;
    std::string build;
    unsigned jobs = 1;
    std::string output;
    bool commit = false;
};

void explore_commands(CLI::App& app, CliConfig& cli, std::function<void()>& action) {
    auto* explore = app.add_subcommand("explore", "Autonomous exploration runs");
    explore->require_subcommand(1);
    static ExploreOptions o;
    auto* run = explore->add_subcommand("run", "Execute exploration runs and write JSON lines");
    run->add_option("--population", o.population)->required();
    run->add_option("--mode", o.mode)->check(CLI::IsMember({"rich", "empty"}));
    run->add_option("--policy", o.policy)->check(CLI::IsMember({"uniform", "novelty"}));
    run->add_option("--runs,-R", o.runs)->check(CLI::PositiveNumber);
    run->add_option("--budget,-B", o.budget)->check(CLI::PositiveNumber);
    run->add_option("--beta", o.beta);
    run->add_option("--seed,-S", o.seed, "Defaults to the global seed");
    run->add_option("--build", o.build, "Build id selecting live faults; none when omitted");
    run->add_option("--jobs,-j", o.jobs)->check(CLI::PositiveNumber);
    run->add_option("--output,-o", o.output, "JSON-lines file");
    run->add_flag("--commit", o.commit, "Save the population's use counts back");
    run->callback([&] {
        action = [&] {
            const fs::path stored = population_file(cli, o.population);
            Population population = fs::exists(stored)
                                        ? Population::from_json(read_json(stored))
                                        : Population::create(registry_entry(cli, o.population),
                                                             Rng::derive_seed(cli.seed, o.population));
            ExplorationConfig config;
            config.mode = *parse_state_mode(o.mode);
            config.policy = *parse_policy(o.policy);
            config.budget = o.budget;
            config.beta = o.beta;
            config.seed = o.seed.value_or(cli.seed);
            validate(config);
            const auto corpus = load_faults(cli);
            const auto live = o.build.empty() ? std::vector<FaultSpec>{} : live_faults(corpus, o.build);
            const auto inst = o.build.empty() ? Instrumentation::canonical() : Instrumentation::for_build(o.build);
            std::vector<RunPlan> plans;
            try {
                plans = plan_runs(population, config, o.runs, o.build.empty() ? "explore" : o.build);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::exhausted) throw;
                throw Error(ErrorKind::exhausted, o.population +
                                                      " has no active users left for rich runs; run "
                                                      "`richstate population maintain " +
                                                      o.population + "` to replenish");
            }
            const auto results = execute_runs(plans, config, live, inst, o.jobs);
            const fs::path out = o.output.empty()
                                     ? fs::path(cli.out_dir) / "explore" /
                                           (o.population + "_" + o.mode + "_" + std::to_string(config.seed) + ".jsonl")
                                     : fs::path(o.output);
            std::string lines;
            std::set<std::string> endpoints, probes, crashes;
            for (const auto& r : results) {
                lines += to_json(r).dump() + "\n";
                endpoints.insert(r.coverage.endpoints_hit.begin(), r.coverage.endpoints_hit.end());
                probes.insert(r.coverage.probes_hit.begin(), r.coverage.probes_hit.end());
                for (const auto& c : r.crashes()) crashes.insert(c.signature());
            }
            write_file(out, lines);
            if (o.commit) save_population(cli, o.population, population);
            std::cout << "runs " << results.size() << "  unique endpoints " << endpoints.size()
                      << "  unique probes " << probes.size() << "  unique crashes " << crashes.size()
                      << "\nresults: " << out.string() << "\n";
        };
    });
}

// experiment ---------------------------------------------------------------

void experiment_commands(CLI::App& app, CliConfig& cli, std::function<void()>& action) {
    auto* experiment = app.add_subcommand("experiment", "Paired rich/empty comparisons");
    experiment->require_subcommand(1);
    static std::string config_path, output_dir;
    static std::optional<unsigned> jobs;
    auto* compare = experiment->add_subcommand("compare", "Run the shadow comparison and emit the report");
    compare->add_option("--config,-c", config_path)->required();
    compare->add_option("--output-dir,-o", output_dir);
    compare->add_option("--jobs,-j", jobs)->check(CLI::PositiveNumber);
    compare->callback([&] {
        action = [&] {
            auto config = experiment_config_from_json(read_json(config_path));
            if (jobs) config.jobs = *jobs;
            const auto registry = load_registry(cli);
            const auto base = experiment_population(config, registry);
            const auto runs = run_shadow_comparison(config, base, load_faults(cli));
            const auto report = build_report(config, runs);
            const fs::path dir = !output_dir.empty()       ? fs::path(output_dir)
                                 : config.output_dir ? fs::path(*config.output_dir)
                                                     : fs::path(cli.out_dir) / config.name;
            emit_report(report, dir);
            std::cout << summary_table(report) << "\nreport: " << dir.string() << "\n";
        };
    });
}

// universe -----------------------------------------------------------------

void universe_commands(CLI::App& app, CliConfig& cli, std::function<void()>& action) {
    auto* universe = app.add_subcommand("universe", "Test universe service");
    universe->require_subcommand(1);
    static std::string config_path, host;
    static std::optional<int> port;
    static std::optional<double> auto_evolve;
    static std::string state_dir;
    auto* serve = universe->add_subcommand("serve", "Serve the HTTP API until SIGINT or SIGTERM");
    serve->add_option("--config,-c", config_path)->required();
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_option("--auto-evolve", auto_evolve, "Evolve every N seconds")->check(CLI::PositiveNumber);
    serve->add_option("--state-dir", state_dir, "Where universe_state.json lives; overrides the config");
    serve->callback([&] {
        action = [&] {
            auto config = universe_config_from_file(config_path);
            if (!host.empty()) config.host = host;
            if (port) config.port = *port;
            if (!state_dir.empty()) config.data_dir = state_dir;
            if (!cli.org.empty()) config.org = org_map_from_json(read_json(cli.org));

            // Signals are taken synchronously by a watcher thread.
            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);

            Universe u(config);
            UniverseServer server(u);
            const int bound = server.bind(config.host, config.port);
            std::cout << "universe listening on " << config.host << ":" << bound << " (generation "
                      << u.generation() << ")" << std::endl;
            std::jthread evolver;
            if (auto_evolve) {
                const auto period = std::chrono::milliseconds(static_cast<long>(*auto_evolve * 1000));
                evolver = std::jthread([&u, period](std::stop_token st) { u.auto_evolve(period, st); });
            }
            std::thread watcher([&server, signals] {
                int sig = 0;
                sigwait(&signals, &sig);
                server.stop();
            });
            server.listen();
            evolver.request_stop();
            if (evolver.joinable()) evolver.join();
            watcher.join();
            u.persist();
            std::cout << "universe stopped at generation " << u.generation() << std::endl;
        };
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rich-state simulation testing platform"};
    app.require_subcommand(1);
    CliConfig cli;
    app.add_option("--data-dir", cli.data_dir, "Directory with registry, personas, org and faults");
    app.add_option("--registry", cli.registry, "Population registry (default <data-dir>/populations.json)");
    app.add_option("--personas", cli.personas, "Persona library (default <data-dir>/personas.json)");
    app.add_option("--org", cli.org, "Org map; overrides the one named by the universe config");
    app.add_option("--faults", cli.faults, "Fault corpus (default <data-dir>/faults.json)");
    app.add_option("--out-dir", cli.out_dir, "Output directory for state and artifacts");
    app.add_option("--seed", cli.seed, "Global seed");

    std::function<void()> action;
    population_commands(app, cli, action);
    explore_commands(app, cli, action);
    experiment_commands(app, cli, action);
    universe_commands(app, cli, action);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (action) action();
        return 0;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
