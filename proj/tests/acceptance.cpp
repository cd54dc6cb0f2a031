// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "richstate/core/error.hpp"
#include "richstate/experiments/experiment.hpp"
#include "richstate/platform/actions.hpp"
#include "richstate/platform/catalog.hpp"
#include "richstate/populations/population.hpp"

using namespace richstate;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = RICHSTATE_SOURCE_DIR;

struct Failure {
    std::string detail;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    return json::parse(in);
}

int failures = 0;

void criterion(const std::string& name, const std::function<void()>& check) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        check();
    } catch (const Failure& f) {
        ok = false;
        detail = f.detail;
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %-34s %7.2fs%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                detail.empty() ? "" : "  ", detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

// ---------------------------------------------------------------- oracles

double sign_flip_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != y[i]) d.push_back(x[i] - y[i]);
    }
    if (d.empty()) return 1.0;
    const std::size_t m = d.size();
    std::vector<double> rank(m);
    for (std::size_t i = 0; i < m; ++i) {
        double below = 0, tied = 0;
        for (double e : d) {
            below += std::fabs(e) < std::fabs(d[i]);
            tied += std::fabs(e) == std::fabs(d[i]);
        }
        rank[i] = below + (tied + 1) / 2.0;
    }
    double w = 0;
    for (std::size_t i = 0; i < m; ++i) w += d[i] > 0 ? rank[i] : 0.0;
    double lo = 0, hi = 0;
    const std::uint64_t n = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < n; ++mask) {
        double s = 0;
        for (std::size_t i = 0; i < m; ++i) s += (mask >> i & 1) ? rank[i] : 0.0;
        lo += s <= w + 1e-9;
        hi += s >= w - 1e-9;
    }
    return std::min(1.0, 2 * std::min(lo, hi) / static_cast<double>(n));
}

// ---------------------------------------------------------------- scenario

struct Scenario {
    std::vector<PopulationConfig> registry;
    std::vector<FaultSpec> corpus;
    ExperimentConfig config;
};

const Scenario& scenario() {
    static const Scenario s = [] {
        Scenario out;
        const auto library = persona_library_from_json(read_json(kSource / "data/personas.json"));
        out.registry = population_registry_from_json(read_json(kSource / "data/populations.json"), library);
        out.corpus = parse_fault_corpus(read_json(kSource / "data/faults.json"));
        out.config = experiment_config_from_json(read_json(kSource / "data/experiment.json"));
        return out;
    }();
    return s;
}

const std::vector<ComparisonReport>& seed_reports() {
    static const std::vector<ComparisonReport> reports = [] {
        std::vector<ComparisonReport> out;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ExperimentConfig c = scenario().config;
            c.seed = seed;
            const auto base = experiment_population(c, scenario().registry);
            out.push_back(build_report(c, run_shadow_comparison(c, base, scenario().corpus)));
        }
        return out;
    }();
    return reports;
}

std::string at_seed(std::size_t i) { return "seed " + std::to_string(i + 1); }

}  // namespace

int main() {
    criterion("increase-table arithmetic", [] {
        const std::vector<std::tuple<std::size_t, std::size_t, int>> cells{
            {451, 662, 47},   {244, 424, 74},   {124, 158, 27}, {104, 132, 27}, {204, 342, 68},
            {1270, 1657, 30}, {697, 1040, 49},  {584, 670, 15}, {398, 475, 19}, {477, 736, 54},
            {21, 80, 281},    {260, 560, 115}};
        for (auto [e, r, want] : cells) {
            const int got = increase_pct(e, r);
            require(got == want, "(" + std::to_string(e) + "," + std::to_string(r) + ") gave " +
                                     std::to_string(got));
        }
    });

    criterion("venn consistency", [] {
        const VennCounts v = venn_from_totals(451, 662, 28);
        require(v == VennCounts{28, 423, 239}, "got " + std::to_string(v.both) + "/" + std::to_string(v.only_b));
    });

    criterion("wilcoxon enumeration oracle", [] {
        std::vector<double> ten(10), zeros(10, 0.0);
        for (int i = 0; i < 10; ++i) ten[i] = i + 1;
        require(wilcoxon_signed_rank(ten, zeros) == 2.0 / 1024, "n=10 all positive");
        const std::vector<double> five{1, 2, 3, 4, -5}, five0(5, 0.0);
        require(wilcoxon_signed_rank(five, five0) == 0.625, "n=5 canonical case");
        std::mt19937_64 gen(7);
        for (int trial = 0; trial < 3000; ++trial) {
            const std::size_t n = 1 + gen() % 12;
            std::uniform_int_distribution<int> dist(0, 1 + static_cast<int>(gen() % 8));
            std::vector<double> x(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = dist(gen);
                y[i] = dist(gen);
            }
            const double got = wilcoxon_signed_rank(x, y), want = sign_flip_oracle(x, y);
            require(std::fabs(got - want) <= 1e-12, "trial " + std::to_string(trial));
        }
    });

    criterion("a12 effect size", [] {
        const std::vector<double> hi{10, 11, 12}, lo{1, 2, 3}, same{4, 4, 4};
        require(vargha_delaney_a12(hi, lo) == 1.0, "dominant");
        require(vargha_delaney_a12(same, same) == 0.5, "identical");
        std::mt19937_64 gen(11);
        std::uniform_int_distribution<int> dist(0, 9);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> a(1 + gen() % 15), b(1 + gen() % 15);
            for (auto& v : a) v = dist(gen);
            for (auto& v : b) v = dist(gen);
            require(std::fabs(vargha_delaney_a12(a, b) + vargha_delaney_a12(b, a) - 1.0) < 1e-12,
                    "antisymmetry trial " + std::to_string(trial));
        }
    });

    criterion("rich coverage exceeds empty", [] {
        std::size_t gated = 0;
        for (const auto& f : scenario().corpus) {
            require(!f.endpoint.starts_with("onboarding."), "onboarding fault " + f.id);
            gated += !f.conditions.empty();
        }
        require(gated >= 5, "fewer than 5 state-gated faults");
        const auto& reports = seed_reports();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& r = reports[i];
            for (const auto& row : r.coverage) {
                if (row.label == kSumRowLabel) continue;
                require(row.endpoints.rich_mean > row.endpoints.empty_mean,
                        at_seed(i) + " " + row.label + " endpoints");
                require(row.probes.rich_mean > row.probes.empty_mean, at_seed(i) + " " + row.label + " probes");
            }
            for (const auto* curves : {&r.probe_growth_rich, &r.endpoint_growth_rich}) {
                const auto& rich = *curves;
                const auto& empty = curves == &r.probe_growth_rich ? r.probe_growth_empty : r.endpoint_growth_empty;
                require(rich.size() == empty.size() && rich.size() > 20, at_seed(i) + " curve length");
                for (std::size_t j = 20; j < rich.size(); ++j) {
                    require(rich[j] >= empty[j], at_seed(i) + " growth below at run " + std::to_string(j + 1));
                }
                require(rich.back() > empty.back(), at_seed(i) + " final index not strictly above");
            }
        }
    });

    criterion("no empty-only crashes", [] {
        const auto& reports = seed_reports();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            require(reports[i].crash_venn.only_a == 0, at_seed(i) + " has empty-only crashes");
            require(reports[i].crash_venn.only_b > 0, at_seed(i) + " has no rich-only crashes");
        }
    });

    criterion("empty-unique coverage", [] {
        for (std::size_t i = 0; i < seed_reports().size(); ++i) {
            const auto& r = seed_reports()[i];
            require(r.endpoint_venn.only_a > 0, at_seed(i) + " no empty-only endpoints");
        }
        // which endpoints are empty-only, and how often each arm reaches settings L3
        const auto& cfg = scenario().config;
        ExperimentConfig c = cfg;
        c.seed = 1;
        auto pop = experiment_population(c, scenario().registry);
        ExplorationConfig rich;
        rich.budget = cfg.budget;
        rich.policy = cfg.policy;
        rich.beta = cfg.beta;
        ExplorationConfig empty = rich;
        empty.mode = StateMode::empty;
        std::map<std::string, int> rich_hits, empty_hits;
        std::set<std::string> rich_union, empty_union;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            rich.seed = empty.seed = seed;
            if (pop.explorable_ids().empty()) pop.maintain();
            const auto rp = plan_runs(pop, rich, 1, "mc", static_cast<std::uint32_t>(seed));
            const auto ep = plan_runs(pop, empty, 1, "mc", static_cast<std::uint32_t>(seed));
            const auto rr = execute_runs(rp, rich, {}, Instrumentation::canonical());
            const auto er = execute_runs(ep, empty, {}, Instrumentation::canonical());
            for (const auto& e : rr[0].coverage.endpoints_hit) {
                ++rich_hits[e];
                rich_union.insert(e);
            }
            for (const auto& e : er[0].coverage.endpoints_hit) {
                ++empty_hits[e];
                empty_union.insert(e);
            }
        }
        bool onboarding_only_empty = false;
        for (const auto& e : empty_union) {
            if (e.starts_with("onboarding.")) {
                require(!rich_union.contains(e), e + " reached from rich state");
                onboarding_only_empty = true;
            }
        }
        require(onboarding_only_empty, "no onboarding endpoint in empty-only coverage");
        std::string best;
        for (const auto& [e, n] : empty_hits) {
            if (e.starts_with("settings.l3.") && n > rich_hits[e]) best = e;
        }
        require(!best.empty(), "no settings L3 endpoint hit more often from empty state");
        std::printf("      %s: empty %d/200, rich %d/200\n", best.c_str(), empty_hits[best], rich_hits[best]);
    });

    criterion("population invariants", [] {
        const auto& lib = default_persona_library();
        PopulationConfig c = default_sapienz_config();
        c.maintenance.max_uses = 5;
        auto p = Population::create(c, 1);
        const UserId u = p.active_ids().front();
        for (int i = 0; i < 5; ++i) p.record_use(u);
        require(!p.member(u).active, "not deactivated at the use limit");
        const auto report = p.maintain();
        require(report.deactivated == 1 && report.created == 1 && p.active_ids().size() == 30,
                "replenishment to exact size");

        PopulationConfig u3;
        u3.name = "u";
        u3.size = 8;
        u3.bots = 2;
        u3.workflow = Workflow::evolving;
        u3.actions_per_generation = 1;
        u3.persona_distribution = {{lib.at("ordinary"), 1.0}};
        std::mt19937_64 gen(99);
        std::map<int, Population> bases;
        for (int rho : {1, 2, 3}) {
            u3.maintenance.unclaimed_to_claimed_ratio = rho;
            bases.emplace(rho, Population::create(u3, static_cast<std::uint64_t>(rho)));
        }
        for (int seq = 0; seq < 1000; ++seq) {
            const int rho = 1 + static_cast<int>(gen() % 3);
            Population q = bases.at(rho);
            for (int s = 0, n = 1 + static_cast<int>(gen() % 15); s < n; ++s) {
                const auto ids = q.active_ids();
                const UserId target = ids[gen() % ids.size()];
                const std::string employee = "e" + std::to_string(gen() % 8);
                try {
                    if (gen() % 4 == 0) {
                        q.release(target, employee);
                    } else {
                        q.claim(target, employee, {});
                    }
                } catch (const Error&) {
                }
            }
            q.maintain();
            const auto counts = q.pool_counts();
            require(counts.unclaimed >= static_cast<std::size_t>(rho) * counts.claimed,
                    "ratio not restored in sequence " + std::to_string(seq));
            require(counts.unclaimed <= static_cast<std::size_t>(rho) * counts.claimed + 1 ||
                        counts.total() <= u3.size,
                    "over-replenished in sequence " + std::to_string(seq));
        }

        u3.maintenance.unclaimed_to_claimed_ratio = 1;
        auto w = Population::create(u3, 5);
        const auto ids = w.active_ids(Pool::unclaimed);
        w.mutable_world().add_friendship(ids[0], ids[1]);
        execute_action(w.mutable_world(), ids[1], make_post_story(ContentBlob{"s", "t", {}}));
        const StoryId story = w.world().stories.rbegin()->first;
        for (int g = 0; g < 5 && w.world().stories.at(story).live_at(w.generation()); ++g) w.evolve();
        require(visible_stories(w.world(), ids[0], 100).end() ==
                    std::find(visible_stories(w.world(), ids[0], 100).begin(),
                              visible_stories(w.world(), ids[0], 100).end(), story),
                "story outlived its TTL");

        auto t = Population::create(u3, 6);
        const auto tu = t.active_ids(Pool::unclaimed);
        const OrgMap org{{"a", {"b", "c"}}, {"b", {"a"}}, {"c", {"a"}}};
        t.claim(tu[1], "b", org);
        t.claim(tu[2], "c", org);
        std::size_t before = 0;
        for (UserId f : {tu[1], tu[2]}) before += t.world().are_friends(tu[0], f);
        const auto edges_before = t.world().user(tu[0]).friends.size();
        t.claim(tu[0], "a", org);
        require(t.world().user(tu[0]).friends.size() == edges_before + 2 - before,
                "teammate friending edge count");

        const auto d1 = Population::create(default_sapienz_config(), 42).to_json().dump();
        const auto d2 = Population::create(default_sapienz_config(), 42).to_json().dump();
        require(d1 == d2, "population not byte-identical for one seed");
        ExperimentConfig small = experiment_config_from_json(read_json(kSource / "tests/golden/config.json"));
        auto artefacts = [&] {
            const auto base = experiment_population(small, scenario().registry);
            const auto r = build_report(small, run_shadow_comparison(small, base, scenario().corpus));
            return to_json(r).dump() + coverage_table_csv(r) + crashes_table_csv(r) + growth_curves_csv(r) +
                   venn_csv(r);
        };
        require(artefacts() == artefacts(), "experiment artefacts differ across repeated runs");
    });

    criterion("coverage monotonicity", [] {
        std::mt19937_64 gen(5);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<std::vector<std::set<std::string>>> reps(1 + gen() % 5);
            for (auto& rep : reps) {
                rep.resize(gen() % 30);
                for (auto& run : rep) {
                    for (int k = 0, n = static_cast<int>(gen() % 6); k < n; ++k) {
                        run.insert("e" + std::to_string(gen() % 20));
                    }
                }
            }
            const auto curve = coverage_growth_curve(reps);
            for (std::size_t j = 1; j < curve.size(); ++j) {
                require(curve[j] >= curve[j - 1], "decrease in trial " + std::to_string(trial));
            }
        }
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
