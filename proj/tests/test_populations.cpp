#include <random>

#include <gtest/gtest.h>

#include "richstate/core/error.hpp"
#include "richstate/platform/actions.hpp"
#include "richstate/populations/population.hpp"

using namespace richstate;
using nlohmann::json;

namespace {

Persona persona(std::string name, std::map<Feature, double> weights) {
    return Persona{std::move(name), std::move(weights), {"general"}};
}

PopulationConfig evolving(std::size_t size, double rho, Persona p, std::uint32_t k = 2,
                          std::size_t bots = 0) {
    PopulationConfig c;
    c.name = "universe";
    c.size = size;
    c.bots = bots;
    c.workflow = Workflow::evolving;
    c.maintenance.unclaimed_to_claimed_ratio = rho;
    c.actions_per_generation = k;
    c.persona_distribution = {{std::move(p), 1.0}};
    return c;
}

ErrorKind error_kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::io;
}

std::size_t posts_by(const WorldState& w, UserId u) {
    std::size_t n = 0;
    for (const auto& [id, p] : w.posts) n += p.author == u;
    return n;
}

void expect_pool_conservation(const Population& p) {
    const auto c = p.pool_counts();
    EXPECT_EQ(c.total(), p.active_ids().size());
    for (const auto& m : p.members()) {
        EXPECT_EQ(m.pool == Pool::claimed, m.owner.has_value()) << to_string(m.id);
    }
}

}  // namespace

TEST(Create, SizeGenerationAndAuthoredState) {
    PopulationConfig c = default_sapienz_config();
    c.persona_distribution.resize(1);
    const auto p = Population::create(c, 1);
    EXPECT_EQ(p.active_ids().size(), 30u);
    EXPECT_EQ(p.generation(), 1u);
    EXPECT_EQ(p.world().users.size(), 30u);
    EXPECT_FALSE(check_invariants(p.world()));
    c.size = 0;
    EXPECT_EQ(error_kind_of([&] { Population::create(c, 1); }), ErrorKind::configuration);
}

TEST(Create, SellerHeadCountFollowsDistribution) {
    const auto& lib = default_persona_library();
    PopulationConfig c = default_sapienz_config();
    c.size = 100;
    c.actions_per_generation = 1;
    c.persona_distribution = {{lib.at("marketplace_seller"), 0.1}, {lib.at("ordinary"), 0.9}};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto p = Population::create(c, seed);
        std::size_t sellers = 0;
        for (const auto& m : p.members()) sellers += m.persona.name == "marketplace_seller";
        EXPECT_GE(sellers, 4u);
        EXPECT_LE(sellers, 16u);
    }
}

TEST(Create, MarketplacePersonasYieldMoreListings) {
    const auto& lib = default_persona_library();
    PopulationConfig sellers = default_sapienz_config();
    sellers.persona_distribution = {{lib.at("marketplace_seller"), 1.0}};
    PopulationConfig ordinary = default_sapienz_config();
    ordinary.persona_distribution = {{lib.at("ordinary"), 1.0}};
    const auto a = Population::create(sellers, 3), b = Population::create(ordinary, 3);
    EXPECT_GT(a.world().listings.size(), b.world().listings.size());
}

TEST(Create, SeedDeterminism) {
    const auto a = Population::create(default_sapienz_config(), 5);
    const auto b = Population::create(default_sapienz_config(), 5);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    EXPECT_NE(a.to_json().dump(), Population::create(default_sapienz_config(), 6).to_json().dump());
    EXPECT_EQ(Population::from_json(a.to_json()), a);
}

TEST(Evolve, DegenerateWeightsAuthorExactlyK) {
    auto p = Population::create(evolving(5, 1.0, persona("poster", {{Feature::create_post, 1}}), 2), 1);
    std::map<UserId, std::size_t> before;
    for (UserId u : p.active_ids()) before[u] = posts_by(p.world(), u);
    p.evolve();
    EXPECT_EQ(p.generation(), 2u);
    for (UserId u : p.active_ids()) EXPECT_EQ(posts_by(p.world(), u), before[u] + 2);
}

TEST(Evolve, SingleGenerationCannotEvolve) {
    auto p = Population::create(default_sapienz_config(), 1);
    const auto before = p.to_json();
    EXPECT_EQ(error_kind_of([&] { p.evolve(); }), ErrorKind::workflow);
    EXPECT_EQ(p.to_json(), before);
}

TEST(Evolve, StoryExpiresAfterTtl) {
    auto p = Population::create(evolving(2, 1.0, persona("idle", {{Feature::like, 1}}), 1), 1);
    const auto ids = p.active_ids();
    auto& w = p.mutable_world();
    w.add_friendship(ids[0], ids[1]);
    while (w.generation < 5) w.advance_generation();
    execute_action(w, ids[1], make_post_story(ContentBlob{"s", "t", {}}));
    auto targets = [&] {
        std::size_t n = 0;
        for (const auto& a : enumerate_actions(p.world(), ids[0], Screen{ScreenKind::stories, {}})) {
            n += a.kind == ActionKind::view_story;
        }
        return n;
    };
    EXPECT_EQ(targets(), 1u);
    p.evolve();
    EXPECT_EQ(p.generation(), 6u);
    EXPECT_EQ(targets(), 0u);
}

TEST(Evolve, BotLikesItsFriendsOnlyPost) {
    auto p = Population::create(evolving(2, 1.0, persona("liker", {{Feature::like, 1}}), 1, 1), 1);
    const UserId bot = p.active_ids(Pool::bot).front();
    const UserId other = p.active_ids(Pool::unclaimed).front();
    auto& w = p.mutable_world();
    w.add_friendship(bot, other);
    execute_action(w, other, make_create_post(ContentBlob{"hi", "t", {}}));
    const PostId post = w.posts.rbegin()->first;
    p.evolve();
    EXPECT_EQ(p.world().posts.at(post).likers, std::set<UserId>{bot});
}

TEST(Evolve, FrozenClaimedUsersStayStill) {
    auto p = Population::create(evolving(4, 1.0, persona("poster", {{Feature::create_post, 1}}), 1), 2);
    const UserId u = p.active_ids().front();
    p.claim(u, "alice", {});
    p.set_frozen(u, "alice", true);
    const auto before = posts_by(p.world(), u);
    p.evolve();
    EXPECT_EQ(posts_by(p.world(), u), before);
    p.set_frozen(u, "alice", false);
    p.evolve();
    EXPECT_EQ(posts_by(p.world(), u), before + 1);
}

TEST(Maintain, UseLimitDeactivatesAndReplaces) {
    PopulationConfig c = default_sapienz_config();
    c.maintenance.max_uses = 5;
    auto p = Population::create(c, 1);
    const UserId u = p.active_ids().front();
    for (int i = 0; i < 4; ++i) p.record_use(u);
    EXPECT_TRUE(p.member(u).active);
    p.record_use(u);
    EXPECT_FALSE(p.member(u).active);
    EXPECT_EQ(p.member(u).use_count, 5u);
    EXPECT_EQ(error_kind_of([&] { p.record_use(u); }), ErrorKind::invalid_use);
    const auto explorable = p.explorable_ids();
    EXPECT_EQ(std::count(explorable.begin(), explorable.end(), u), 0);
    const auto report = p.maintain();
    EXPECT_EQ(report.deactivated, 1u);
    EXPECT_EQ(report.created, 1u);
    EXPECT_EQ(p.active_ids().size(), 30u);
    EXPECT_EQ(p.inactive_count(), 1u);
    // nothing left to do
    const auto snapshot = p.to_json();
    EXPECT_EQ(p.maintain(), (MaintenanceReport{}));
    EXPECT_EQ(p.to_json(), snapshot);
}

TEST(Maintain, NoUseLimitNeverDeactivates) {
    auto p = Population::create(evolving(3, 1.0, persona("x", {{Feature::create_post, 1}}), 1), 1);
    const UserId u = p.active_ids().front();
    for (int i = 0; i < 50; ++i) p.record_use(u);
    EXPECT_TRUE(p.member(u).active);
    EXPECT_EQ(p.member(u).use_count, 50u);
}

TEST(Maintain, RatioRestorationArithmetic) {
    auto p = Population::create(evolving(35, 3.0, persona("x", {{Feature::create_post, 1}}), 1), 1);
    const auto ids = p.active_ids();
    for (int i = 0; i < 10; ++i) p.claim(ids[i], "e" + std::to_string(i), {});
    EXPECT_EQ(p.pool_counts(), (PoolCounts{10, 25, 0}));
    const auto report = p.maintain();
    EXPECT_EQ(report.created, 5u);
    EXPECT_EQ(report.deactivated, 0u);
    ASSERT_TRUE(report.ratio_after);
    EXPECT_DOUBLE_EQ(*report.ratio_after, 3.0);
}

TEST(Maintain, RandomClaimSequencesRestoreRatio) {
    std::mt19937_64 gen(2024);
    std::map<int, Population> bases;
    for (int rho : {1, 2, 3}) {
        bases.emplace(rho, Population::create(
                               evolving(8, rho, persona("x", {{Feature::create_post, 1}}), 1, 2), rho));
    }
    for (int seq = 0; seq < 1000; ++seq) {
        const int rho = 1 + static_cast<int>(gen() % 3);
        Population p = bases.at(rho);
        const int steps = 1 + static_cast<int>(gen() % 12);
        for (int s = 0; s < steps; ++s) {
            const auto members = p.active_ids();
            const UserId target = members[gen() % members.size()];
            const std::string employee = "e" + std::to_string(gen() % 6);
            try {
                if (gen() % 4 == 0) {
                    p.release(target, employee);
                } else {
                    p.claim(target, employee, {});
                }
            } catch (const Error&) {
                // rejected claims and releases are part of the sequence
            }
            if (gen() % 5 == 0) p.maintain();
            expect_pool_conservation(p);
        }
        p.maintain();
        const auto c = p.pool_counts();
        ASSERT_GE(static_cast<double>(c.unclaimed) + 1.0, rho * static_cast<double>(c.claimed))
            << "sequence " << seq;
        ASSERT_GE(c.unclaimed, static_cast<std::size_t>(rho) * c.claimed) << "sequence " << seq;
        ASSERT_GE(c.total(), 8u);
        ASSERT_EQ(c.bots, 2u);
    }
}

TEST(Claim, TeammatePrimariesBecomeFriends) {
    auto p = Population::create(evolving(10, 1.0, persona("quiet", {{Feature::create_post, 1}}), 1), 1);
    const OrgMap org{{"alice", {"bob", "carol", "dave"}}, {"bob", {"alice"}}, {"carol", {"alice"}}};
    const auto ids = p.active_ids();
    p.claim(ids[1], "bob", org);
    p.claim(ids[2], "carol", org);
    const auto before = p.world().user(ids[0]).friends.size();
    p.claim(ids[0], "alice", org);
    const auto& friends = p.world().user(ids[0]).friends;
    EXPECT_EQ(friends.size(), before + 2);
    EXPECT_TRUE(friends.contains(ids[1]));
    EXPECT_TRUE(friends.contains(ids[2]));
    EXPECT_EQ(p.primary_of("alice"), ids[0]);
}

TEST(Claim, ErrorsAndRelease) {
    auto p = Population::create(evolving(6, 1.0, persona("quiet", {{Feature::create_post, 1}}), 1, 1), 1);
    const UserId bot = p.active_ids(Pool::bot).front();
    const auto users = p.active_ids(Pool::unclaimed);
    EXPECT_EQ(error_kind_of([&] { p.claim(bot, "alice", {}); }), ErrorKind::unclaimable);
    p.claim(users[0], "alice", {});
    EXPECT_EQ(error_kind_of([&] { p.claim(users[0], "bob", {}); }), ErrorKind::already_claimed);
    EXPECT_EQ(error_kind_of([&] { p.claim(users[1], "alice", {}); }), ErrorKind::already_claimed);
    EXPECT_EQ(error_kind_of([&] { p.release(users[0], "bob"); }), ErrorKind::forbidden);
    EXPECT_EQ(error_kind_of([&] { p.update_interests(users[0], "bob", {"x"}); }), ErrorKind::forbidden);
    p.update_interests(users[0], "alice", {"cooking"});
    EXPECT_EQ(p.member(users[0]).persona.interests, std::vector<std::string>{"cooking"});
    p.release(users[0], "alice");
    EXPECT_EQ(p.member(users[0]).pool, Pool::unclaimed);
    EXPECT_FALSE(p.member(users[0]).owner);
    // bots take a secondary controller, never an owner
    p.set_secondary_controller(bot, "alice");
    EXPECT_NO_THROW(p.update_interests(bot, "alice", {"news"}));
    EXPECT_EQ(error_kind_of([&] { p.set_secondary_controller(bot, "bob"); }), ErrorKind::already_claimed);
}

TEST(Claim, InterestsShapeNextGenerationContent) {
    auto p = Population::create(evolving(3, 1.0, persona("poster", {{Feature::create_post, 1}}), 1), 4);
    const UserId u = p.active_ids().front();
    p.claim(u, "alice", {});
    p.update_interests(u, "alice", {"cooking"});
    const auto last = p.world().posts.rbegin()->first;
    p.evolve();
    std::size_t fresh = 0;
    for (auto it = p.world().posts.upper_bound(last); it != p.world().posts.end(); ++it) {
        if (it->second.author != u) continue;
        ++fresh;
        EXPECT_EQ(it->second.content.topic_tag, "cooking");
    }
    EXPECT_EQ(fresh, 1u);
}

TEST(Reconcile, CreatesUpdatesAndIsIdempotent) {
    json registry = json::parse(R"([
        {"name": "a", "size": 4, "personas": [{"persona": "ordinary"}], "actions_per_generation": 2,
         "maintenance": {"max_uses": 3}},
        {"name": "u", "size": 4, "workflow": "evolving", "personas": [{"persona": "ordinary"}],
         "actions_per_generation": 1, "maintenance": {"unclaimed_to_claimed_ratio": 2}}
    ])");
    std::map<std::string, Population> managed;
    auto actions = runner_reconcile(registry, managed, std::nullopt, 1);
    ASSERT_EQ(actions.size(), 2u);
    EXPECT_EQ(actions[0].action, "created");
    EXPECT_EQ(actions[1].action, "created");
    EXPECT_TRUE(runner_reconcile(registry, managed, std::nullopt, 1).empty());
    EXPECT_TRUE(runner_reconcile(registry, managed, Generation{1}, 1).empty());

    actions = runner_reconcile(registry, managed, Generation{3}, 1);
    EXPECT_EQ(managed.at("u").generation(), 3u);
    EXPECT_EQ(std::count_if(actions.begin(), actions.end(), [](auto& a) { return a.action == "evolved"; }), 2);
    EXPECT_EQ(managed.at("a").generation(), 1u);

    registry[0]["size"] = 9;
    actions = runner_reconcile(registry, managed, std::nullopt, 1);
    ASSERT_EQ(actions.size(), 1u);
    EXPECT_EQ(actions[0].action, "config_updated");
    EXPECT_EQ(managed.at("a").active_ids().size(), 4u);
    EXPECT_EQ(managed.at("a").maintain().created, 5u);

    registry.push_back(json{{"name", "broken"}, {"size", -1}});
    actions = runner_reconcile(registry, managed, std::nullopt, 1);
    ASSERT_EQ(actions.size(), 1u);
    EXPECT_EQ(actions[0].action, "skipped");
}

TEST(OrgMap, ParsesAndRejects) {
    const auto org = org_map_from_json(json::parse(R"({"a": ["b"], "b": []})"));
    EXPECT_EQ(org.at("a"), std::vector<std::string>{"b"});
    EXPECT_THROW(org_map_from_json(json::parse(R"({"a": "b"})")), Error);
}
