#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "richstate/core/error.hpp"
#include "richstate/personas/persona.hpp"
#include "richstate/platform/actions.hpp"

using namespace richstate;
using nlohmann::json;

namespace {

Persona only(Feature f, std::vector<std::string> interests = {"general"}) {
    return Persona{"p", {{f, 1.0}}, std::move(interests)};
}

PopulationConfig two_persona_config(double a, double b) {
    PopulationConfig c;
    c.name = "c";
    c.size = 10;
    c.maintenance.max_uses = 5;
    Persona pa = only(Feature::like);
    pa.name = "A";
    Persona pb = only(Feature::comment);
    pb.name = "B";
    c.persona_distribution = {{pa, a}, {pb, b}};
    return c;
}

}  // namespace

TEST(Persona, FeatureNamesRoundTrip) {
    EXPECT_EQ(kAllFeatures.size(), 9u);
    for (Feature f : kAllFeatures) EXPECT_EQ(parse_feature(to_string(f)), f);
    EXPECT_FALSE(parse_feature("dance"));
}

TEST(Persona, RejectsZeroOrNegativeWeights) {
    Persona zero{"z", {{Feature::like, 0.0}}, {}};
    EXPECT_THROW(validate_persona(zero), Error);
    Persona negative{"n", {{Feature::like, 2.0}, {Feature::comment, -1.0}}, {}};
    EXPECT_THROW(validate_persona(negative), Error);
    EXPECT_NO_THROW(validate_persona(only(Feature::like)));
}

TEST(Persona, JsonRoundTripAndErrors) {
    for (const auto& [name, p] : default_persona_library()) {
        EXPECT_EQ(persona_from_json(to_json(p)), p) << name;
    }
    EXPECT_THROW(persona_from_json(json::parse(R"({"name":"x","feature_weights":{"fly":1}})")), Error);
    EXPECT_THROW(persona_from_json(json::parse(R"({"name":"x","feature_weights":{}})")), Error);
}

TEST(Persona, DefaultLibraryHasFivePersonas) {
    const auto& lib = default_persona_library();
    for (const char* n : {"ordinary", "marketplace_seller", "messenger_heavy", "group_admin", "lurker"}) {
        EXPECT_TRUE(lib.contains(n)) << n;
    }
}

TEST(PopulationConfig, ValidationAndFieldPaths) {
    auto error_of = [](const char* text) -> std::string {
        try {
            population_config_from_json(json::parse(text));
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::configuration);
            return e.what();
        }
        return "";
    };
    EXPECT_NE(error_of(R"({"name":"a","size":0,"personas":[{"persona":"ordinary"}],
                           "maintenance":{"max_uses":3}})"),
              "");
    const auto unknown = error_of(R"({"name":"a","size":3,"maintenance":{"max_uses":3},
                                      "personas":[{"persona":"ordinary"},{"persona":"ghost"}]})");
    EXPECT_NE(unknown.find("personas[1].persona"), std::string::npos) << unknown;
    // evolving needs a ratio, single generation needs a use limit
    EXPECT_NE(error_of(R"({"name":"a","size":3,"workflow":"evolving","personas":[{"persona":"ordinary"}]})"), "");
    EXPECT_NE(error_of(R"({"name":"a","size":3,"personas":[{"persona":"ordinary"}]})"), "");
    EXPECT_NE(error_of(R"({"name":"a","size":3,"workflow":"weekly","personas":[{"persona":"ordinary"}]})"), "");
}

TEST(PopulationConfig, ShippedRegistryParsesAndRoundTrips) {
    std::ifstream in(std::string(RICHSTATE_SOURCE_DIR) + "/data/populations.json");
    const auto registry = population_registry_from_json(json::parse(in));
    ASSERT_EQ(registry.size(), 2u);
    EXPECT_EQ(registry[0].name, "sapienz_default");
    EXPECT_EQ(registry[0], default_sapienz_config());
    for (const auto& c : registry) EXPECT_EQ(population_config_from_json(to_json(c)), c);
}

TEST(SamplePersona, DegenerateAndProportional) {
    Rng rng(1);
    auto single = two_persona_config(1.0, 0.0);
    single.persona_distribution.pop_back();
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_persona(single, rng).name, "A");

    const auto& lib = default_persona_library();
    PopulationConfig c = two_persona_config(1, 1);
    c.persona_distribution = {{lib.at("marketplace_seller"), 0.1}, {lib.at("ordinary"), 0.9}};
    int sellers = 0;
    for (int i = 0; i < 10000; ++i) sellers += sample_persona(c, rng).name == "marketplace_seller";
    EXPECT_NEAR(sellers / 10000.0, 0.10, 0.01);
}

TEST(SamplePersona, ScaleInvariant) {
    Rng r1(9), r2(9);
    const auto a = two_persona_config(2, 8), b = two_persona_config(0.2, 0.8);
    for (int i = 0; i < 500; ++i) EXPECT_EQ(sample_persona(a, r1).name, sample_persona(b, r2).name);
}

TEST(SamplePersona, EmptyDistributionIsConfigurationError) {
    auto c = two_persona_config(1, 1);
    c.persona_distribution.clear();
    Rng rng(1);
    try {
        sample_persona(c, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::configuration);
    }
}

TEST(RenderContent, DeterministicAndTagged) {
    Rng a(4), b(4);
    for (int i = 0; i < 50; ++i) {
        const auto x = render_interest_content("hiking", Feature::create_post, a);
        EXPECT_EQ(x, render_interest_content("hiking", Feature::create_post, b));
        EXPECT_EQ(x.topic_tag, "hiking");
    }
    Rng rng(11);
    int images = 0;
    for (int i = 0; i < 1000; ++i) images += render_interest_content("x", Feature::create_post, rng).has_image();
    EXPECT_NEAR(images / 1000.0, 0.5, 0.05);
}

TEST(GenerateAction, SingleFriendMessage) {
    WorldState w;
    const UserId u = w.add_user("u"), f = w.add_user("f");
    w.add_friendship(u, f);
    Rng rng(2);
    const auto a = generate_content_action(w, u, only(Feature::send_message), rng);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->kind, ActionKind::start_thread);
    EXPECT_EQ(a->target, EntityRef::of(f));
    EXPECT_EQ(feature_of(*a), Feature::send_message);
}

TEST(GenerateAction, NoFeasibleFeatureIsNoOp) {
    WorldState w;
    const UserId u = w.add_user("u");
    Rng rng(2);
    EXPECT_FALSE(generate_content_action(w, u, only(Feature::send_message), rng));
    EXPECT_FALSE(generate_content_action(w, u, only(Feature::like), rng));
    EXPECT_FALSE(generate_content_action(w, u, only(Feature::create_listing), rng));
}

TEST(GenerateAction, InfeasibleFeatureIsResampled) {
    WorldState w;
    const UserId u = w.add_user("u");
    Persona p{"mix", {{Feature::send_message, 100.0}, {Feature::create_post, 1.0}}, {"cycling"}};
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto a = generate_content_action(w, u, p, rng);
        ASSERT_TRUE(a);
        EXPECT_EQ(feature_of(*a), Feature::create_post);
        EXPECT_EQ(a->content->topic_tag, "cycling");
    }
}

TEST(GenerateAction, FeatureHistogramTracksWeights) {
    WorldState w;
    const UserId u = w.add_user("u");
    for (int i = 0; i < 3; ++i) w.add_friendship(u, w.add_user("f"));
    Persona p{"mix", {{Feature::create_post, 1.0}, {Feature::send_message, 3.0}}, {"x"}};
    Rng rng(5);
    std::map<Feature, int> counts;
    const int n = 4000;
    for (int i = 0; i < n; ++i) counts[*feature_of(*generate_content_action(w, u, p, rng))]++;
    // chi-square against the 1:3 split, 1 degree of freedom, p = 0.001 cut-off
    const double e1 = n * 0.25, e2 = n * 0.75;
    const double chi = std::pow(counts[Feature::create_post] - e1, 2) / e1 +
                       std::pow(counts[Feature::send_message] - e2, 2) / e2;
    EXPECT_LT(chi, 10.83);
}
