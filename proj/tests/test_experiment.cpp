#include <map>

#include "doctest.h"
#include "mmrec/error.hpp"
#include "mmrec/experiment.hpp"

using namespace mmrec;

TEST_CASE("presets") {
    CHECK(preset("mindmeister_last_node").selection.node_limit == 1u);
    CHECK(preset("mindmeister_last_node").selection.event_kind == EventKindFilter::any);
    CHECK(preset("current_map_all_terms").selection.map_limit == 1u);
    const auto all = preset("all_maps_all_terms");
    CHECK_FALSE(all.selection.map_limit);
    CHECK_FALSE(all.selection.node_limit);
    CHECK_FALSE(all.selection.day_window);
    CHECK(all.features.scheme == Scheme::tf_only);
    CHECK_FALSE(all.features.remove_stopwords);
    CHECK(all.features.model_size == kUnboundedModel);
    CHECK(preset("stereotype").stereotype);

    const auto combined = preset("docear_combined");
    CHECK(combined.features.model_size == 35);
    CHECK(combined.selection.day_window == 90);
    CHECK(combined.selection.event_kind == EventKindFilter::moved);

    try {
        preset("nope");
        FAIL("expected UnknownPreset");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_preset);
    }
}

TEST_CASE("presets round-trip through the config text") {
    for (const auto& name : preset_names()) {
        const auto config = preset(name);
        CHECK(parse_config(serialize_config(config)) == config);
        CHECK(config_label(config) == name);
    }
}

TEST_CASE("config text format") {
    const auto config = parse_config(R"(# comment
selection.node_limit = 20
selection.extension = children+parents
weighting.enabled = true
weighting.metrics = depth:weaker+term_count:stronger
weighting.transform = sqrt
features.type = citations
features.scheme = cc_idf
)");
    CHECK(config.selection.node_limit == 20u);
    CHECK(config.selection.extension == Extension{true, false, true});
    REQUIRE(config.node_weighting.has_value());
    CHECK(config.node_weighting->metrics.size() == 2);
    CHECK(config.node_weighting->metrics[0] == MetricWeight{NodeMetric::depth, Direction::weaker});
    CHECK(config.node_weighting->transform == Transform::sqrt);
    CHECK(config.features.feature_type == FeatureType::citations);
    CHECK(config_label(config).rfind("custom-", 0) == 0);

    auto code = [](const char* text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::io_error;
    };
    CHECK(code("bogus.key = 1") == Errc::invalid_config);
    CHECK(code("selection.node_limit = 0") == Errc::invalid_config);
    CHECK(code("features.model_size = 0") == Errc::invalid_config);
    CHECK(code("features.type = citations\nfeatures.scheme = tf_iduf") == Errc::invalid_config);
    CHECK(code("weighting.enabled = true\nweighting.metrics = ") == Errc::invalid_config);
}

TEST_CASE("scheme repair") {
    CHECK(repair_scheme(FeatureType::terms, Scheme::cc_only) == Scheme::tf_only);
    CHECK(repair_scheme(FeatureType::terms, Scheme::cc_idf) == Scheme::tf_idf);
    CHECK(repair_scheme(FeatureType::citations, Scheme::tf_only) == Scheme::cc_only);
    CHECK(repair_scheme(FeatureType::citations, Scheme::tf_iduf) == Scheme::cc_idf);
    CHECK(repair_scheme(FeatureType::both, Scheme::tf_iduf) == Scheme::tf_iduf);
}

TEST_CASE("random configs") {
    const auto space = default_variable_space();
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng a(seed), b(seed);
        const auto config = random_config(space, a);
        CHECK(config == random_config(space, b));
        CHECK_NOTHROW(validate(config));
        CHECK(scheme_consistent(config.features.feature_type, config.features.scheme));
        CHECK(parse_config(serialize_config(config)) == config);
    }
}

TEST_CASE("singleton space yields exactly that config") {
    const auto space = parse_variable_space(R"(
selection.node_limit = 7
selection.event_kind = edited
features.type = terms
features.scheme = tf_idf
features.model_size = 12
)");
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto config = random_config(space, rng);
        CHECK(config.selection.node_limit == 7u);
        CHECK(config.selection.event_kind == EventKindFilter::edited);
        CHECK(config.features.scheme == Scheme::tf_idf);
        CHECK(config.features.model_size == 12u);
    }
    CHECK_THROWS_AS(parse_variable_space("nope = 1"), Error);
    CHECK_THROWS_AS(parse_variable_space("selection.node_limit = x"), Error);
}

TEST_CASE("scheme draws are uniform") {
    const auto space = parse_variable_space(R"(
features.type = both
features.scheme = tf_only, tf_idf, tf_iduf, cc_idf
)");
    Rng rng(2024);
    std::map<Scheme, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[random_config(space, rng).features.scheme];
    REQUIRE(counts.size() == 4);
    for (const auto& [scheme, n] : counts) CHECK(std::abs(n / double(draws) - 0.25) <= 0.02);
}
