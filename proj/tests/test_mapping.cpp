#include <doctest.h>

#include "funmig/instance.hpp"
#include "funmig/io/csv.hpp"
#include "funmig/mapping.hpp"
#include "funmig/migrate.hpp"
#include "generators.hpp"
#include "helpers.hpp"

using namespace funmig;

TEST_CASE("translate_path: the identity mapping is the identity on paths") {
    auto s = testutil::rxn_schema_a();
    Mapping id = identity_mapping(s);
    Path p{"Reaction", {"rev", "sim", "rds"}};
    CHECK(translate_path(id, p) == p);
    CHECK(translate_path(id, Path{"Reaction", {}}) == Path{"Reaction", {}});
}

TEST_CASE("translate_path: x0 attribute lands on the cell path") {
    auto set =
        testutil::load_fixture({"oqmd_catalysis/mapping.fql"});
    const Mapping& f = set.mappings.at("oqmd_to_catalysis");
    AttrExpr img = translate_attr_path(f, Path{"Structures", {"x0"}});
    REQUIRE(img.kind == AttrExpr::Kind::Path);
    CHECK(img.path.to_string() == "Structure . cell_id . x0");
}

TEST_CASE("translate_path: rev maps to rev under the lossy mapping") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    const Mapping& f = set.mappings.at("lossy_a_to_c");
    Path img = translate_path(f, Path{"Reaction", {"rev"}});
    CHECK(img.to_string() == "Reaction . rev");
    CHECK(img.start == "Reaction");
}

TEST_CASE("check_mapping: lossy A->C rejected citing exactly A3") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    auto report = check_mapping(set.mappings.at("lossy_a_to_c"));
    CHECK(report.verdict == ValidationReport::Overall::Rejected);
    CHECK(report.unproved_labels() == std::vector<std::string>{"A3"});
    REQUIRE(report.entries.size() == 3); // one entry per source equation
}

TEST_CASE("check_mapping: embed A->B rejected citing A1 and A2") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    auto report = check_mapping(set.mappings.at("embed_a_to_b"));
    CHECK(report.verdict == ValidationReport::Overall::Rejected);
    CHECK(report.unproved_labels() == std::vector<std::string>{"A1", "A2"});
}

TEST_CASE("check_mapping: permissive mode downgrades to Inconclusive") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    auto report = check_mapping(set.mappings.at("lossy_a_to_c"), 64, /*strict=*/false);
    CHECK(report.verdict == ValidationReport::Overall::Inconclusive);
}

TEST_CASE("check_mapping: identity mappings on fixture schemas are Valid") {
    auto set = testutil::load_fixture({"rxnnet/a.fql", "chem_olog/chem_olog.fql"});
    for (const auto& [name, schema] : set.schemas) {
        INFO("schema ", name);
        auto report = check_mapping(identity_mapping(schema));
        CHECK(report.verdict == ValidationReport::Overall::Valid);
        CHECK(report.entries.size() == schema->equations.size());
    }
}

TEST_CASE("check_mapping: ill-formed mapping throws before proving") {
    auto s = testutil::rxn_schema_a();
    Mapping broken = identity_mapping(s);
    broken.fk_map.erase({"Reaction", "rev"});
    CHECK_THROWS_WITH_AS(check_mapping(broken), doctest::Contains("IllFormedMapping"),
                         EngineError);
}

TEST_CASE("check_mapping: report entry count always equals source equation count") {
    gen::Rng rng(820);
    for (int round = 0; round < 30; ++round) {
        auto s = gen::random_schema(rng, {});
        auto t = gen::random_schema(rng, {});
        auto f = gen::random_mapping(rng, s, t);
        if (!f) continue;
        auto report = check_mapping(*f, 16, true);
        CHECK(report.entries.size() == s->equations.size());
    }
}

TEST_CASE("compose_mappings: identity laws") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    const Mapping& f = set.mappings.at("embed_a_to_b");
    Mapping left = compose_mappings(identity_mapping(f.source), f);
    Mapping right = compose_mappings(f, identity_mapping(f.target));
    for (const auto& [key, p] : f.fk_map) {
        CHECK(left.fk_map.at(key) == p);
        CHECK(right.fk_map.at(key) == p);
    }
    CHECK(left.entity_map == f.entity_map);
    CHECK(right.entity_map == f.entity_map);
}

TEST_CASE("compose_mappings: identity laws hold for binding-carrying mappings") {
    auto set = testutil::load_fixture({"oqmd_catalysis/mapping.fql"});
    const Mapping& f = set.mappings.at("oqmd_to_catalysis");
    REQUIRE_FALSE(f.bindings.empty());
    Mapping left = compose_mappings(identity_mapping(f.source), f);
    Mapping right = compose_mappings(f, identity_mapping(f.target));
    CHECK(left.bindings.size() == f.bindings.size());
    CHECK(right.bindings.size() == f.bindings.size());
}

TEST_CASE("compose_mappings: schema mismatch throws") {
    auto set = testutil::load_fixture({"rxnnet/mappings.fql"});
    const Mapping& ab = set.mappings.at("embed_a_to_b");
    const Mapping& ac = set.mappings.at("lossy_a_to_c");
    CHECK_THROWS_AS(compose_mappings(ab, ac), EngineError);
}

TEST_CASE("compose_mappings: composite equals pointwise translation on generators") {
    gen::Rng rng(821);
    int checked = 0;
    for (int round = 0; round < 60 && checked < 15; ++round) {
        auto s1 = gen::random_schema(rng, {3, 3, 0, 0, 4, false, "A"});
        auto s2 = gen::random_schema(rng, {3, 4, 0, 0, 4, false, "B"});
        auto s3 = gen::random_schema(rng, {3, 4, 0, 0, 4, false, "C"});
        auto f = gen::random_mapping(rng, s1, s2);
        auto g = gen::random_mapping(rng, s2, s3);
        if (!f || !g) continue;
        Mapping fg = compose_mappings(*f, *g);
        CHECK(fg.source->name == s1->name);
        CHECK(fg.target->name == s3->name);
        for (const auto& e : s1->entities)
            CHECK(fg.entity_map.at(e) == g->entity_map.at(f->entity_map.at(e)));
        for (const auto& fk : s1->fks) {
            Path via_composite = translate_path(fg, Path{fk.src, {fk.name}});
            Path via_stages = translate_path(*g, translate_path(*f, Path{fk.src, {fk.name}}));
            CHECK(via_composite == via_stages);
        }
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("functoriality: translate_path preserves composition on random pairs") {
    gen::Rng rng(822);
    int checked = 0;
    for (int round = 0; round < 60 && checked < 20; ++round) {
        auto s = gen::random_schema(rng, {3, 4, 0, 0, 4, false, "S"});
        auto t = gen::random_schema(rng, {3, 4, 0, 0, 4, false, "T"});
        auto f = gen::random_mapping(rng, s, t);
        if (!f) continue;
        const std::string& start = rng.pick(s->entities);
        auto p = gen::random_walk(rng, *s, start, 3);
        if (!p) continue;
        auto pt = try_type_of_path(*s, *p);
        if (!pt || pt->is_attr) continue;
        auto q = gen::random_walk(rng, *s, pt->entity, 3);
        if (!q) continue;
        Path pq = compose(*s, *p, *q);
        Path lhs = translate_path(*f, pq);
        Path rhs = compose(*t, translate_path(*f, *p), translate_path(*f, *q));
        CHECK(lhs == rhs);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("validation soundness: Valid mapping means delta outputs satisfy the source") {
    // check_mapping(F)=Valid and J |= target implies delta(F,J) |= source.
    auto set = testutil::load_fixture({"oqmd_catalysis/mapping.fql"});
    const Mapping& f = set.mappings.at("oqmd_to_catalysis");
    REQUIRE(check_mapping(f).verdict == ValidationReport::Overall::Valid);
    auto j = io::load_csv(testutil::fixture_path("oqmd_catalysis/csv/catalysis_mini"),
                          set.schemas.at("Catalysis"));
    REQUIRE(check_instance(j).clean());
    Instance pulled = delta(f, j);
    CHECK(check_instance(pulled).clean());
}
