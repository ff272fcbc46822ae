#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include "varkit/customization.hpp"
#include "varkit/error.hpp"

#include <algorithm>
#include <random>

using namespace varkit;
using namespace varkit::testing;

namespace {

std::vector<std::string> ids_of(const VariabilityModel& m)
{
    std::vector<std::string> out;
    for (const auto& v : m.variants)
        out.push_back(v.id);
    return out;
}

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ParseError;
}

AnswersDocument answers(std::string area, std::vector<AnswerEntry> entries, std::vector<std::string> exclusions = {})
{
    return AnswersDocument{std::move(area), std::move(entries), std::move(exclusions)};
}

} // namespace

TEST_CASE("prune by area")
{
    auto academic = prune_by_area(hall_booking(), "Academic");
    CHECK(ids_of(academic.model) == std::vector<std::string>{"V1", "V3", "V4"});
    CHECK(academic.warnings.empty());
    CHECK(academic.model.areas == hall_booking().areas);
    CHECK(validate_model(academic.model).valid());

    auto non_academic = prune_by_area(hall_booking(), "Non Academic");
    CHECK(non_academic.model == hall_booking());

    CHECK(code_of([] { prune_by_area(hall_booking(), "Commercial"); }) == ErrorCode::UnknownArea);
}

TEST_CASE("prune cascades removal to dependents")
{
    VariabilityModel m;
    m.name = "cascade";
    m.areas = {"X", "Y"};
    m.variants = {
        make_variant("V1", "A", RelationKind::Or, AreaSet::everywhere(), {"a", "b"}, {"V2.1"}),
        make_variant("V2", "B", RelationKind::Or, AreaSet::only({"X"}), {"c", "d"}),
        make_variant("V3", "C", RelationKind::None, AreaSet::everywhere(), {"e"}, {"V1"}),
        make_variant("V4", "D", RelationKind::None, AreaSet::only({"Y"}), {"f"}),
    };
    REQUIRE(validate_model(m).valid());
    auto pruned = prune_by_area(m, "Y");
    CHECK(ids_of(pruned.model) == std::vector<std::string>{"V4"});
    REQUIRE(pruned.warnings.size() == 2);
    CHECK(pruned.warnings[0].code == codes::kCascadeRemoved);
    CHECK(pruned.warnings[0].location == "V1");
    CHECK(pruned.warnings[1].location == "V3");
    CHECK(validate_model(pruned.model).valid());
}

TEST_CASE("prune is idempotent and always validates")
{
    std::mt19937 rng(99);
    for (int i = 0; i < 300; ++i) {
        auto m = random_model(rng);
        for (const auto& area : m.areas) {
            auto once = prune_by_area(m, area).model;
            auto twice = prune_by_area(once, area);
            CHECK(twice.model == once);
            CHECK(twice.warnings.empty());
            CHECK(validate_model(once).valid());
        }
    }
    auto academic = prune_by_area(hall_booking(), "Academic").model;
    CHECK(prune_by_area(academic, "Academic").model == academic);
}

TEST_CASE("apply requirements reproduces the customized academic model")
{
    auto scope = prune_by_area(hall_booking(), "Academic").model;
    auto derived = apply_requirements(scope, answers("Academic", {{"V4", {"V4.3"}}}));
    CHECK(derived.model == academic_printed_paper_by_hand());
    CHECK(derived.warnings.empty());
    CHECK(validate_model(derived.model).valid());

    const auto& v4 = derived.model.variants[2];
    CHECK(v4.relation == RelationKind::None);
    CHECK(v4.values == std::vector<VariantValue>{{"V4.3", "Printed Paper"}});
    CHECK(derived.model.variants[0].relation == RelationKind::Alternative);
    CHECK(derived.model.variants[1].dependencies == std::vector<Ref>{"V1.2"});
}

TEST_CASE("apply requirements narrowing rules")
{
    auto scope = prune_by_area(hall_booking(), "Non Academic").model;

    CHECK(apply_requirements(scope, answers("Non Academic", {})).model == scope);

    auto two = apply_requirements(scope, answers("Non Academic", {{"V2", {"V2.1", "V2.3"}}})).model;
    CHECK(two.find_variant("V2")->relation == RelationKind::Or);
    CHECK(two.find_variant("V2")->values.size() == 2);

    // narrowing V2 away from V2.3 takes V5 (which requires it) with it
    auto narrowed = apply_requirements(scope, answers("Non Academic", {{"V2", {"V2.1"}}}));
    CHECK(ids_of(narrowed.model) == std::vector<std::string>{"V1", "V2", "V3", "V4"});
    REQUIRE(narrowed.warnings.size() == 1);
    CHECK(narrowed.warnings[0].location == "V5");

    auto alt = apply_requirements(scope, answers("Non Academic", {{"V1", {"V1.2"}}})).model;
    CHECK(alt.find_variant("V1")->relation == RelationKind::None);
    CHECK(validate_model(alt).valid());
}

TEST_CASE("excluding V1 cascades to V3")
{
    auto scope = prune_by_area(hall_booking(), "Academic").model;
    auto derived = apply_requirements(scope, answers("Academic", {}, {"V1"}));
    CHECK(ids_of(derived.model) == std::vector<std::string>{"V4"});
    REQUIRE(derived.warnings.size() == 1);
    CHECK(derived.warnings[0].code == codes::kCascadeRemoved);
    CHECK(derived.warnings[0].location == "V3");
}

TEST_CASE("apply requirements errors")
{
    auto scope = prune_by_area(hall_booking(), "Academic").model;
    CHECK(code_of([&] { apply_requirements(scope, answers("Academic", {{"V2", {"V2.1"}}})); }) ==
          ErrorCode::RefNotInModel);
    CHECK(code_of([&] { apply_requirements(scope, answers("Academic", {{"V4", {"V4.9"}}})); }) ==
          ErrorCode::RefNotInModel);
    CHECK(code_of([&] { apply_requirements(scope, answers("Academic", {}, {"V5"})); }) == ErrorCode::RefNotInModel);
    CHECK(code_of([&] { apply_requirements(scope, answers("Academic", {{"V4", {}}})); }) ==
          ErrorCode::NarrowToEmpty);
    scope.variants[0].mandatory = true;
    CHECK(code_of([&] { apply_requirements(scope, answers("Academic", {}, {"V1"})); }) ==
          ErrorCode::MandatoryExclusion);
}

TEST_CASE("requires closure examples")
{
    auto m = hall_booking();
    CHECK(requires_closure(m, {"V3.2"}) == std::set<Ref>{"V3.2", "V3", "V1.2", "V1"});
    CHECK(requires_closure(m, {}).empty());
    CHECK(requires_closure(m, {"V5.1"}) == std::set<Ref>{"V5.1", "V5", "V2.3", "V2", "V1.2", "V1"});
    CHECK(requires_closure(m, {"V5"}) == std::set<Ref>{"V5", "V2.3", "V2", "V1.2", "V1"});
    CHECK(code_of([&] { requires_closure(m, {"V8"}); }) == ErrorCode::NotFound);
}

TEST_CASE("requires closure is extensive, idempotent and monotone")
{
    std::mt19937 rng(4242);
    int cases = 0;
    for (int i = 0; i < 1200; ++i) {
        auto m = random_model(rng);
        auto s = random_ref_subset(rng, m);
        auto extra = random_ref_subset(rng, m);
        std::set<Ref> t = s;
        t.insert(extra.begin(), extra.end());

        auto cs = requires_closure(m, s);
        auto ct = requires_closure(m, t);
        CHECK(std::includes(cs.begin(), cs.end(), s.begin(), s.end()));
        CHECK(requires_closure(m, cs) == cs);
        CHECK(std::includes(ct.begin(), ct.end(), cs.begin(), cs.end()));
        ++cases;
    }
    CHECK(cases >= 1000);
}

TEST_CASE("decision table for the fixture")
{
    auto table = derive_decision_table(hall_booking());
    REQUIRE(table.rows.size() == 5);
    std::vector<std::string> traces;
    for (const auto& row : table.rows)
        traces.push_back(row.trace);
    CHECK(traces == std::vector<std::string>{"V1", "V2", "V3", "V4", "V5"});

    const auto* v1 = table.row_for("V1");
    CHECK(v1->guard.empty());
    CHECK(v1->options == std::vector<VariantValue>{{"V1.1", "Single"}, {"V1.2", "Block"}});
    CHECK(v1->question == "What is the reservation mode?");
    CHECK(v1->relation == RelationKind::Alternative);

    const auto* v3 = table.row_for("V3");
    CHECK(v3->guard == std::vector<std::string>{"V1.2"});
    CHECK(v3->options == std::vector<VariantValue>{{"V3.1", "Multiple Room"}, {"V3.2", "Multiple time"}});

    const auto* v5 = table.row_for("V5");
    CHECK(v5->guard == std::vector<std::string>{"V2.3", "V1.2"});
    CHECK(v5->question == "Select value(s) for Reservation Discount");

    const auto* v2 = table.row_for("V2");
    CHECK(v2->guard.empty());
    CHECK(v2->options.size() == 4);
    CHECK(table.row_for("V9") == nullptr);
}

TEST_CASE("decision table ordering and variant-level targets")
{
    VariabilityModel single;
    single.variants = {make_variant("V1", "Only", RelationKind::None, AreaSet::everywhere(), {"x"})};
    auto one = derive_decision_table(single);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].guard.empty());
    CHECK(one.rows[0].question == "Select value(s) for Only");

    VariabilityModel m;
    m.variants = {
        make_variant("V1", "Late", RelationKind::Or, AreaSet::everywhere(), {"a", "b"}, {"V3", "V2.1"}),
        make_variant("V2", "Mid", RelationKind::Alternative, AreaSet::everywhere(), {"c", "d"}),
        make_variant("V3", "Early", RelationKind::None, AreaSet::everywhere(), {"e"}),
    };
    auto table = derive_decision_table(m);
    std::vector<std::string> traces;
    for (const auto& row : table.rows)
        traces.push_back(row.trace);
    CHECK(traces == std::vector<std::string>{"V2", "V3", "V1"});
    CHECK(table.row_for("V1")->guard == std::vector<std::string>{"V2.1"});
    CHECK(table.row_for("V1")->after == std::vector<std::string>{"V3"});

    std::mt19937 rng(5);
    for (int i = 0; i < 100; ++i) {
        auto g = random_model(rng);
        auto t = derive_decision_table(g);
        REQUIRE(t.rows.size() == g.variants.size());
        std::map<std::string, std::size_t> position;
        for (std::size_t k = 0; k < t.rows.size(); ++k)
            position[t.rows[k].trace] = k;
        for (const auto& row : t.rows)
            for (const auto& guard : row.guard)
                CHECK(position[resolve_ref(g, guard).variant->id] < position[row.trace]);
    }
}

TEST_CASE("configuration checks")
{
    auto scope = prune_by_area(hall_booking(), "Academic").model;
    Configuration ok{"Academic", {{"V1", {"V1.2"}}, {"V3", {"V3.2"}}, {"V4", {"V4.3"}}}};
    CHECK(check_configuration(scope, ok).empty());
    CHECK(format_configuration(scope, ok) == "V1 = {V1.2}\nV3 = {V3.2}\nV4 = {V4.3}\n");

    Configuration unguarded{"Academic", {{"V1", {"V1.1"}}, {"V3", {"V3.2"}}}};
    CHECK_FALSE(check_configuration(scope, unguarded).empty());

    Configuration two_alternatives{"Academic", {{"V1", {"V1.1", "V1.2"}}}};
    CHECK_FALSE(check_configuration(scope, two_alternatives).empty());

    Configuration foreign{"Academic", {{"V2", {"V2.1"}}}};
    CHECK_FALSE(check_configuration(scope, foreign).empty());

    Configuration empty_or{"Academic", {{"V4", {}}}};
    CHECK_FALSE(check_configuration(scope, empty_or).empty());

    Configuration nothing{"Academic", {}};
    CHECK(check_configuration(scope, nothing).empty());
}

TEST_CASE("enumeration oracle")
{
    auto academic = enumerate_configurations(hall_booking(), "Academic");
    CHECK(academic.size() == 48);
    CHECK(enumerate_configurations(hall_booking(), "Non Academic").size() == 1536);

    auto scope = prune_by_area(hall_booking(), "Academic").model;
    for (const auto& c : academic)
        CHECK(check_configuration(scope, c).empty());
    CHECK(enumerate_configurations(hall_booking(), "Academic") == academic);
    CHECK(std::set<Configuration>(academic.begin(), academic.end()).size() == academic.size());

    VariabilityModel mandatory;
    mandatory.areas = {"A"};
    mandatory.variants = {make_variant("V1", "M", RelationKind::Alternative, AreaSet::everywhere(), {"x", "y"})};
    mandatory.variants[0].mandatory = true;
    auto two = enumerate_configurations(mandatory, "A");
    REQUIRE(two.size() == 2);
    CHECK(two[0].selected.at("V1") == std::set<std::string>{"V1.1"});
    CHECK(two[1].selected.at("V1") == std::set<std::string>{"V1.2"});

    VariabilityModel empty;
    empty.areas = {"A"};
    auto one = enumerate_configurations(empty, "A");
    REQUIRE(one.size() == 1);
    CHECK(one[0].selected.empty());

    CHECK(code_of([] { enumerate_configurations(hall_booking(), "Nowhere"); }) == ErrorCode::UnknownArea);

    VariabilityModel big;
    big.areas = {"A"};
    for (int i = 1; i <= 5; ++i)
        big.variants.push_back(make_variant("V" + std::to_string(i), "Big", RelationKind::Or, AreaSet::everywhere(),
                                            {"a", "b", "c", "d", "e"}));
    CHECK(code_of([&] { enumerate_configurations(big, "A"); }) == ErrorCode::ScopeTooLarge);
}

TEST_CASE("mandatory variants appear in every enumerated configuration")
{
    std::mt19937 rng(31337);
    for (int i = 0; i < 60; ++i) {
        auto m = random_model(rng);
        for (const auto& area : m.areas) {
            auto scope = prune_by_area(m, area).model;
            for (const auto& c : enumerate_configurations(m, area))
                for (const auto& v : scope.variants)
                    if (v.mandatory)
                        CHECK(c.includes(v.id));
        }
    }
}
