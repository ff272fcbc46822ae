#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/fixtures.hpp"

#include "varkit/error.hpp"
#include "varkit/product.hpp"

#include <algorithm>
#include <random>
#include <regex>

using namespace varkit;
using namespace varkit::testing;

namespace {

ProductModel activity()
{
    return parse_product_model(fixture_text("hall-booking-activity.product.xml"));
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

std::vector<std::string> element_ids(const ProductModel& p)
{
    std::vector<std::string> out;
    for (const auto& e : p.elements)
        out.push_back(e.id);
    return out;
}

Configuration block_multiple_time_printed()
{
    return Configuration{"Academic", {{"V1", {"V1.2"}}, {"V3", {"V3.2"}}, {"V4", {"V4.3"}}}};
}

Configuration everything()
{
    Configuration c{"Non Academic", {}};
    for (const auto& v : hall_booking().variants)
        for (const auto& value : v.values)
            c.selected[v.id].insert(value.id);
    return c;
}

ProductModel with_extra(ProductModel p, ProductElement element, std::vector<ProductEdge> edges)
{
    p.elements.push_back(std::move(element));
    for (auto& e : edges)
        p.edges.push_back(std::move(e));
    return p;
}

} // namespace

TEST_CASE("activity fixture parses with canonical tags")
{
    auto p = activity();
    CHECK(p.name == "Reserve Hall");
    CHECK(p.elements.size() == 9);
    CHECK(p.edges.size() == 9);
    const auto* notify = p.find_element("send-notification");
    REQUIRE(notify != nullptr);
    CHECK(notify->tag == std::optional<Ref>(Ref{"V4"}));
    CHECK(p.find_element("charge-deposit")->tag == std::optional<Ref>(Ref{"V2"}));
    CHECK_FALSE(p.find_element("start")->tag.has_value());
    CHECK(p.edges[3].label == std::optional<std::string>("no"));
    CHECK(parse_product_model(write_product_model(p)) == p);
}

TEST_CASE("product parse errors and empty documents")
{
    auto empty = parse_product_model(R"(<product-model name="nothing"/>)");
    CHECK(empty.elements.empty());
    CHECK(empty.edges.empty());

    CHECK(code_of([] {
              parse_product_model(R"(<product-model name="p"><element id="a" kind="action" label="A"/>)"
                                  R"(<edge from="a" to="b"/></product-model>)");
          }) == ErrorCode::DanglingEdge);
    CHECK(code_of([] {
              parse_product_model(R"(<product-model name="p"><element id="a" kind="action" label="A"/>)"
                                  R"(<element id="a" kind="action" label="B"/></product-model>)");
          }) == ErrorCode::DuplicateElementId);
    CHECK(code_of([] { parse_product_model(R"(<product-model name="p"><element id="a"/></product-model>)"); }) ==
          ErrorCode::MissingAttribute);
    CHECK(code_of([] { parse_product_model(R"(<product-model name="p"><node/></product-model>)"); }) ==
          ErrorCode::UnknownElement);
    CHECK(code_of([] { parse_product_model(R"(<product-model name="p">)"); }) == ErrorCode::ParseError);
}

TEST_CASE("tag spelling does not change the parsed model")
{
    auto dotted = fixture_text("hall-booking-activity.product.xml");
    auto plain = std::regex_replace(dotted, std::regex(R"(variant="V\.(\d+))"), R"(variant="V$1)");
    REQUIRE(plain != dotted);
    CHECK(parse_product_model(plain) == parse_product_model(dotted));

    const std::string value_dotted = R"(<product-model name="p"><element id="a" kind="action" label="A" variant="V.4.2"/></product-model>)";
    const std::string value_plain = R"(<product-model name="p"><element id="a" kind="action" label="A" variant="V4.2"/></product-model>)";
    CHECK(parse_product_model(value_dotted) == parse_product_model(value_plain));
    CHECK(parse_product_model(value_plain).elements[0].tag == std::optional<Ref>(Ref{"V4.2"}));
}

TEST_CASE("graph text export")
{
    auto text = export_graph_text(activity());
    CHECK(text.find("node send-notification \"Send notification\" kind=action tag=V4\n") != std::string::npos);
    CHECK(text.find("node start \"Start\" kind=initial\n") != std::string::npos);
    CHECK(text.find("arrow hall-available -> handle-conflict \"no\"\n") != std::string::npos);
    CHECK(text.find("arrow start -> specify-requirements\n") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 18);
}

TEST_CASE("trace report")
{
    auto report = trace_report(hall_booking(), activity());
    CHECK(report.mapping == std::vector<TraceEntry>{{"V2", {"charge-deposit"}}, {"V4", {"send-notification"}}});
    CHECK(report.orphan_tags.empty());
    CHECK(report.unrealized_variants == std::vector<std::string>{"V1", "V3", "V5"});

    ProductModel untagged;
    untagged.elements = {{"a", "action", "A", std::nullopt}};
    auto bare = trace_report(hall_booking(), untagged);
    CHECK(bare.mapping.empty());
    CHECK(bare.unrealized_variants == std::vector<std::string>{"V1", "V2", "V3", "V4", "V5"});

    auto seeded = with_extra(activity(), {"audit", "action", "Audit", Ref{"V9"}}, {});
    auto orphan = trace_report(hall_booking(), seeded);
    CHECK(orphan.orphan_tags == std::vector<TraceEntry>{{"V9", {"audit"}}});

    // every tagged element shows up exactly once
    std::size_t tagged = 0, listed = 0;
    for (const auto& e : seeded.elements)
        tagged += e.tag.has_value();
    for (const auto& entry : orphan.mapping)
        listed += entry.elements.size();
    for (const auto& entry : orphan.orphan_tags)
        listed += entry.elements.size();
    CHECK(tagged == listed);
}

TEST_CASE("customized reserve-hall flow")
{
    auto product = activity();
    auto result = derive_customized_product(hall_booking(), product, block_multiple_time_printed());
    CHECK(element_ids(result.product) ==
          std::vector<std::string>{"start", "specify-requirements", "check-availability", "hall-available",
                                   "handle-conflict", "confirm-reservation", "send-notification", "end"});
    REQUIRE(result.report.removed.size() == 1);
    const auto& removed = result.report.removed[0];
    CHECK(removed.id == "charge-deposit");
    CHECK(removed.tag == std::optional<Ref>(Ref{"V2"}));
    CHECK(removed.edges == std::vector<ProductEdge>{{"confirm-reservation", "charge-deposit", std::nullopt},
                                                    {"charge-deposit", "send-notification", std::nullopt}});
    REQUIRE(result.report.dangling.size() == 2);
    CHECK(result.report.dangling[0].element == "confirm-reservation");
    CHECK(result.report.dangling[0].outgoing);
    CHECK(result.report.dangling[1].element == "send-notification");
    CHECK_FALSE(result.report.dangling[1].outgoing);
    CHECK(result.product.edges.size() == 7);
    CHECK(result.report.warnings.empty());
}

TEST_CASE("value-level tags need their value selected")
{
    auto product = with_extra(activity(), {"send-fax", "action", "Send fax", Ref{"V4.1"}},
                              {{"send-notification", "send-fax", std::nullopt}, {"send-fax", "end", std::nullopt}});
    auto result = derive_customized_product(hall_booking(), product, block_multiple_time_printed());
    CHECK(result.product.find_element("send-fax") == nullptr);
    CHECK(result.product.find_element("send-notification") != nullptr);
    auto removed = std::find_if(result.report.removed.begin(), result.report.removed.end(),
                                [](const RemovedElement& r) { return r.id == "send-fax"; });
    REQUIRE(removed != result.report.removed.end());
    CHECK(removed->edges.size() == 2);

    auto with_fax = block_multiple_time_printed();
    with_fax.selected["V4"].insert("V4.1");
    CHECK(derive_customized_product(hall_booking(), product, with_fax).product.find_element("send-fax") != nullptr);
}

TEST_CASE("selecting everything keeps the product unchanged")
{
    auto product = activity();
    auto result = derive_customized_product(hall_booking(), product, everything());
    CHECK(result.product == product);
    CHECK(result.report.removed.empty());
    CHECK(result.report.dangling.empty());
}

TEST_CASE("derivation partition, idempotence and monotonicity")
{
    const auto family = hall_booking();
    auto product = with_extra(activity(), {"send-fax", "action", "Send fax", Ref{"V4.1"}},
                              {{"send-notification", "send-fax", std::nullopt}});
    product = with_extra(product, {"block-rate", "action", "Block rate", Ref{"V5.1"}},
                         {{"charge-deposit", "block-rate", std::nullopt}});

    std::vector<std::string> all_values;
    for (const auto& v : family.variants)
        for (const auto& value : v.values)
            all_values.push_back(value.id);

    std::mt19937 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        Configuration small{"Non Academic", {}};
        for (const auto& id : all_values)
            if (rng() % 3 == 0)
                small.selected[id.substr(0, id.find('.'))].insert(id);
        Configuration large = small;
        for (const auto& id : all_values)
            if (rng() % 3 == 0)
                large.selected[id.substr(0, id.find('.'))].insert(id);

        auto a = derive_customized_product(family, product, small);
        std::vector<std::string> kept = element_ids(a.product);
        std::vector<std::string> gone;
        for (const auto& r : a.report.removed)
            gone.push_back(r.id);
        std::vector<std::string> joined = kept;
        joined.insert(joined.end(), gone.begin(), gone.end());
        std::sort(joined.begin(), joined.end());
        std::vector<std::string> input = element_ids(product);
        std::sort(input.begin(), input.end());
        CHECK(joined == input);  // union is the input and, with equal sizes, disjoint

        auto again = derive_customized_product(family, a.product, small);
        CHECK(again.product == a.product);
        CHECK(again.report.removed.empty());

        auto b = derive_customized_product(family, product, large);
        for (const auto& id : kept)
            CHECK(b.product.find_element(id) != nullptr);
    }
}

TEST_CASE("unresolved tags abort unless forced")
{
    auto product = with_extra(activity(), {"audit", "action", "Audit", Ref{"V9"}},
                              {{"end", "audit", std::nullopt}});
    CHECK(code_of([&] { derive_customized_product(hall_booking(), product, block_multiple_time_printed()); }) ==
          ErrorCode::UnresolvedTag);
    auto forced = derive_customized_product(hall_booking(), product, block_multiple_time_printed(), {true});
    CHECK(forced.product.find_element("audit") == nullptr);
    REQUIRE(forced.report.warnings.size() == 1);
    CHECK(forced.report.warnings[0].find("V9") != std::string::npos);
}
