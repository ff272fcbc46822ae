#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/fixtures.hpp"
#include "support/generators.hpp"

#include "varkit/error.hpp"
#include "varkit/model_io.hpp"

#include <random>
#include <sstream>

using namespace varkit;
using namespace varkit::testing;

namespace {

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

SourceLocation where_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.where();
    }
    return {};
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("fixture parses to the hand transcription")
{
    auto m = hall_booking();
    CHECK(m == hall_booking_by_hand());
    REQUIRE(m.variants.size() == 5);
    CHECK(m.variants[1].areas == AreaSet::only({"Non Academic"}));
    CHECK(m.variants[2].dependencies == std::vector<Ref>{"V1.2"});
    CHECK(m.variants[4].dependencies == std::vector<Ref>{"V2.3", "V1.2"});
}

TEST_CASE("empty model document")
{
    auto m = parse_model(R"(<variability-model name="empty"><areas/></variability-model>)");
    CHECK(m.name == "empty");
    CHECK(m.variants.empty());
    CHECK(m.areas.empty());
    CHECK(write_model(m) == "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                            "<variability-model name=\"empty\">\n"
                            "  <areas/>\n"
                            "</variability-model>\n");
}

TEST_CASE("structural parse errors")
{
    const std::string missing_name = "<variability-model name=\"m\">\n"
                                     "  <areas/>\n"
                                     "  <variant id=\"V1\" name=\"A\" relation=\"none\" area=\"ALL\">\n"
                                     "    <value id=\"V1.1\"/>\n"
                                     "  </variant>\n"
                                     "</variability-model>\n";
    CHECK(code_of([&] { parse_model(missing_name); }) == ErrorCode::MissingAttribute);
    CHECK(where_of([&] { parse_model(missing_name); }).line == 4);

    CHECK(code_of([] { parse_model("<variability-model name=\"m\"><areas></variability-model>"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { parse_model("<model name=\"m\"/>"); }) == ErrorCode::UnknownElement);
    CHECK(code_of([] { parse_model("<variability-model name=\"m\"><feature/></variability-model>"); }) ==
          ErrorCode::UnknownElement);
    CHECK(code_of([] { parse_model("<variability-model/>"); }) == ErrorCode::MissingAttribute);
    CHECK(code_of([] {
              parse_model("<variability-model name=\"m\"><variant id=\"V1\" name=\"A\" relation=\"some\" "
                          "area=\"ALL\"><value id=\"V1.1\" name=\"a\"/></variant></variability-model>");
          }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_model("<variability-model name=\"m\" colour=\"red\"/>"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_model("<variability-model name=\"m\">text</variability-model>"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { parse_model(""); }) == ErrorCode::ParseError);

    auto bad = where_of([] { parse_model("<variability-model name=\"m\">\n  <areas>\n  </area>\n"); });
    CHECK(bad.line == 3);
    CHECK(bad.column == 3);
}

TEST_CASE("attributes accept entities, tag spellings and area lists")
{
    auto m = parse_model(R"(<?xml version="1.0"?>
<!-- comment -->
<variability-model name="Q &amp; A">
  <areas><area name="X"/><area name="Y"/></areas>
  <variant id="V1" name="Mode" relation="alternative" area="X, Y" mandatory="true" question="Which &quot;mode&quot;?">
    <value id="V1.1" name="a"/>
    <value id="V1.2" name="b"/>
  </variant>
  <variant id="V2" name="Other" relation="none" area="all">
    <value id="V2.1" name="c"/>
    <requires ref="V.1.2"/>
  </variant>
</variability-model>)");
    CHECK(m.name == "Q & A");
    CHECK(m.variants[0].areas == AreaSet::only({"X", "Y"}));
    CHECK(m.variants[0].mandatory);
    CHECK(m.variants[0].question == std::optional<std::string>("Which \"mode\"?"));
    CHECK(m.variants[1].areas.all);
    CHECK(m.variants[1].dependencies == std::vector<Ref>{"V1.2"});
    CHECK(parse_model(write_model(m)) == m);
}

TEST_CASE("canonical writer reproduces the fixture bytes")
{
    const auto golden = fixture_text("hall-booking.vml.xml");
    CHECK(write_model(parse_model(golden)) == golden);
    CHECK(write_model(hall_booking_by_hand()) == golden);
    auto once = write_model(hall_booking());
    CHECK(write_model(parse_model(once)) == once);
}

TEST_CASE("round trip on generated models")
{
    std::mt19937 rng(20240611);
    for (int i = 0; i < 100; ++i) {
        auto m = random_model(rng);
        auto text = write_model(m);
        auto back = parse_model(text);
        CHECK(back == m);
        CHECK(write_model(back) == text);
    }
}

TEST_CASE("answers documents")
{
    auto one = parse_answers(R"({"area":"Academic","answers":[{"variant":"V4","values":["V4.3"]}],"exclusions":[]})");
    CHECK(one.area == "Academic");
    CHECK(one.answers == std::vector<AnswerEntry>{{"V4", {"V4.3"}}});
    CHECK(one.exclusions.empty());
    CHECK(one == parse_answers(fixture_text("printed-paper.answers.json")));

    auto none = parse_answers(R"({"area":"Academic","answers":[],"exclusions":[]})");
    CHECK(none.answers.empty());
    CHECK(parse_answers(write_answers(one)) == one);

    CHECK(code_of([] {
              parse_answers(R"({"area":"A","answers":[{"variant":"V4","values":["V4.3"]},)"
                            R"({"variant":"V4","values":["V4.1"]}]})");
          }) == ErrorCode::DuplicateAnswer);
    CHECK(code_of([] {
              parse_answers(R"({"area":"A","answers":[{"variant":"V4","values":["V4.3"]}],"exclusions":["V4"]})");
          }) == ErrorCode::DuplicateAnswer);
    CHECK(code_of([] { parse_answers(R"({"area":"A","exclusions":["V2","V2"]})"); }) == ErrorCode::DuplicateAnswer);
    CHECK(code_of([] { parse_answers(R"({"area":"A","extra":1})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_answers(R"({"answers":[]})"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { parse_answers(R"({"area":"A","answers":[{"variant":"V4","values":["V3.1"]}]})"); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { parse_answers("{not json"); }) == ErrorCode::ParseError);
}

TEST_CASE("variant table rendering")
{
    auto table = lines_of(render_variant_table(hall_booking()));
    REQUIRE(table.size() == 6);
    CHECK(table[0] == "Variant | Values of variant | Relations | Applicable Area | Dependency");
    CHECK(table[1] == "V1. Reservation Mode | V1.1 Single, V1.2 Block | Alternative | ALL | None");
    CHECK(table[2] == "V2. Reservation Charge | V2.1 Deposit, V2.2 Tax, V2.3 Discount, V2.4 Refund | OR | "
                      "Non Academic | None");
    CHECK(table[5] ==
          "V5. Reservation Discount | V5.1 Block Discount, V5.2 Seasonal discount | OR | Non Academic | V2.3, V1.2");

    auto customized = lines_of(render_variant_table(academic_printed_paper_by_hand()));
    REQUIRE(customized.size() == 4);
    CHECK(customized[2] == "V3. Block Reservation | V3.1 Multiple Room, V3.2 Multiple time | OR | ALL | V1.2");
    CHECK(customized[3] == "V4. Notification | V4.3 Printed Paper |  | ALL | None");

    VariabilityModel empty;
    CHECK(lines_of(render_variant_table(empty)).size() == 1);

    CHECK(render_variant_table(hall_booking()) != render_variant_table(academic_printed_paper_by_hand()));
}

TEST_CASE("read_file reports missing files")
{
    CHECK(code_of([] { read_file("/nonexistent/model.vml.xml"); }) == ErrorCode::NotFound);
}
