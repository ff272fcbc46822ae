#ifndef VARKIT_TESTS_FIXTURES_HPP
#define VARKIT_TESTS_FIXTURES_HPP

#include "varkit/core_model.hpp"
#include "varkit/model_io.hpp"

#include <string>

namespace varkit::testing {

inline std::string fixture_path(const std::string& name)
{
    return std::string(VARKIT_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture_text(const std::string& name)
{
    return read_file(fixture_path(name));
}

inline VariabilityModel hall_booking()
{
    return parse_model(fixture_text("hall-booking.vml.xml"));
}

inline Variant make_variant(std::string id, std::string name, RelationKind relation, AreaSet areas,
                            std::vector<std::string> value_names, std::vector<Ref> requires_list = {})
{
    Variant v;
    v.id = std::move(id);
    v.name = std::move(name);
    v.relation = relation;
    v.areas = std::move(areas);
    for (std::size_t k = 0; k < value_names.size(); ++k)
        v.values.push_back({v.id + "." + std::to_string(k + 1), value_names[k]});
    v.dependencies = std::move(requires_list);
    return v;
}

/// The variant table transcribed by hand, independent of the parser.
inline VariabilityModel hall_booking_by_hand()
{
    using R = RelationKind;
    VariabilityModel m;
    m.name = "Hall Booking System";
    m.areas = {"Academic", "Non Academic"};
    m.variants = {
        make_variant("V1", "Reservation Mode", R::Alternative, AreaSet::everywhere(), {"Single", "Block"}),
        make_variant("V2", "Reservation Charge", R::Or, AreaSet::only({"Non Academic"}),
                     {"Deposit", "Tax", "Discount", "Refund"}),
        make_variant("V3", "Block Reservation", R::Or, AreaSet::everywhere(), {"Multiple Room", "Multiple time"},
                     {"V1.2"}),
        make_variant("V4", "Notification", R::Or, AreaSet::everywhere(), {"Fax", "Email", "Printed Paper"}),
        make_variant("V5", "Reservation Discount", R::Or, AreaSet::only({"Non Academic"}),
                     {"Block Discount", "Seasonal discount"}, {"V2.3", "V1.2"}),
    };
    m.variants[0].question = "What is the reservation mode?";
    m.variants[1].question = "How is the charge for reservation?";
    m.variants[2].question = "What is the type of block reservation?";
    return m;
}

/// The customized academic model with printed-paper notification, by hand.
inline VariabilityModel academic_printed_paper_by_hand()
{
    auto full = hall_booking_by_hand();
    VariabilityModel m;
    m.name = full.name;
    m.areas = full.areas;
    m.variants = {full.variants[0], full.variants[2], full.variants[3]};
    m.variants[2].values = {{"V4.3", "Printed Paper"}};
    m.variants[2].relation = RelationKind::None;
    return m;
}

} // namespace varkit::testing

#endif // VARKIT_TESTS_FIXTURES_HPP
