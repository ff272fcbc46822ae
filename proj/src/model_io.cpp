#include "varkit/model_io.hpp"

#include "varkit/error.hpp"
#include "xml.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace varkit {

namespace {

using xml::Element;

std::string trimmed(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return std::string(text);
}

const std::string& required(const Element& el, std::string_view key)
{
    if (const auto* attr = el.attribute(key))
        return attr->value;
    throw Error(ErrorCode::MissingAttribute, "<" + el.name + "> lacks required attribute '" + std::string(key) + "'",
                el.where);
}

void allow_only(const Element& el, std::initializer_list<std::string_view> keys)
{
    for (const auto& attr : el.attributes)
        if (std::find(keys.begin(), keys.end(), attr.name) == keys.end())
            throw Error(ErrorCode::ParseError, "unknown attribute '" + attr.name + "' on <" + el.name + ">",
                        attr.where);
}

void no_children(const Element& el)
{
    if (!el.children.empty())
        throw Error(ErrorCode::UnknownElement, "<" + el.children.front().name + "> not allowed inside <" + el.name + ">",
                    el.children.front().where);
}

RelationKind parse_relation(const Element& el)
{
    const auto& attr = *el.attribute("relation");
    std::string text = trimmed(attr.value);
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (text == "alternative")
        return RelationKind::Alternative;
    if (text == "or")
        return RelationKind::Or;
    if (text == "none")
        return RelationKind::None;
    throw Error(ErrorCode::ParseError, "relation must be alternative, or, or none; got '" + attr.value + "'",
                attr.where);
}

AreaSet parse_area_list(const Element& el)
{
    const auto& attr = *el.attribute("area");
    if (is_all_token(attr.value))
        return AreaSet::everywhere();
    std::vector<std::string> names;
    std::stringstream in(attr.value);
    std::string piece;
    while (std::getline(in, piece, ','))
        if (auto name = trimmed(piece); !name.empty())
            names.push_back(std::move(name));
    if (names.empty())
        throw Error(ErrorCode::ParseError, "area list is empty", attr.where);
    return AreaSet::only(std::move(names));
}

Variant parse_variant(const Element& el)
{
    allow_only(el, {"id", "name", "relation", "area", "mandatory", "question"});
    Variant variant;
    variant.id = required(el, "id");
    variant.name = required(el, "name");
    required(el, "relation");
    required(el, "area");
    variant.relation = parse_relation(el);
    variant.areas = parse_area_list(el);
    if (const auto* mandatory = el.attribute("mandatory")) {
        if (mandatory->value == "true")
            variant.mandatory = true;
        else if (mandatory->value != "false")
            throw Error(ErrorCode::ParseError, "mandatory must be true or false", mandatory->where);
    }
    if (const auto* question = el.attribute("question"))
        variant.question = question->value;

    for (const auto& child : el.children) {
        if (child.name == "value") {
            allow_only(child, {"id", "name"});
            no_children(child);
            variant.values.push_back({required(child, "id"), required(child, "name")});
        } else if (child.name == "requires") {
            allow_only(child, {"ref"});
            no_children(child);
            variant.dependencies.emplace_back(normalize_tag(required(child, "ref")));
        } else {
            throw Error(ErrorCode::UnknownElement, "<" + child.name + "> not allowed inside <variant>", child.where);
        }
    }
    return variant;
}

SourceLocation location_of_offset(std::string_view text, std::size_t offset)
{
    SourceLocation where{1, 1};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++where.line;
            where.column = 1;
        } else {
            ++where.column;
        }
    }
    return where;
}

std::string join(const std::vector<std::string>& items, std::string_view separator)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty())
            out += separator;
        out += item;
    }
    return out;
}

} // namespace

VariabilityModel parse_model(std::string_view document)
{
    Element root = xml::parse_document(document);
    if (root.name != "variability-model")
        throw Error(ErrorCode::UnknownElement, "root element must be <variability-model>, got <" + root.name + ">",
                    root.where);
    allow_only(root, {"name"});

    VariabilityModel model;
    model.name = required(root, "name");
    bool seen_areas = false;
    for (const auto& child : root.children) {
        if (child.name == "areas") {
            if (seen_areas)
                throw Error(ErrorCode::ParseError, "<areas> appears twice", child.where);
            seen_areas = true;
            allow_only(child, {});
            for (const auto& area : child.children) {
                if (area.name != "area")
                    throw Error(ErrorCode::UnknownElement, "<" + area.name + "> not allowed inside <areas>", area.where);
                allow_only(area, {"name"});
                no_children(area);
                model.areas.push_back(required(area, "name"));
            }
        } else if (child.name == "variant") {
            model.variants.push_back(parse_variant(child));
        } else {
            throw Error(ErrorCode::UnknownElement, "<" + child.name + "> not allowed inside <variability-model>",
                        child.where);
        }
    }
    return model;
}

std::string write_model(const VariabilityModel& model)
{
    std::string out(xml::kDeclaration);
    out += xml::Tag("variability-model").attr("name", model.name).open() + "\n";
    if (model.areas.empty()) {
        out += "  <areas/>\n";
    } else {
        out += "  <areas>\n";
        for (const auto& area : model.areas)
            out += "    " + xml::Tag("area").attr("name", area).empty() + "\n";
        out += "  </areas>\n";
    }
    for (const auto& variant : model.variants) {
        xml::Tag tag("variant");
        tag.attr("id", variant.id)
            .attr("name", variant.name)
            .attr("relation", to_string(variant.relation))
            .attr("area", variant.areas.all ? std::string(kAllAreas) : join(variant.areas.names, ","));
        if (variant.mandatory)
            tag.attr("mandatory", "true");
        if (variant.question)
            tag.attr("question", *variant.question);
        if (variant.values.empty() && variant.dependencies.empty()) {
            out += "  " + tag.empty() + "\n";
            continue;
        }
        out += "  " + tag.open() + "\n";
        for (const auto& value : variant.values)
            out += "    " + xml::Tag("value").attr("id", value.id).attr("name", value.name).empty() + "\n";
        for (const auto& target : variant.dependencies)
            out += "    " + xml::Tag("requires").attr("ref", target.id).empty() + "\n";
        out += "  " + tag.close() + "\n";
    }
    out += "</variability-model>\n";
    return out;
}

AnswersDocument parse_answers(std::string_view document)
{
    using nlohmann::json;
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what(), location_of_offset(document, e.byte > 0 ? e.byte - 1 : 0));
    }

    auto fail = [](const std::string& message) -> void { throw Error(ErrorCode::ParseError, message); };
    auto string_list = [&](const json& node, const std::string& what) {
        std::vector<std::string> out;
        if (!node.is_array())
            fail(what + " must be an array");
        for (const auto& item : node) {
            if (!item.is_string())
                fail(what + " entries must be strings");
            out.push_back(normalize_tag(item.get<std::string>()));
        }
        return out;
    };

    if (!root.is_object())
        fail("answers document must be an object");
    for (const auto& [key, _] : root.items())
        if (key != "area" && key != "answers" && key != "exclusions")
            fail("unknown field '" + key + "'");
    if (!root.contains("area") || !root["area"].is_string())
        fail("'area' must be a string");

    AnswersDocument doc;
    doc.area = root["area"].get<std::string>();
    std::set<std::string> mentioned;
    if (root.contains("answers")) {
        if (!root["answers"].is_array())
            fail("'answers' must be an array");
        for (const auto& node : root["answers"]) {
            if (!node.is_object())
                fail("each answer must be an object");
            for (const auto& [key, _] : node.items())
                if (key != "variant" && key != "values")
                    fail("unknown answer field '" + key + "'");
            if (!node.contains("variant") || !node["variant"].is_string())
                fail("answer 'variant' must be a string");
            AnswerEntry entry;
            entry.variant = normalize_tag(node["variant"].get<std::string>());
            if (node.contains("values"))
                entry.values = string_list(node["values"], "answer 'values'");
            for (const auto& value : entry.values)
                if (value.rfind(entry.variant + ".", 0) != 0)
                    fail("value '" + value + "' does not belong to " + entry.variant);
            if (!mentioned.insert(entry.variant).second)
                throw Error(ErrorCode::DuplicateAnswer, entry.variant + " is answered more than once");
            doc.answers.push_back(std::move(entry));
        }
    }
    if (root.contains("exclusions")) {
        for (auto& variant : string_list(root["exclusions"], "'exclusions'")) {
            if (!mentioned.insert(variant).second)
                throw Error(ErrorCode::DuplicateAnswer, variant + " is both answered and excluded, or excluded twice");
            doc.exclusions.push_back(std::move(variant));
        }
    }
    return doc;
}

std::string write_answers(const AnswersDocument& answers)
{
    nlohmann::ordered_json root;
    root["area"] = answers.area;
    root["answers"] = nlohmann::ordered_json::array();
    for (const auto& entry : answers.answers)
        root["answers"].push_back({{"variant", entry.variant}, {"values", entry.values}});
    root["exclusions"] = answers.exclusions;
    return root.dump(2) + "\n";
}

std::string render_variant_table(const VariabilityModel& model)
{
    std::string out = "Variant | Values of variant | Relations | Applicable Area | Dependency\n";
    for (const auto& variant : model.variants) {
        std::vector<std::string> values;
        for (const auto& value : variant.values)
            values.push_back(value.id + " " + value.name);
        std::vector<std::string> targets;
        for (const auto& target : variant.dependencies)
            targets.push_back(target.id);

        std::string relation;
        if (variant.relation == RelationKind::Alternative)
            relation = "Alternative";
        else if (variant.relation == RelationKind::Or)
            relation = "OR";

        out += variant.id + ". " + variant.name + (variant.mandatory ? " [mandatory]" : "");
        out += " | " + join(values, ", ");
        out += " | " + relation;
        out += " | " + (variant.areas.all ? std::string(kAllAreas) : join(variant.areas.names, ", "));
        out += " | " + (targets.empty() ? std::string("None") : join(targets, ", "));
        out += "\n";
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace varkit
