#include "varkit/product.hpp"

#include "varkit/error.hpp"
#include "xml.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace varkit {

const ProductElement* ProductModel::find_element(std::string_view id) const
{
    for (const auto& element : elements)
        if (element.id == id)
            return &element;
    return nullptr;
}

namespace {

const std::string& required(const xml::Element& el, std::string_view key)
{
    if (const auto* attr = el.attribute(key))
        return attr->value;
    throw Error(ErrorCode::MissingAttribute, "<" + el.name + "> lacks required attribute '" + std::string(key) + "'",
                el.where);
}

void allow_only(const xml::Element& el, std::initializer_list<std::string_view> keys)
{
    for (const auto& attr : el.attributes)
        if (std::find(keys.begin(), keys.end(), attr.name) == keys.end())
            throw Error(ErrorCode::ParseError, "unknown attribute '" + attr.name + "' on <" + el.name + ">",
                        attr.where);
    if (!el.children.empty())
        throw Error(ErrorCode::UnknownElement, "<" + el.children.front().name + "> not allowed inside <" + el.name + ">",
                    el.children.front().where);
}

std::string quoted(const std::string& text)
{
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

ProductModel parse_product_model(std::string_view document)
{
    auto root = xml::parse_document(document);
    if (root.name != "product-model")
        throw Error(ErrorCode::UnknownElement, "root element must be <product-model>, got <" + root.name + ">",
                    root.where);
    for (const auto& attr : root.attributes)
        if (attr.name != "name")
            throw Error(ErrorCode::ParseError, "unknown attribute '" + attr.name + "' on <product-model>", attr.where);

    ProductModel product;
    product.name = required(root, "name");
    std::set<std::string> ids;
    std::vector<std::pair<ProductEdge, SourceLocation>> edges;
    for (const auto& child : root.children) {
        if (child.name == "element") {
            allow_only(child, {"id", "kind", "label", "variant"});
            ProductElement element{required(child, "id"), required(child, "kind"), required(child, "label"), {}};
            if (const auto* tag = child.attribute("variant"))
                element.tag = Ref(normalize_tag(tag->value));
            if (!ids.insert(element.id).second)
                throw Error(ErrorCode::DuplicateElementId, "element id '" + element.id + "' is used twice", child.where);
            product.elements.push_back(std::move(element));
        } else if (child.name == "edge") {
            allow_only(child, {"from", "to", "label"});
            ProductEdge edge{required(child, "from"), required(child, "to"), {}};
            if (const auto* label = child.attribute("label"))
                edge.label = label->value;
            edges.emplace_back(std::move(edge), child.where);
        } else {
            throw Error(ErrorCode::UnknownElement, "<" + child.name + "> not allowed inside <product-model>",
                        child.where);
        }
    }
    // Edges may precede the elements they connect, so resolve at the end.
    for (auto& [edge, where] : edges) {
        for (const auto* end : {&edge.from, &edge.to})
            if (!ids.count(*end))
                throw Error(ErrorCode::DanglingEdge, "edge " + edge.from + " -> " + edge.to + " references unknown '" +
                                                         *end + "'",
                            where);
        product.edges.push_back(std::move(edge));
    }
    return product;
}

std::string write_product_model(const ProductModel& product)
{
    std::string out(xml::kDeclaration);
    if (product.elements.empty() && product.edges.empty())
        return out + xml::Tag("product-model").attr("name", product.name).empty() + "\n";
    out += xml::Tag("product-model").attr("name", product.name).open() + "\n";
    for (const auto& element : product.elements) {
        xml::Tag tag("element");
        tag.attr("id", element.id).attr("kind", element.kind).attr("label", element.label);
        if (element.tag)
            tag.attr("variant", element.tag->id);
        out += "  " + tag.empty() + "\n";
    }
    for (const auto& edge : product.edges) {
        xml::Tag tag("edge");
        tag.attr("from", edge.from).attr("to", edge.to);
        if (edge.label)
            tag.attr("label", *edge.label);
        out += "  " + tag.empty() + "\n";
    }
    out += "</product-model>\n";
    return out;
}

std::string export_graph_text(const ProductModel& product)
{
    std::string out;
    for (const auto& element : product.elements) {
        out += "node " + element.id + " " + quoted(element.label) + " kind=" + element.kind;
        if (element.tag)
            out += " tag=" + element.tag->id;
        out += "\n";
    }
    for (const auto& edge : product.edges) {
        out += "arrow " + edge.from + " -> " + edge.to;
        if (edge.label)
            out += " " + quoted(*edge.label);
        out += "\n";
    }
    return out;
}

TraceReport trace_report(const VariabilityModel& model, const ProductModel& product)
{
    // Key by (variant index, value index + 1) so variant refs precede their values.
    std::map<std::pair<std::size_t, std::size_t>, TraceEntry> resolved;
    std::vector<TraceEntry> orphans;
    std::set<std::string> realized;

    for (const auto& element : product.elements) {
        if (!element.tag)
            continue;
        const Ref& tag = *element.tag;
        if (auto target = find_ref(model, tag)) {
            auto key = std::make_pair(target->variant_index, target->value ? target->value_index + 1 : 0);
            auto& entry = resolved[key];
            entry.ref = tag;
            entry.elements.push_back(element.id);
            realized.insert(target->variant->id);
            continue;
        }
        auto orphan = std::find_if(orphans.begin(), orphans.end(), [&](const TraceEntry& e) { return e.ref == tag; });
        if (orphan == orphans.end())
            orphans.push_back({tag, {element.id}});
        else
            orphan->elements.push_back(element.id);
    }

    TraceReport report;
    for (auto& [_, entry] : resolved)
        report.mapping.push_back(std::move(entry));
    report.orphan_tags = std::move(orphans);
    for (const auto& variant : model.variants)
        if (!realized.count(variant.id))
            report.unrealized_variants.push_back(variant.id);
    return report;
}

Derivation derive_customized_product(const VariabilityModel& family, const ProductModel& product,
                                     const Configuration& configuration, DeriveOptions options)
{
    Derivation result;
    result.product.name = product.name;
    std::set<std::string> removed_ids;

    for (const auto& element : product.elements) {
        bool keep = true;
        if (element.tag) {
            const Ref& tag = *element.tag;
            if (!find_ref(family, tag)) {
                std::string message = "element '" + element.id + "' is tagged with unknown '" + tag.id + "'";
                if (!options.force)
                    throw Error(ErrorCode::UnresolvedTag, message);
                result.report.warnings.push_back(std::string(to_string(ErrorCode::UnresolvedTag)) + ": " + message);
                keep = false;
            } else {
                keep = tag.is_value() ? configuration.selects(tag.id) : configuration.includes(tag.id);
            }
        }
        if (keep) {
            result.product.elements.push_back(element);
        } else {
            removed_ids.insert(element.id);
            result.report.removed.push_back({element.id, element.tag, {}});
        }
    }

    for (const auto& edge : product.edges) {
        bool from_gone = removed_ids.count(edge.from) != 0;
        bool to_gone = removed_ids.count(edge.to) != 0;
        if (!from_gone && !to_gone) {
            result.product.edges.push_back(edge);
            continue;
        }
        for (auto& removed : result.report.removed)
            if (removed.id == edge.from || removed.id == edge.to)
                removed.edges.push_back(edge);
        if (!from_gone)
            result.report.dangling.push_back({edge.from, edge, true});
        if (!to_gone)
            result.report.dangling.push_back({edge.to, edge, false});
    }
    return result;
}

} // namespace varkit
