#ifndef VARKIT_PRODUCT_HPP
#define VARKIT_PRODUCT_HPP

#include "varkit/core_model.hpp"
#include "varkit/customization.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace varkit {

/// A node of the generic member model (an activity step, a decision, ...).
/// `tag` names the variant or value the element realizes, in canonical form.
struct ProductElement {
    std::string id;
    std::string kind;
    std::string label;
    std::optional<Ref> tag;

    bool operator==(const ProductElement&) const = default;
};

struct ProductEdge {
    std::string from;
    std::string to;
    std::optional<std::string> label;

    bool operator==(const ProductEdge&) const = default;
};

struct ProductModel {
    std::string name;
    std::vector<ProductElement> elements;
    std::vector<ProductEdge> edges;

    const ProductElement* find_element(std::string_view id) const;
    bool operator==(const ProductModel&) const = default;
};

/// Reads a `.product.xml` document: root `product-model name`, children
/// `element id kind label [variant]` and `edge from to [label]`. Tags are
/// normalized (`V.4` -> `V4`).
///
/// Errors: ParseError, MissingAttribute, UnknownElement, DuplicateElementId,
/// DanglingEdge.
ProductModel parse_product_model(std::string_view document);
std::string write_product_model(const ProductModel& product);

/// Line-per-statement graph text: `node <id> "<label>" kind=<kind> [tag=<ref>]`
/// and `arrow <from> -> <to> ["<label>"]`.
std::string export_graph_text(const ProductModel& product);

struct TraceEntry {
    Ref ref;
    std::vector<std::string> elements;

    bool operator==(const TraceEntry&) const = default;
};

struct TraceReport {
    std::vector<TraceEntry> mapping;             // refs in model order
    std::vector<TraceEntry> orphan_tags;         // tags that resolve to nothing, first-seen order
    std::vector<std::string> unrealized_variants;  // variants with no element tagged by them or their values
};

TraceReport trace_report(const VariabilityModel& model, const ProductModel& product);

struct RemovedElement {
    std::string id;
    std::optional<Ref> tag;
    std::vector<ProductEdge> edges;  // incident edges removed with it
};

/// An edge end left without its counterpart, on an element that survived.
struct DanglingEndpoint {
    std::string element;
    ProductEdge edge;
    bool outgoing = false;  // true when `element` was the edge source
};

struct RemovalReport {
    std::vector<RemovedElement> removed;
    std::vector<DanglingEndpoint> dangling;
    std::vector<std::string> warnings;
};

struct Derivation {
    ProductModel product;
    RemovalReport report;
};

struct DeriveOptions {
    /// Downgrade UNRESOLVED_TAG to a warning; such elements are removed.
    bool force = false;
};

/// Keeps untagged elements, elements tagged by an included variant, and
/// elements tagged by a selected value; everything else goes together with
/// its incident edges. No rewiring happens. `family` resolves the tags and
/// must be the model the configuration was drawn from.
///
/// Errors: UnresolvedTag unless `options.force`.
Derivation derive_customized_product(const VariabilityModel& family, const ProductModel& product,
                                     const Configuration& configuration, DeriveOptions options = {});

} // namespace varkit

#endif // VARKIT_PRODUCT_HPP
