#ifndef VARKIT_CORE_MODEL_HPP
#define VARKIT_CORE_MODEL_HPP

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace varkit {

/// Reserved token meaning "applicable in every area".
inline constexpr std::string_view kAllAreas = "ALL";

/// True for the ALL token in any letter case ("ALL", "All", "all").
bool is_all_token(std::string_view text);

/// A reference to either a variant (`V3`) or one of its values (`V3.2`).
struct Ref {
    std::string id;

    Ref() = default;
    Ref(std::string text) : id(std::move(text)) {}
    Ref(const char* text) : id(text) {}

    bool is_value() const { return id.find('.') != std::string::npos; }

    auto operator<=>(const Ref&) const = default;
};

bool is_variant_id(std::string_view text);
bool is_value_id(std::string_view text);

/// Maps the dotted trace spellings `V.4` / `V.4.2` onto `V4` / `V4.2`.
/// Anything else is returned trimmed but otherwise unchanged.
std::string normalize_tag(std::string_view text);

enum class RelationKind { Alternative, Or, None };

std::string_view to_string(RelationKind kind);

/// Area applicability of one variant: either ALL or a set of declared names.
struct AreaSet {
    bool all = false;
    std::vector<std::string> names;

    static AreaSet everywhere() { return AreaSet{true, {}}; }
    static AreaSet only(std::vector<std::string> names) { return AreaSet{false, std::move(names)}; }

    bool applies_to(std::string_view area) const;

    bool operator==(const AreaSet&) const = default;
};

struct VariantValue {
    std::string id;
    std::string name;

    bool operator==(const VariantValue&) const = default;
};

struct Variant {
    std::string id;
    std::string name;
    bool mandatory = false;
    RelationKind relation = RelationKind::None;
    AreaSet areas = AreaSet::everywhere();
    std::vector<VariantValue> values;
    std::vector<Ref> dependencies;  // "requires" list, read as a conjunction
    std::optional<std::string> question;

    const VariantValue* find_value(std::string_view value_id) const;

    bool operator==(const Variant&) const = default;
};

struct VariabilityModel {
    std::string name;
    std::vector<std::string> areas;
    std::vector<Variant> variants;

    const Variant* find_variant(std::string_view variant_id) const;
    bool declares_area(std::string_view area) const;
    std::size_t value_count() const;

    bool operator==(const VariabilityModel&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Finding {
    std::string code;
    std::string location;  // offending ref or area name; empty for model-level findings
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> errors;
    std::vector<Finding> warnings;

    bool valid() const { return errors.empty(); }
    bool has_error(std::string_view code) const;

    bool operator==(const ValidationReport&) const = default;
};

namespace codes {
inline constexpr std::string_view kDupId = "DUP_ID";
inline constexpr std::string_view kBadIdFormat = "BAD_ID_FORMAT";
inline constexpr std::string_view kDanglingRef = "DANGLING_REF";
inline constexpr std::string_view kSelfRef = "SELF_REF";
inline constexpr std::string_view kCycle = "CYCLE";
inline constexpr std::string_view kArity = "ARITY";
inline constexpr std::string_view kUnknownArea = "UNKNOWN_AREA";
inline constexpr std::string_view kReservedArea = "RESERVED_AREA";
// warnings
inline constexpr std::string_view kEmptyModel = "EMPTY_MODEL";
inline constexpr std::string_view kEmptyName = "EMPTY_NAME";
inline constexpr std::string_view kCascadeRemoved = "CASCADE_REMOVED";
}  // namespace codes

/// Structural and semantic checks. Findings are ordered by model position
/// (areas first, then variants in declaration order) and then by code.
ValidationReport validate_model(const VariabilityModel& model);

// ---------------------------------------------------------------------------
// Lookup

/// What a Ref points at. `value` is null for variant refs.
struct RefTarget {
    const Variant* variant = nullptr;
    const VariantValue* value = nullptr;
    std::size_t variant_index = 0;
    std::size_t value_index = 0;
};

/// Throws Error(NotFound) when nothing in the model carries that id.
RefTarget resolve_ref(const VariabilityModel& model, const Ref& ref);

/// Non-throwing lookup; first occurrence wins on duplicate ids.
std::optional<RefTarget> find_ref(const VariabilityModel& model, const Ref& ref);

struct DependencyEdge {
    std::string from;
    std::string to;

    bool operator==(const DependencyEdge&) const = default;
};

/// One edge per (variant, owner of each resolvable requires target), without
/// self-loops, deduplicated, in variant order then requires order.
std::vector<DependencyEdge> variant_dependency_graph(const VariabilityModel& model);

/// Kahn ordering of variant indices with requires targets first, ties broken
/// by declaration order. Returns nullopt when the graph has a cycle.
std::optional<std::vector<std::size_t>> topological_variant_order(const VariabilityModel& model);

} // namespace varkit

#endif // VARKIT_CORE_MODEL_HPP
