#ifndef VARKIT_CUSTOMIZATION_HPP
#define VARKIT_CUSTOMIZATION_HPP

#include "varkit/core_model.hpp"
#include "varkit/model_io.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace varkit {

/// A derived model plus the CASCADE_REMOVED warnings produced on the way.
struct DerivedModel {
    VariabilityModel model;
    std::vector<Finding> warnings;
};

/// Keeps the variants applicable in `area` (or ALL), then removes any kept
/// variant whose requires target disappeared, transitively.
/// Throws Error(UnknownArea) if the model does not declare `area`.
DerivedModel prune_by_area(const VariabilityModel& model, const std::string& area);

/// Narrows answered variants to the chosen values and drops excluded ones,
/// cascading removal to every dependent. Unanswered variants keep all values.
/// A variant left with one value gets relation None.
///
/// Errors: RefNotInModel, NarrowToEmpty, MandatoryExclusion.
DerivedModel apply_requirements(const VariabilityModel& model, const AnswersDocument& answers);

/// Least fixed point of: a value brings its variant, a variant brings all of
/// its requires targets. Throws Error(NotFound) for seeds that do not resolve.
std::set<Ref> requires_closure(const VariabilityModel& model, const std::set<Ref>& seed);

struct DecisionRow {
    std::string trace;                    // variant id
    std::string question;
    std::vector<std::string> guard;       // value ids that must be selected
    std::vector<std::string> after;       // variant-level requires targets
    std::vector<VariantValue> options;
    RelationKind relation = RelationKind::None;

    bool operator==(const DecisionRow&) const = default;
};

struct DecisionTable {
    std::vector<DecisionRow> rows;

    const DecisionRow* row_for(const std::string& variant_id) const;
    bool operator==(const DecisionTable&) const = default;
};

/// One row per variant in dependency order (targets first, ties by
/// declaration order). Questions default to "Select value(s) for <name>".
DecisionTable derive_decision_table(const VariabilityModel& model);

std::string render_decision_table(const DecisionTable& table);

/// A member product: the selected values of every included variant.
/// Variants absent from `selected` are excluded.
struct Configuration {
    std::string area;
    std::map<std::string, std::set<std::string>> selected;

    bool includes(const std::string& variant_id) const { return selected.count(variant_id) != 0; }
    bool selects(const std::string& value_id) const;

    auto operator<=>(const Configuration&) const = default;
};

/// Lists every way `configuration` breaks the rules of `scope`: mandatory
/// variants present, arity per relation, every requires target satisfied,
/// nothing outside the scope. Empty means consistent and complete.
std::vector<std::string> check_configuration(const VariabilityModel& scope, const Configuration& configuration);

/// Printable form, variants in model order: `V1 = {V1.2}`.
std::string format_configuration(const VariabilityModel& scope, const Configuration& configuration);

inline constexpr std::size_t kEnumerationValueLimit = 24;

/// Brute-force oracle: tries every assignment of "excluded" or a non-empty
/// value subset to each variant of the area-pruned scope and keeps the ones
/// check_configuration accepts. Ordered by variant, excluded first, then
/// subsets by increasing bitmask.
/// Errors: UnknownArea, ScopeTooLarge (more than 24 values in scope).
std::vector<Configuration> enumerate_configurations(const VariabilityModel& model, const std::string& area);

} // namespace varkit

#endif // VARKIT_CUSTOMIZATION_HPP
