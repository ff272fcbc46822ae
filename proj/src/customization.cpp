#include "varkit/customization.hpp"

#include "varkit/error.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>

namespace varkit {

namespace {

// Drops `doomed` variants, then repeatedly drops any survivor with a requires
// target that no longer resolves. Cascaded removals are reported.
DerivedModel remove_with_cascade(VariabilityModel model, const std::set<std::string>& doomed)
{
    DerivedModel result;
    auto& variants = model.variants;
    variants.erase(std::remove_if(variants.begin(), variants.end(),
                                  [&](const Variant& v) { return doomed.count(v.id) != 0; }),
                   variants.end());
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = variants.begin(); it != variants.end(); ++it) {
            auto missing = std::find_if(it->dependencies.begin(), it->dependencies.end(),
                                        [&](const Ref& target) { return !find_ref(model, target); });
            if (missing == it->dependencies.end())
                continue;
            result.warnings.push_back({std::string(codes::kCascadeRemoved), it->id,
                                       it->id + " removed because its requirement " + missing->id + " is gone"});
            variants.erase(it);
            changed = true;
            break;
        }
    }
    result.model = std::move(model);
    return result;
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

DerivedModel prune_by_area(const VariabilityModel& model, const std::string& area)
{
    if (!model.declares_area(area))
        throw Error(ErrorCode::UnknownArea, "area '" + area + "' is not declared by model '" + model.name + "'");
    std::set<std::string> doomed;
    for (const auto& variant : model.variants)
        if (!variant.areas.applies_to(area))
            doomed.insert(variant.id);
    return remove_with_cascade(model, doomed);
}

DerivedModel apply_requirements(const VariabilityModel& model, const AnswersDocument& answers)
{
    VariabilityModel narrowed = model;
    for (const auto& entry : answers.answers) {
        auto it = std::find_if(narrowed.variants.begin(), narrowed.variants.end(),
                               [&](const Variant& v) { return v.id == entry.variant; });
        if (it == narrowed.variants.end())
            throw Error(ErrorCode::RefNotInModel, entry.variant + " is not part of model '" + model.name + "'");
        if (entry.values.empty())
            throw Error(ErrorCode::NarrowToEmpty, "answer for " + entry.variant + " selects no value");
        for (const auto& value : entry.values)
            if (!it->find_value(value))
                throw Error(ErrorCode::RefNotInModel, value + " is not a value of " + entry.variant);

        std::vector<VariantValue> kept;
        for (const auto& value : it->values)
            if (std::find(entry.values.begin(), entry.values.end(), value.id) != entry.values.end())
                kept.push_back(value);
        it->values = std::move(kept);
        if (it->values.size() == 1)
            it->relation = RelationKind::None;
    }

    std::set<std::string> doomed;
    for (const auto& variant_id : answers.exclusions) {
        const auto* variant = narrowed.find_variant(variant_id);
        if (!variant)
            throw Error(ErrorCode::RefNotInModel, variant_id + " is not part of model '" + model.name + "'");
        if (variant->mandatory)
            throw Error(ErrorCode::MandatoryExclusion, variant_id + " is mandatory and cannot be excluded");
        doomed.insert(variant_id);
    }
    return remove_with_cascade(std::move(narrowed), doomed);
}

std::set<Ref> requires_closure(const VariabilityModel& model, const std::set<Ref>& seed)
{
    std::set<Ref> closure;
    std::deque<Ref> work;
    auto add = [&](const Ref& ref) {
        if (closure.insert(ref).second)
            work.push_back(ref);
    };
    for (const auto& ref : seed) {
        resolve_ref(model, ref);
        add(ref);
    }
    while (!work.empty()) {
        Ref ref = work.front();
        work.pop_front();
        auto target = resolve_ref(model, ref);
        if (ref.is_value()) {
            add(Ref(target.variant->id));
            continue;
        }
        for (const auto& dependency : target.variant->dependencies)
            if (find_ref(model, dependency))
                add(dependency);
    }
    return closure;
}

const DecisionRow* DecisionTable::row_for(const std::string& variant_id) const
{
    for (const auto& row : rows)
        if (row.trace == variant_id)
            return &row;
    return nullptr;
}

DecisionTable derive_decision_table(const VariabilityModel& model)
{
    auto order = topological_variant_order(model);
    if (!order) {
        // Only reachable on invalid models; fall back to declaration order.
        order.emplace(model.variants.size());
        for (std::size_t i = 0; i < order->size(); ++i)
            (*order)[i] = i;
    }
    DecisionTable table;
    for (auto index : *order) {
        const auto& variant = model.variants[index];
        DecisionRow row;
        row.trace = variant.id;
        row.question = variant.question ? *variant.question : "Select value(s) for " + variant.name;
        for (const auto& target : variant.dependencies)
            (target.is_value() ? row.guard : row.after).push_back(target.id);
        row.options = variant.values;
        row.relation = variant.relation;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_decision_table(const DecisionTable& table)
{
    std::string out = "Trace | Question | Guard | Options | Relation\n";
    for (const auto& row : table.rows) {
        std::vector<std::string> guard = row.guard;
        guard.insert(guard.end(), row.after.begin(), row.after.end());
        std::vector<std::string> options;
        for (const auto& option : row.options)
            options.push_back(option.id + " " + option.name);
        out += row.trace + " | " + row.question + " | " + (guard.empty() ? "-" : join(guard, ", ")) + " | " +
               join(options, ", ") + " | " + std::string(to_string(row.relation)) + "\n";
    }
    return out;
}

bool Configuration::selects(const std::string& value_id) const
{
    auto dot = value_id.rfind('.');
    if (dot == std::string::npos)
        return false;
    auto it = selected.find(value_id.substr(0, dot));
    return it != selected.end() && it->second.count(value_id) != 0;
}

std::vector<std::string> check_configuration(const VariabilityModel& scope, const Configuration& configuration)
{
    std::vector<std::string> problems;
    for (const auto& [variant_id, values] : configuration.selected) {
        const auto* variant = scope.find_variant(variant_id);
        if (!variant) {
            problems.push_back(variant_id + " is outside the configured scope");
            continue;
        }
        for (const auto& value : values)
            if (!variant->find_value(value))
                problems.push_back(value + " is not a value of " + variant_id);
    }
    for (const auto& variant : scope.variants) {
        auto found = configuration.selected.find(variant.id);
        if (found == configuration.selected.end()) {
            if (variant.mandatory)
                problems.push_back(variant.id + " is mandatory but excluded");
            continue;
        }
        const auto count = found->second.size();
        switch (variant.relation) {
        case RelationKind::Alternative:
            if (count != 1)
                problems.push_back(variant.id + " is an alternative and needs exactly one value");
            break;
        case RelationKind::Or:
            if (count < 1)
                problems.push_back(variant.id + " needs at least one value");
            break;
        case RelationKind::None:
            if (count != 1 || variant.values.size() != 1)
                problems.push_back(variant.id + " must carry its single value");
            break;
        }
        for (const auto& target : variant.dependencies) {
            bool met = target.is_value() ? configuration.selects(target.id) : configuration.includes(target.id);
            if (!met)
                problems.push_back(variant.id + " requires " + target.id);
        }
    }
    return problems;
}

std::string format_configuration(const VariabilityModel& scope, const Configuration& configuration)
{
    std::string out;
    for (const auto& variant : scope.variants) {
        auto found = configuration.selected.find(variant.id);
        if (found == configuration.selected.end())
            continue;
        std::vector<std::string> values;
        for (const auto& value : variant.values)
            if (found->second.count(value.id))
                values.push_back(value.id);
        out += variant.id + " = {" + join(values, ", ") + "}\n";
    }
    return out;
}

std::vector<Configuration> enumerate_configurations(const VariabilityModel& model, const std::string& area)
{
    const auto scope = prune_by_area(model, area).model;
    if (scope.value_count() > kEnumerationValueLimit)
        throw Error(ErrorCode::ScopeTooLarge, "scope has " + std::to_string(scope.value_count()) + " values; limit is " +
                                                  std::to_string(kEnumerationValueLimit));

    // Per variant: the options that can pass the local (arity/mandatory)
    // rules. nullopt stands for "excluded".
    std::vector<std::vector<std::optional<std::set<std::string>>>> options;
    for (const auto& variant : scope.variants) {
        std::vector<std::optional<std::set<std::string>>> choices;
        if (!variant.mandatory)
            choices.emplace_back(std::nullopt);
        const auto n = variant.values.size();
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::set<std::string> subset;
            for (std::size_t bit = 0; bit < n; ++bit)
                if (mask & (1u << bit))
                    subset.insert(variant.values[bit].id);
            bool arity_ok = variant.relation == RelationKind::Or ? true : subset.size() == 1;
            if (arity_ok)
                choices.emplace_back(std::move(subset));
        }
        options.push_back(std::move(choices));
    }

    std::vector<Configuration> result;
    std::vector<std::size_t> cursor(options.size(), 0);
    if (std::any_of(options.begin(), options.end(), [](const auto& choices) { return choices.empty(); }))
        return result;
    for (;;) {
        Configuration candidate;
        candidate.area = area;
        for (std::size_t i = 0; i < options.size(); ++i)
            if (const auto& choice = options[i][cursor[i]])
                candidate.selected.emplace(scope.variants[i].id, *choice);
        if (check_configuration(scope, candidate).empty())
            result.push_back(std::move(candidate));

        // Odometer with the first variant as the most significant digit.
        std::size_t digit = options.size();
        while (digit > 0) {
            --digit;
            if (++cursor[digit] < options[digit].size())
                break;
            cursor[digit] = 0;
            if (digit == 0)
                return result;
        }
        if (options.empty())
            return result;
    }
}

} // namespace varkit
