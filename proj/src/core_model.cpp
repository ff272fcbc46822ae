#include "varkit/core_model.hpp"

#include "varkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>
#include <set>
#include <tuple>

namespace varkit {

namespace {

std::string_view trim(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    return text;
}

// Positive decimal integer without a leading zero.
bool is_positive_number(std::string_view text)
{
    if (text.empty() || text.front() == '0')
        return false;
    return std::all_of(text.begin(), text.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

} // namespace

bool is_all_token(std::string_view text)
{
    text = trim(text);
    if (text.size() != kAllAreas.size())
        return false;
    for (std::size_t i = 0; i < text.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(text[i])) != kAllAreas[i])
            return false;
    return true;
}

bool is_variant_id(std::string_view text)
{
    return text.size() >= 2 && text.front() == 'V' && is_positive_number(text.substr(1));
}

bool is_value_id(std::string_view text)
{
    auto dot = text.find('.');
    if (dot == std::string_view::npos)
        return false;
    return is_variant_id(text.substr(0, dot)) && is_positive_number(text.substr(dot + 1));
}

std::string normalize_tag(std::string_view text)
{
    text = trim(text);
    if (text.size() > 2 && text[0] == 'V' && text[1] == '.') {
        std::string candidate = "V" + std::string(text.substr(2));
        if (is_variant_id(candidate) || is_value_id(candidate))
            return candidate;
    }
    return std::string(text);
}

std::string_view to_string(RelationKind kind)
{
    switch (kind) {
    case RelationKind::Alternative: return "alternative";
    case RelationKind::Or: return "or";
    case RelationKind::None: return "none";
    }
    return "none";
}

bool AreaSet::applies_to(std::string_view area) const
{
    if (all)
        return true;
    area = trim(area);
    return std::any_of(names.begin(), names.end(),
                       [&](const std::string& name) { return trim(name) == area; });
}

const VariantValue* Variant::find_value(std::string_view value_id) const
{
    for (const auto& value : values)
        if (value.id == value_id)
            return &value;
    return nullptr;
}

const Variant* VariabilityModel::find_variant(std::string_view variant_id) const
{
    for (const auto& variant : variants)
        if (variant.id == variant_id)
            return &variant;
    return nullptr;
}

bool VariabilityModel::declares_area(std::string_view area) const
{
    area = trim(area);
    return std::any_of(areas.begin(), areas.end(),
                       [&](const std::string& name) { return trim(name) == area; });
}

std::size_t VariabilityModel::value_count() const
{
    std::size_t total = 0;
    for (const auto& variant : variants)
        total += variant.values.size();
    return total;
}

bool ValidationReport::has_error(std::string_view code) const
{
    return std::any_of(errors.begin(), errors.end(),
                       [&](const Finding& finding) { return finding.code == code; });
}

std::optional<RefTarget> find_ref(const VariabilityModel& model, const Ref& ref)
{
    for (std::size_t i = 0; i < model.variants.size(); ++i) {
        const auto& variant = model.variants[i];
        if (!ref.is_value()) {
            if (variant.id == ref.id)
                return RefTarget{&variant, nullptr, i, 0};
            continue;
        }
        for (std::size_t k = 0; k < variant.values.size(); ++k)
            if (variant.values[k].id == ref.id)
                return RefTarget{&variant, &variant.values[k], i, k};
    }
    return std::nullopt;
}

RefTarget resolve_ref(const VariabilityModel& model, const Ref& ref)
{
    if (auto target = find_ref(model, ref))
        return *target;
    throw Error(ErrorCode::NotFound, "no variant or value with id '" + ref.id + "'");
}

std::vector<DependencyEdge> variant_dependency_graph(const VariabilityModel& model)
{
    std::vector<DependencyEdge> edges;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& variant : model.variants) {
        for (const auto& target : variant.dependencies) {
            auto resolved = find_ref(model, target);
            if (!resolved || resolved->variant->id == variant.id)
                continue;
            if (seen.emplace(variant.id, resolved->variant->id).second)
                edges.push_back({variant.id, resolved->variant->id});
        }
    }
    return edges;
}

namespace {

// Adjacency by variant index; edge i -> j means i requires something of j.
std::vector<std::vector<std::size_t>> dependency_adjacency(const VariabilityModel& model)
{
    std::vector<std::vector<std::size_t>> adjacency(model.variants.size());
    for (std::size_t i = 0; i < model.variants.size(); ++i) {
        for (const auto& target : model.variants[i].dependencies) {
            auto resolved = find_ref(model, target);
            if (!resolved || resolved->variant_index == i)
                continue;
            auto& out = adjacency[i];
            if (std::find(out.begin(), out.end(), resolved->variant_index) == out.end())
                out.push_back(resolved->variant_index);
        }
    }
    return adjacency;
}

// Tarjan SCC; returns components with more than one member, each sorted.
std::vector<std::vector<std::size_t>> cyclic_components(const std::vector<std::vector<std::size_t>>& adjacency)
{
    const std::size_t n = adjacency.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> result;
    int counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : adjacency[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> component;
            std::size_t w = 0;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                component.push_back(w);
            } while (w != v);
            if (component.size() > 1) {
                std::sort(component.begin(), component.end());
                result.push_back(std::move(component));
            }
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0)
            visit(v);
    return result;
}

} // namespace

std::optional<std::vector<std::size_t>> topological_variant_order(const VariabilityModel& model)
{
    const auto adjacency = dependency_adjacency(model);
    const std::size_t n = adjacency.size();
    // dependents[j] lists variants that must come after j.
    std::vector<std::vector<std::size_t>> dependents(n);
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        pending[i] = adjacency[i].size();
        for (auto j : adjacency[i])
            dependents[j].push_back(i);
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (pending[i] == 0)
            ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto next = ready.top();
        ready.pop();
        order.push_back(next);
        for (auto dependent : dependents[next])
            if (--pending[dependent] == 0)
                ready.push(dependent);
    }
    if (order.size() != n)
        return std::nullopt;
    return order;
}

// ---------------------------------------------------------------------------

namespace {

struct PositionedFinding {
    std::size_t position;
    Finding finding;
};

class FindingSink {
public:
    void error(std::size_t position, std::string_view code, std::string location, std::string message)
    {
        errors_.push_back({position, {std::string(code), std::move(location), std::move(message)}});
    }
    void warning(std::size_t position, std::string_view code, std::string location, std::string message)
    {
        warnings_.push_back({position, {std::string(code), std::move(location), std::move(message)}});
    }

    ValidationReport finish()
    {
        ValidationReport report;
        report.errors = sorted(std::move(errors_));
        report.warnings = sorted(std::move(warnings_));
        return report;
    }

private:
    static std::vector<Finding> sorted(std::vector<PositionedFinding> items)
    {
        std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            return std::tie(a.position, a.finding.code) < std::tie(b.position, b.finding.code);
        });
        std::vector<Finding> out;
        out.reserve(items.size());
        for (auto& item : items)
            out.push_back(std::move(item.finding));
        return out;
    }

    std::vector<PositionedFinding> errors_;
    std::vector<PositionedFinding> warnings_;
};

} // namespace

ValidationReport validate_model(const VariabilityModel& model)
{
    FindingSink sink;
    const std::size_t area_base = 0;
    const std::size_t variant_base = model.areas.size();

    if (model.variants.empty())
        sink.warning(variant_base, codes::kEmptyModel, "", "model declares no variants");

    std::set<std::string> area_names;
    for (std::size_t i = 0; i < model.areas.size(); ++i) {
        std::string name(trim(model.areas[i]));
        if (name.empty()) {
            sink.warning(area_base + i, codes::kEmptyName, "", "area with empty name");
            continue;
        }
        if (is_all_token(name))
            sink.error(area_base + i, codes::kReservedArea, name, "'" + name + "' is reserved and cannot be declared");
        else if (!area_names.insert(name).second)
            sink.error(area_base + i, codes::kDupId, name, "area '" + name + "' declared twice");
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < model.variants.size(); ++i) {
        const auto& variant = model.variants[i];
        const std::size_t pos = variant_base + i;

        if (!is_variant_id(variant.id))
            sink.error(pos, codes::kBadIdFormat, variant.id, "variant id '" + variant.id + "' is not of the form V<n>");
        if (!ids.insert(variant.id).second)
            sink.error(pos, codes::kDupId, variant.id, "id '" + variant.id + "' is used more than once");
        if (trim(variant.name).empty())
            sink.warning(pos, codes::kEmptyName, variant.id, "variant has an empty name");

        std::set<std::string> sibling_names;
        for (const auto& value : variant.values) {
            auto dot = value.id.find('.');
            if (!is_value_id(value.id) || value.id.substr(0, dot) != variant.id)
                sink.error(pos, codes::kBadIdFormat, value.id,
                           "value id '" + value.id + "' is not of the form " + variant.id + ".<n>");
            if (!ids.insert(value.id).second)
                sink.error(pos, codes::kDupId, value.id, "id '" + value.id + "' is used more than once");
            if (trim(value.name).empty())
                sink.warning(pos, codes::kEmptyName, value.id, "value has an empty name");
            else if (!sibling_names.insert(std::string(trim(value.name))).second)
                sink.error(pos, codes::kDupId, value.id, "value name '" + value.name + "' repeated within " + variant.id);
        }

        const auto count = variant.values.size();
        switch (variant.relation) {
        case RelationKind::Alternative:
        case RelationKind::Or:
            if (count < 2)
                sink.error(pos, codes::kArity, variant.id,
                           std::string(to_string(variant.relation)) + " variant needs at least 2 values, has " +
                               std::to_string(count));
            break;
        case RelationKind::None:
            if (count != 1)
                sink.error(pos, codes::kArity, variant.id,
                           "variant without relation needs exactly 1 value, has " + std::to_string(count));
            break;
        }

        if (!variant.areas.all) {
            if (variant.areas.names.empty())
                sink.error(pos, codes::kUnknownArea, variant.id, "variant is applicable in no area");
            for (const auto& area : variant.areas.names) {
                if (is_all_token(area))
                    sink.error(pos, codes::kReservedArea, variant.id, "ALL cannot be combined with named areas");
                else if (!model.declares_area(area))
                    sink.error(pos, codes::kUnknownArea, variant.id, "area '" + area + "' is not declared");
            }
        }

        std::set<std::string> seen_targets;
        for (const auto& target : variant.dependencies) {
            if (!seen_targets.insert(target.id).second) {
                sink.error(pos, codes::kDupId, variant.id, "requires '" + target.id + "' listed twice");
                continue;
            }
            auto resolved = find_ref(model, target);
            if (!resolved)
                sink.error(pos, codes::kDanglingRef, variant.id, "requires unknown '" + target.id + "'");
            else if (resolved->variant_index == i)
                sink.error(pos, codes::kSelfRef, variant.id, "requires itself via '" + target.id + "'");
        }
    }

    for (const auto& component : cyclic_components(dependency_adjacency(model))) {
        std::string members;
        for (auto idx : component) {
            if (!members.empty())
                members += ", ";
            members += model.variants[idx].id;
        }
        const auto& first = model.variants[component.front()];
        sink.error(variant_base + component.front(), codes::kCycle, first.id, "dependency cycle among " + members);
    }

    return sink.finish();
}

} // namespace varkit
