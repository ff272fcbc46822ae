#include "varkit/session.hpp"

#include "varkit/error.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace varkit {

std::string_view to_string(ValueState state)
{
    switch (state) {
    case ValueState::Pending: return "pending";
    case ValueState::SelectedExplicit: return "selected";
    case ValueState::Forced: return "forced";
    case ValueState::ExcludedExplicit: return "excluded";
    case ValueState::ExcludedByPropagation: return "excluded_by_propagation";
    }
    return "pending";
}

std::string_view to_string(VariantStatus status)
{
    switch (status) {
    case VariantStatus::Undecided: return "undecided";
    case VariantStatus::Included: return "included";
    case VariantStatus::Excluded: return "excluded";
    }
    return "undecided";
}

namespace {

constexpr int kWholeVariant = -1;

struct Cause {
    enum Kind { Answer, Mandatory, Requires, OwnValue, SoleValue, AlternativeSibling, GuardUnmet, VariantExcluded, NoValueLeft };
    Kind kind = Answer;
    std::string source;
};

std::string describe(const Cause& cause)
{
    switch (cause.kind) {
    case Cause::Answer: return "answer for " + cause.source;
    case Cause::Mandatory: return cause.source + " is mandatory";
    case Cause::Requires: return "required by " + cause.source;
    case Cause::OwnValue: return "value " + cause.source + " is selected";
    case Cause::SoleValue: return cause.source + " has a single value";
    case Cause::AlternativeSibling: return "alternative " + cause.source + " is selected";
    case Cause::GuardUnmet: return "requirement " + cause.source + " is excluded";
    case Cause::VariantExcluded: return cause.source + " is excluded";
    case Cause::NoValueLeft: return "every value of " + cause.source + " is excluded";
    }
    return cause.source;
}

struct Fact {
    bool set = false;
    int depth = 0;  // rule applications from the nearest seed
    Cause cause;
};

struct Propagation {
    SessionState state;
    std::vector<Conflict> conflicts;
};

// Saturates the decision facts implied by a set of log entries. Every rule
// only adds facts, so the result depends on the set of entries alone.
class Propagator {
public:
    explicit Propagator(const VariabilityModel& scope) : scope_(scope)
    {
        const auto n = scope.variants.size();
        pos_var_.resize(n);
        neg_var_.resize(n);
        pos_val_.resize(n);
        neg_val_.resize(n);
        dependents_of_variant_.resize(n);
        dependents_of_value_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto m = scope.variants[i].values.size();
            pos_val_[i].resize(m);
            neg_val_[i].resize(m);
            dependents_of_value_[i].resize(m);
        }
        for (std::size_t w = 0; w < n; ++w) {
            for (const auto& target : scope.variants[w].dependencies) {
                auto found = find_ref(scope, target);
                if (!found)
                    continue;
                if (found->value)
                    dependents_of_value_[found->variant_index][found->value_index].push_back(w);
                else
                    dependents_of_variant_[found->variant_index].push_back(w);
            }
        }
    }

    Propagation run(const std::vector<LogEntry>& log)
    {
        // Seed in model order so recorded causes do not depend on log order.
        std::vector<const LogEntry*> decisions(scope_.variants.size(), nullptr);
        for (const auto& entry : log)
            for (std::size_t i = 0; i < scope_.variants.size(); ++i)
                if (scope_.variants[i].id == entry.variant)
                    decisions[i] = &entry;

        for (std::size_t i = 0; i < scope_.variants.size(); ++i) {
            const auto& variant = scope_.variants[i];
            if (variant.mandatory)
                assert_fact(true, i, kWholeVariant, {Cause::Mandatory, variant.id});
            const LogEntry* entry = decisions[i];
            if (!entry)
                continue;
            const Cause cause{Cause::Answer, variant.id};
            if (entry->values.empty()) {
                assert_fact(false, i, kWholeVariant, cause);
                for (std::size_t k = 0; k < variant.values.size(); ++k)
                    assert_fact(false, i, static_cast<int>(k), cause);
                continue;
            }
            assert_fact(true, i, kWholeVariant, cause);
            for (std::size_t k = 0; k < variant.values.size(); ++k) {
                bool chosen = std::find(entry->values.begin(), entry->values.end(), variant.values[k].id) !=
                              entry->values.end();
                assert_fact(chosen, i, static_cast<int>(k), cause);
            }
        }
        while (!work_.empty()) {
            auto item = work_.front();
            work_.pop_front();
            apply_rules(item);
        }
        return finish();
    }

private:
    struct Item {
        bool positive;
        std::size_t variant;
        int value;
    };

    Fact& fact(bool positive, std::size_t i, int k)
    {
        if (k == kWholeVariant)
            return positive ? pos_var_[i] : neg_var_[i];
        return positive ? pos_val_[i][static_cast<std::size_t>(k)] : neg_val_[i][static_cast<std::size_t>(k)];
    }

    // Work is processed breadth first, so the first derivation of a fact is
    // also its shortest.
    void assert_fact(bool positive, std::size_t i, int k, Cause cause, int depth = 0)
    {
        Fact& f = fact(positive, i, k);
        if (f.set)
            return;
        f.set = true;
        f.depth = depth;
        f.cause = std::move(cause);
        work_.push_back({positive, i, k});
    }

    void apply_rules(const Item& item)
    {
        const auto& variant = scope_.variants[item.variant];
        const auto i = item.variant;
        const int d = fact(item.positive, i, item.value).depth + 1;
        if (item.value == kWholeVariant) {
            if (item.positive) {
                for (const auto& target : variant.dependencies)
                    if (auto found = find_ref(scope_, target))
                        assert_fact(true, found->variant_index,
                                    found->value ? static_cast<int>(found->value_index) : kWholeVariant,
                                    {Cause::Requires, variant.id}, d);
                if (variant.relation == RelationKind::None && variant.values.size() == 1)
                    assert_fact(true, i, 0, {Cause::SoleValue, variant.id}, d);
            } else {
                for (std::size_t k = 0; k < variant.values.size(); ++k)
                    assert_fact(false, i, static_cast<int>(k), {Cause::VariantExcluded, variant.id}, d);
                for (auto w : dependents_of_variant_[i])
                    assert_fact(false, w, kWholeVariant, {Cause::GuardUnmet, variant.id}, d);
            }
            return;
        }

        const auto k = static_cast<std::size_t>(item.value);
        const auto& value_id = variant.values[k].id;
        if (item.positive) {
            assert_fact(true, i, kWholeVariant, {Cause::OwnValue, value_id}, d);
            if (variant.relation == RelationKind::Alternative)
                for (std::size_t j = 0; j < variant.values.size(); ++j)
                    if (j != k)
                        assert_fact(false, i, static_cast<int>(j), {Cause::AlternativeSibling, value_id}, d);
        } else {
            for (auto w : dependents_of_value_[i][k])
                assert_fact(false, w, kWholeVariant, {Cause::GuardUnmet, value_id}, d);
            bool none_left = std::all_of(neg_val_[i].begin(), neg_val_[i].end(), [](const Fact& f) { return f.set; });
            if (none_left)
                assert_fact(false, i, kWholeVariant, {Cause::NoValueLeft, variant.id}, d);
        }
    }

    void clash(const std::string& ref, bool mandatory, const Fact& pos, const Fact& neg,
               std::vector<std::pair<int, Conflict>>& out) const
    {
        Conflict conflict;
        conflict.ref = ref;
        conflict.code = mandatory ? "MANDATORY_EXCLUSION" : "FORCED_EXCLUDED";
        conflict.forced_by = pos.cause.source;
        conflict.excluded_by = neg.cause.source;
        conflict.message = ref + " is needed (" + describe(pos.cause) + ") but excluded (" + describe(neg.cause) + ")";
        out.push_back({std::max(pos.depth, neg.depth), std::move(conflict)});
    }

    Propagation finish() const
    {
        Propagation result;
        std::vector<std::pair<int, Conflict>> clashes;
        const auto n = scope_.variants.size();
        result.state.variants.resize(n);
        result.state.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& variant = scope_.variants[i];
            if (pos_var_[i].set && neg_var_[i].set)
                clash(variant.id, variant.mandatory, pos_var_[i], neg_var_[i], clashes);
            result.state.variants[i] = pos_var_[i].set   ? VariantStatus::Included
                                       : neg_var_[i].set ? VariantStatus::Excluded
                                                         : VariantStatus::Undecided;
            auto& values = result.state.values[i];
            values.resize(variant.values.size());
            for (std::size_t k = 0; k < variant.values.size(); ++k) {
                const Fact& pos = pos_val_[i][k];
                const Fact& neg = neg_val_[i][k];
                if (pos.set && neg.set)
                    clash(variant.values[k].id, false, pos, neg, clashes);
                if (pos.set)
                    values[k] = pos.cause.kind == Cause::Answer ? ValueState::SelectedExplicit : ValueState::Forced;
                else if (neg.set)
                    values[k] = neg.cause.kind == Cause::Answer ? ValueState::ExcludedExplicit
                                                                : ValueState::ExcludedByPropagation;
                else
                    values[k] = ValueState::Pending;
            }
        }
        // Shallowest clash first: the one closest to the decisions that caused it.
        std::stable_sort(clashes.begin(), clashes.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto& entry : clashes)
            result.conflicts.push_back(std::move(entry.second));
        return result;
    }

    const VariabilityModel& scope_;
    std::vector<Fact> pos_var_, neg_var_;
    std::vector<std::vector<Fact>> pos_val_, neg_val_;
    std::vector<std::vector<std::size_t>> dependents_of_variant_;
    std::vector<std::vector<std::vector<std::size_t>>> dependents_of_value_;
    std::deque<Item> work_;
};

Propagation propagate(const VariabilityModel& scope, const std::vector<LogEntry>& log)
{
    return Propagator(scope).run(log);
}

PropagationOutcome diff(const VariabilityModel& scope, const SessionState& before, const SessionState& after,
                        const std::string& answered)
{
    PropagationOutcome outcome;
    for (std::size_t i = 0; i < scope.variants.size(); ++i) {
        const auto& variant = scope.variants[i];
        auto was = before.variants[i];
        auto now = after.variants[i];
        if (now != was) {
            if (now == VariantStatus::Included && variant.id != answered)
                outcome.forced.emplace_back(variant.id);
            else if (now == VariantStatus::Excluded)
                outcome.excluded.emplace_back(variant.id);
            else if (now == VariantStatus::Undecided)
                outcome.released.emplace_back(variant.id);
        }
        for (std::size_t k = 0; k < variant.values.size(); ++k) {
            auto old_state = before.values[i][k];
            auto new_state = after.values[i][k];
            if (old_state == new_state)
                continue;
            const auto& id = variant.values[k].id;
            if (new_state == ValueState::Forced && !is_selected(old_state))
                outcome.forced.emplace_back(id);
            else if (is_excluded(new_state) && !is_excluded(old_state))
                outcome.excluded.emplace_back(id);
            else if (new_state == ValueState::Pending)
                outcome.released.emplace_back(id);
        }
    }
    return outcome;
}

} // namespace

ConfigurationSession::ConfigurationSession(const VariabilityModel& model, const std::string& area)
    : scope_(prune_by_area(model, area).model), area_(area), table_(derive_decision_table(scope_))
{
    auto initial = propagate(scope_, log_);
    state_ = std::move(initial.state);
    inherent_conflicts_ = std::move(initial.conflicts);
}

ConfigurationSession new_session(const VariabilityModel& model, const std::string& area)
{
    return ConfigurationSession(model, area);
}

std::size_t ConfigurationSession::variant_index(const std::string& variant_id) const
{
    for (std::size_t i = 0; i < scope_.variants.size(); ++i)
        if (scope_.variants[i].id == variant_id)
            return i;
    throw Error(ErrorCode::RefNotInModel, variant_id + " is not in the " + area_ + " scope");
}

ValueState ConfigurationSession::value_state(const std::string& value_id) const
{
    auto found = find_ref(scope_, Ref(value_id));
    if (!found || !found->value)
        throw Error(ErrorCode::RefNotInModel, value_id + " is not a value in the " + area_ + " scope");
    return state_.values[found->variant_index][found->value_index];
}

VariantStatus ConfigurationSession::variant_status(const std::string& variant_id) const
{
    return state_.variants[variant_index(variant_id)];
}

bool ConfigurationSession::settled(std::size_t i) const
{
    if (state_.variants[i] == VariantStatus::Excluded)
        return true;
    if (state_.variants[i] != VariantStatus::Included)
        return false;
    const auto& values = state_.values[i];
    return std::none_of(values.begin(), values.end(), [](ValueState s) { return s == ValueState::Pending; });
}

PropagationOutcome ConfigurationSession::answer(const std::string& variant_id, const std::vector<std::string>& values)
{
    const auto i = variant_index(variant_id);
    const auto& variant = scope_.variants[i];

    std::vector<std::string> chosen;
    for (const auto& raw : values) {
        auto id = normalize_tag(raw);
        if (!variant.find_value(id))
            throw Error(ErrorCode::RefNotInModel, id + " is not a value of " + variant_id);
        if (std::find(chosen.begin(), chosen.end(), id) == chosen.end())
            chosen.push_back(std::move(id));
    }

    if (chosen.empty()) {
        if (variant.mandatory)
            throw Error(ErrorCode::MandatoryExclusion, variant_id + " is mandatory and cannot be excluded");
    } else {
        bool arity_ok = true;
        switch (variant.relation) {
        case RelationKind::Alternative: arity_ok = chosen.size() == 1; break;
        case RelationKind::Or: arity_ok = true; break;
        case RelationKind::None: arity_ok = chosen.size() == 1 && variant.values.size() == 1; break;
        }
        if (!arity_ok)
            throw Error(ErrorCode::ArityViolation,
                        variant_id + " (" + std::string(to_string(variant.relation)) + ") cannot take " +
                            std::to_string(chosen.size()) + " values");
    }

    auto candidate_log = log_;
    candidate_log.erase(std::remove_if(candidate_log.begin(), candidate_log.end(),
                                       [&](const LogEntry& e) { return e.variant == variant_id; }),
                        candidate_log.end());
    candidate_log.push_back({variant_id, chosen});

    auto result = propagate(scope_, candidate_log);
    if (!result.conflicts.empty()) {
        PropagationOutcome rejected;
        rejected.conflicts = std::move(result.conflicts);
        return rejected;
    }
    auto outcome = diff(scope_, state_, result.state, variant_id);
    log_ = std::move(candidate_log);
    state_ = std::move(result.state);
    return outcome;
}

PropagationOutcome ConfigurationSession::retract(const std::string& variant_id)
{
    auto entry = std::find_if(log_.begin(), log_.end(), [&](const LogEntry& e) { return e.variant == variant_id; });
    if (entry == log_.end())
        throw Error(ErrorCode::NoSuchAnswer, variant_id + " has no recorded decision");
    auto remaining = log_;
    remaining.erase(remaining.begin() + (entry - log_.begin()));

    // A subset of a consistent log cannot clash: propagation is monotone.
    auto result = propagate(scope_, remaining);
    auto outcome = diff(scope_, state_, result.state, "");
    log_ = std::move(remaining);
    state_ = std::move(result.state);
    return outcome;
}

std::vector<PendingDecision> ConfigurationSession::pending_decisions() const
{
    std::vector<PendingDecision> pending;
    for (const auto& row : table_.rows) {
        const auto i = variant_index(row.trace);
        if (settled(i))
            continue;
        PendingDecision decision;
        decision.row = row;
        for (const auto& guard : row.guard)
            if (!is_selected(value_state(guard)))
                decision.unmet.push_back(guard);
        for (const auto& required : row.after)
            if (variant_status(required) != VariantStatus::Included)
                decision.unmet.push_back(required);
        decision.blocked = !decision.unmet.empty();
        pending.push_back(std::move(decision));
    }
    return pending;
}

ConfigurationStatus ConfigurationSession::current_configuration() const
{
    ConfigurationStatus status;
    status.conflicts = inherent_conflicts_;
    for (std::size_t i = 0; i < scope_.variants.size(); ++i)
        if (!settled(i))
            status.undecided.push_back(scope_.variants[i].id);
    if (!status.undecided.empty() || !status.conflicts.empty())
        return status;

    Configuration configuration;
    configuration.area = area_;
    for (std::size_t i = 0; i < scope_.variants.size(); ++i) {
        if (state_.variants[i] != VariantStatus::Included)
            continue;
        auto& chosen = configuration.selected[scope_.variants[i].id];
        for (std::size_t k = 0; k < scope_.variants[i].values.size(); ++k)
            if (is_selected(state_.values[i][k]))
                chosen.insert(scope_.variants[i].values[k].id);
    }
    status.configuration = std::move(configuration);
    return status;
}

} // namespace varkit
