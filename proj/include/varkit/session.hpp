#ifndef VARKIT_SESSION_HPP
#define VARKIT_SESSION_HPP

#include "varkit/core_model.hpp"
#include "varkit/customization.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace varkit {

enum class ValueState { Pending, SelectedExplicit, Forced, ExcludedExplicit, ExcludedByPropagation };
enum class VariantStatus { Undecided, Included, Excluded };

std::string_view to_string(ValueState state);
std::string_view to_string(VariantStatus status);

inline bool is_selected(ValueState s) { return s == ValueState::SelectedExplicit || s == ValueState::Forced; }
inline bool is_excluded(ValueState s)
{
    return s == ValueState::ExcludedExplicit || s == ValueState::ExcludedByPropagation;
}

/// Decision state of every ref in a session scope, indexed like the scope
/// model: variants[i] and values[i][k] belong to scope.variants[i].
struct SessionState {
    std::vector<VariantStatus> variants;
    std::vector<std::vector<ValueState>> values;

    bool operator==(const SessionState&) const = default;
};

/// One engineer decision. An empty value list excludes the variant.
struct LogEntry {
    std::string variant;
    std::vector<std::string> values;

    bool operator==(const LogEntry&) const = default;
};

/// A ref that propagation would have to both select and exclude.
struct Conflict {
    std::string ref;
    std::string code;         // FORCED_EXCLUDED or MANDATORY_EXCLUSION
    std::string forced_by;    // what made `ref` selected / included
    std::string excluded_by;  // what made `ref` excluded
    std::string message;

    bool operator==(const Conflict&) const = default;
};

/// Net effect of one answer or retraction. On conflict the session is
/// untouched and only `conflicts` is filled.
struct PropagationOutcome {
    std::vector<Ref> forced;
    std::vector<Ref> excluded;
    std::vector<Ref> released;  // refs that went back to Pending/Undecided
    std::vector<Conflict> conflicts;

    bool accepted() const { return conflicts.empty(); }
};

/// A decision-table row that still needs an answer. `blocked` rows have
/// guards or variant requirements that are not yet selected; answering them
/// anyway forces those guards.
struct PendingDecision {
    DecisionRow row;
    bool blocked = false;
    std::vector<std::string> unmet;
};

struct ConfigurationStatus {
    std::optional<Configuration> configuration;
    std::vector<std::string> undecided;
    std::vector<Conflict> conflicts;  // non-empty only for unsatisfiable scopes

    bool complete() const { return configuration.has_value(); }
};

/// Live customization of one family member. Single writer: callers must
/// serialize mutations; const members may run concurrently between them.
///
/// The state is a pure function of the set of logged decisions, so the order
/// in which compatible answers arrive never matters, and a retraction is a
/// replay of the remaining log.
class ConfigurationSession {
public:
    /// Prunes `model` to `area`; mandatory variants start Included.
    /// Throws Error(UnknownArea).
    ConfigurationSession(const VariabilityModel& model, const std::string& area);

    const VariabilityModel& scope() const { return scope_; }
    const std::string& area() const { return area_; }
    const std::vector<LogEntry>& log() const { return log_; }
    const SessionState& state() const { return state_; }
    const DecisionTable& table() const { return table_; }

    /// Conflicts already present before any answer (unsatisfiable scope).
    const std::vector<Conflict>& inherent_conflicts() const { return inherent_conflicts_; }

    ValueState value_state(const std::string& value_id) const;
    VariantStatus variant_status(const std::string& variant_id) const;

    /// Settled = Excluded, or Included with no Pending value left.
    bool settled(std::size_t variant_index) const;

    /// Records a decision for `variant` (replacing an earlier one) and
    /// propagates. Throws RefNotInModel, ArityViolation or MandatoryExclusion
    /// for malformed answers; clashes come back as outcome conflicts.
    PropagationOutcome answer(const std::string& variant, const std::vector<std::string>& values);

    /// Throws Error(NoSuchAnswer) when `variant` has no logged decision.
    PropagationOutcome retract(const std::string& variant);

    std::vector<PendingDecision> pending_decisions() const;
    ConfigurationStatus current_configuration() const;

private:
    std::size_t variant_index(const std::string& variant_id) const;

    VariabilityModel scope_;
    std::string area_;
    DecisionTable table_;
    std::vector<LogEntry> log_;
    SessionState state_;
    std::vector<Conflict> inherent_conflicts_;
};

ConfigurationSession new_session(const VariabilityModel& model, const std::string& area);

} // namespace varkit

#endif // VARKIT_SESSION_HPP
