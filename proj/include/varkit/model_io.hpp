#ifndef VARKIT_MODEL_IO_HPP
#define VARKIT_MODEL_IO_HPP

#include "varkit/core_model.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace varkit {

/// Reads a `.vml.xml` document. Only structural checks happen here
/// (well-formedness, known elements, required attributes); semantic
/// checks belong to validate_model.
///
/// Errors: ParseError (with line/column), MissingAttribute, UnknownElement.
VariabilityModel parse_model(std::string_view document);

/// Canonical form: two-space indentation, attributes in the order
/// id, name, relation, area, mandatory, question; elements in model order.
std::string write_model(const VariabilityModel& model);

struct AnswerEntry {
    std::string variant;
    std::vector<std::string> values;

    bool operator==(const AnswerEntry&) const = default;
};

/// Stakeholder requirements for one area: chosen values per variant plus
/// variants that must not appear.
struct AnswersDocument {
    std::string area;
    std::vector<AnswerEntry> answers;
    std::vector<std::string> exclusions;

    bool operator==(const AnswersDocument&) const = default;
};

/// Errors: ParseError (malformed JSON, unknown keys, foreign values),
/// DuplicateAnswer (a variant answered or excluded twice, or both).
AnswersDocument parse_answers(std::string_view document);
std::string write_answers(const AnswersDocument& answers);

/// Pipe-separated table with the columns
/// Variant | Values of variant | Relations | Applicable Area | Dependency.
std::string render_variant_table(const VariabilityModel& model);

/// Whole-file read; throws Error(NotFound) if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

} // namespace varkit

#endif // VARKIT_MODEL_IO_HPP
