#include "varkit/error.hpp"

namespace varkit {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::MissingAttribute: return "MISSING_ATTRIBUTE";
    case ErrorCode::UnknownElement: return "UNKNOWN_ELEMENT";
    case ErrorCode::DuplicateAnswer: return "DUPLICATE_ANSWER";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::UnknownArea: return "UNKNOWN_AREA";
    case ErrorCode::RefNotInModel: return "REF_NOT_IN_MODEL";
    case ErrorCode::NarrowToEmpty: return "NARROW_TO_EMPTY";
    case ErrorCode::ScopeTooLarge: return "SCOPE_TOO_LARGE";
    case ErrorCode::ArityViolation: return "ARITY_VIOLATION";
    case ErrorCode::MandatoryExclusion: return "MANDATORY_EXCLUSION";
    case ErrorCode::NoSuchAnswer: return "NO_SUCH_ANSWER";
    case ErrorCode::DuplicateElementId: return "DUPLICATE_ELEMENT_ID";
    case ErrorCode::DanglingEdge: return "DANGLING_EDGE";
    case ErrorCode::UnresolvedTag: return "UNRESOLVED_TAG";
    case ErrorCode::IncompleteConfiguration: return "INCOMPLETE_CONFIGURATION";
    }
    return "UNKNOWN";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, SourceLocation where)
{
    std::string out(to_string(code));
    if (where.line > 0)
        out += " at " + std::to_string(where.line) + ":" + std::to_string(where.column);
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(ErrorCode code, const std::string& message, SourceLocation where)
    : std::runtime_error(format_message(code, message, where)), code_(code), where_(where)
{
}

} // namespace varkit
