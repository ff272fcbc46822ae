#ifndef VARKIT_ERROR_HPP
#define VARKIT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace varkit {

enum class ErrorCode {
    ParseError,
    MissingAttribute,
    UnknownElement,
    DuplicateAnswer,
    NotFound,
    UnknownArea,
    RefNotInModel,
    NarrowToEmpty,
    ScopeTooLarge,
    ArityViolation,
    MandatoryExclusion,
    NoSuchAnswer,
    DuplicateElementId,
    DanglingEdge,
    UnresolvedTag,
    IncompleteConfiguration,
};

/// Upper-snake spelling used in reports, CLI output and wire bodies.
std::string_view to_string(ErrorCode code);

/// Position inside a source document; line 0 means "no position".
struct SourceLocation {
    int line = 0;
    int column = 0;
};

/// Every failure raised by the toolkit carries a stable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, SourceLocation where = {});

    ErrorCode code() const noexcept { return code_; }
    SourceLocation where() const noexcept { return where_; }

private:
    ErrorCode code_;
    SourceLocation where_;
};

} // namespace varkit

#endif // VARKIT_ERROR_HPP
