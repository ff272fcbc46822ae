// Minimal non-validating XML reader/writer for the interchange documents.
// Supports elements, attributes, character/entity references, comments and
// processing instructions. Character data must be whitespace: none of the
// schemas carry text content.
#ifndef VARKIT_SRC_XML_HPP
#define VARKIT_SRC_XML_HPP

#include "varkit/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace varkit::xml {

struct Attribute {
    std::string name;
    std::string value;
    SourceLocation where;
};

struct Element {
    std::string name;
    std::vector<Attribute> attributes;
    std::vector<Element> children;
    SourceLocation where;

    const Attribute* attribute(std::string_view key) const;
};

/// Throws Error(ParseError) with the offending line/column.
Element parse_document(std::string_view text);

std::string escape_attribute(std::string_view value);

/// Builds an element line such as `<value id="V1.1" name="Single"/>`.
class Tag {
public:
    explicit Tag(std::string_view name);
    Tag& attr(std::string_view key, std::string_view value);

    std::string empty() const;  // <name .../>
    std::string open() const;   // <name ...>
    std::string close() const;  // </name>

private:
    std::string name_;
    std::string attrs_;
};

inline constexpr std::string_view kDeclaration = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

} // namespace varkit::xml

#endif // VARKIT_SRC_XML_HPP
