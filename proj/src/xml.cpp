#include "xml.hpp"

#include <cctype>
#include <cstdint>

namespace varkit::xml {

const Attribute* Element::attribute(std::string_view key) const
{
    for (const auto& attr : attributes)
        if (attr.name == key)
            return &attr;
    return nullptr;
}

namespace {

bool is_name_start(char c)
{
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c)
{
    auto u = static_cast<unsigned char>(c);
    return is_name_start(c) || std::isdigit(u) || c == '-' || c == '.';
}

void append_utf8(std::string& out, std::uint32_t cp)
{
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text)
    {
        if (text_.substr(0, 3) == "\xEF\xBB\xBF")
            pos_ = 3;
    }

    Element document()
    {
        skip_misc();
        if (at_end() || peek() != '<')
            fail("expected root element");
        Element root = element();
        skip_misc();
        if (!at_end())
            fail("unexpected content after root element");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const
    {
        throw Error(ErrorCode::ParseError, message, here());
    }

    [[noreturn]] void fail_at(SourceLocation where, const std::string& message) const
    {
        throw Error(ErrorCode::ParseError, message, where);
    }

    SourceLocation here() const { return {line_, column_}; }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    bool starts_with(std::string_view token) const { return text_.substr(pos_, token.size()) == token; }

    void advance(std::size_t count = 1)
    {
        for (std::size_t i = 0; i < count && pos_ < text_.size(); ++i, ++pos_) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    void expect(std::string_view token)
    {
        if (!starts_with(token))
            fail("expected '" + std::string(token) + "'");
        advance(token.size());
    }

    void skip_space()
    {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
            advance();
    }

    void skip_until(std::string_view terminator, const char* what)
    {
        auto end = text_.find(terminator, pos_);
        if (end == std::string_view::npos)
            fail(std::string("unterminated ") + what);
        advance(end + terminator.size() - pos_);
    }

    // Whitespace, comments and processing instructions.
    void skip_misc()
    {
        for (;;) {
            skip_space();
            if (starts_with("<?"))
                skip_until("?>", "processing instruction");
            else if (starts_with("<!--"))
                skip_until("-->", "comment");
            else if (starts_with("<!"))
                fail("document type declarations and CDATA are not supported");
            else
                return;
        }
    }

    std::string name()
    {
        if (!is_name_start(peek()))
            fail("expected a name");
        std::size_t start = pos_;
        while (!at_end() && is_name_char(peek()))
            advance();
        return std::string(text_.substr(start, pos_ - start));
    }

    void reference(std::string& out)
    {
        expect("&");
        auto end = text_.find(';', pos_);
        if (end == std::string_view::npos || end - pos_ > 10)
            fail("malformed character reference");
        std::string_view body = text_.substr(pos_, end - pos_);
        if (body == "lt")
            out += '<';
        else if (body == "gt")
            out += '>';
        else if (body == "amp")
            out += '&';
        else if (body == "quot")
            out += '"';
        else if (body == "apos")
            out += '\'';
        else if (body.size() > 1 && body[0] == '#') {
            bool hex = body[1] == 'x';
            std::string_view digits = body.substr(hex ? 2 : 1);
            if (digits.empty())
                fail("malformed character reference");
            std::uint32_t cp = 0;
            for (char c : digits) {
                auto u = static_cast<unsigned char>(c);
                if (hex ? !std::isxdigit(u) : !std::isdigit(u))
                    fail("malformed character reference");
                cp = cp * (hex ? 16 : 10) +
                     static_cast<std::uint32_t>(std::isdigit(u) ? c - '0' : std::tolower(u) - 'a' + 10);
                if (cp > 0x10FFFF)
                    fail("character reference out of range");
            }
            append_utf8(out, cp);
        } else {
            fail("unknown entity '&" + std::string(body) + ";'");
        }
        advance(end + 1 - pos_);
    }

    std::string attribute_value()
    {
        char quote = peek();
        if (quote != '"' && quote != '\'')
            fail("expected quoted attribute value");
        advance();
        std::string value;
        for (;;) {
            if (at_end())
                fail("unterminated attribute value");
            char c = peek();
            if (c == quote) {
                advance();
                return value;
            }
            if (c == '<')
                fail("'<' not allowed in attribute value");
            if (c == '&') {
                reference(value);
                continue;
            }
            // Literal whitespace is normalized to a space, as XML mandates.
            value += (c == '\n' || c == '\t' || c == '\r') ? ' ' : c;
            advance();
        }
    }

    Element element()
    {
        Element el;
        el.where = here();
        expect("<");
        el.name = name();
        for (;;) {
            bool spaced = !at_end() && std::isspace(static_cast<unsigned char>(peek()));
            skip_space();
            if (starts_with("/>")) {
                advance(2);
                return el;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            if (!spaced)
                fail("expected whitespace before attribute");
            Attribute attr;
            attr.where = here();
            attr.name = name();
            skip_space();
            expect("=");
            skip_space();
            attr.value = attribute_value();
            if (el.attribute(attr.name) != nullptr) {
                fail_at(attr.where, "duplicate attribute '" + attr.name + "'");
            }
            el.attributes.push_back(std::move(attr));
        }
        for (;;) {
            skip_space();
            if (at_end())
                fail("unterminated element <" + el.name + ">");
            if (starts_with("</")) {
                const SourceLocation tag_start = here();
                advance(2);
                auto closing = name();
                if (closing != el.name)
                    fail_at(tag_start, "mismatched closing tag </" + closing + "> for <" + el.name + ">");
                skip_space();
                expect(">");
                return el;
            }
            if (starts_with("<!--")) {
                skip_until("-->", "comment");
            } else if (starts_with("<?")) {
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!")) {
                fail("CDATA sections are not supported");
            } else if (peek() == '<') {
                el.children.push_back(element());
            } else {
                fail("unexpected character data inside <" + el.name + ">");
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

} // namespace

Element parse_document(std::string_view text)
{
    return Reader(text).document();
}

std::string escape_attribute(std::string_view value)
{
    std::string out;
    out.reserve(value.size());
    for (char c : value) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out += c;
        }
    }
    return out;
}

Tag::Tag(std::string_view name) : name_(name) {}

Tag& Tag::attr(std::string_view key, std::string_view value)
{
    attrs_ += ' ';
    attrs_ += key;
    attrs_ += "=\"";
    attrs_ += escape_attribute(value);
    attrs_ += '"';
    return *this;
}

std::string Tag::empty() const { return "<" + name_ + attrs_ + "/>"; }
std::string Tag::open() const { return "<" + name_ + attrs_ + ">"; }
std::string Tag::close() const { return "</" + name_ + ">"; }

} // namespace varkit::xml
