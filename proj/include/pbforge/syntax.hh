#ifndef PBFORGE_GUARD_PBFORGE_SYNTAX_HH
#define PBFORGE_GUARD_PBFORGE_SYNTAX_HH

#include <pbforge/pbcore.hh>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pbforge
{
    struct Token
    {
        std::string text;
        std::size_t line;
        std::size_t column;
    };

    /// Whitespace-separated words of one line; ';' is always a token of its own.
    /// A trailing '\r' is ignored.
    auto split_words(std::string_view line, std::size_t line_number) -> std::vector<Token>;

    /// True for "xN" and "~xN" shapes (N possibly invalid).
    [[nodiscard]] auto looks_like_literal(std::string_view text) -> bool;

    /// Throws ParseError for malformed literals and for variable index 0.
    auto parse_literal(const Token & token) -> Literal;

    /// Throws ParseError if the token is not an integer.
    auto parse_integer(const Token & token, std::string_view what) -> Integer;
}

#endif
