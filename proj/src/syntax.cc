#include <pbforge/errors.hh>
#include <pbforge/syntax.hh>

#include <limits>

using std::string;
using std::string_view;
using std::vector;

namespace pbforge
{
    auto split_words(string_view line, std::size_t line_number) -> vector<Token>
    {
        if (! line.empty() && line.back() == '\r')
            line.remove_suffix(1);

        vector<Token> result;
        std::size_t pos = 0;
        auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
        while (pos < line.size()) {
            if (is_space(line[pos])) {
                ++pos;
                continue;
            }
            if (line[pos] == ';') {
                result.push_back(Token{";", line_number, pos + 1});
                ++pos;
                continue;
            }
            std::size_t start = pos;
            while (pos < line.size() && ! is_space(line[pos]) && line[pos] != ';')
                ++pos;
            result.push_back(Token{string{line.substr(start, pos - start)}, line_number, start + 1});
        }
        return result;
    }

    auto looks_like_literal(string_view text) -> bool
    {
        if (! text.empty() && text.front() == '~')
            text.remove_prefix(1);
        return ! text.empty() && text.front() == 'x';
    }

    auto parse_literal(const Token & token) -> Literal
    {
        string_view text = token.text;
        bool negative = false;
        if (! text.empty() && text.front() == '~') {
            negative = true;
            text.remove_prefix(1);
        }
        if (text.empty() || text.front() != 'x')
            throw ParseError{"expected a literal, got '" + token.text + "'", token.line, token.column};
        text.remove_prefix(1);
        if (text.empty())
            throw ParseError{"malformed literal '" + token.text + "'", token.line, token.column};

        std::uint64_t index = 0;
        for (char c : text) {
            if (c < '0' || c > '9')
                throw ParseError{"malformed literal '" + token.text + "'", token.line, token.column};
            index = index * 10 + static_cast<std::uint64_t>(c - '0');
            if (index > std::numeric_limits<Variable>::max() / 2)
                throw ParseError{"variable index too large in '" + token.text + "'", token.line, token.column};
        }
        if (index == 0)
            throw ParseError{"variable index 0 in '" + token.text + "' (indices start at 1)", token.line, token.column};

        auto var = static_cast<Variable>(index);
        return negative ? Literal::negative(var) : Literal::positive(var);
    }

    auto parse_integer(const Token & token, string_view what) -> Integer
    {
        auto value = parse_integer(string_view{token.text});
        if (! value)
            throw ParseError{"expected " + string{what} + ", got '" + token.text + "'", token.line, token.column};
        return *value;
    }
}
