#include <pbforge/errors.hh>
#include <pbforge/opb.hh>
#include <pbforge/syntax.hh>

#include <algorithm>
#include <fstream>
#include <sstream>

using std::pair;
using std::size_t;
using std::string;
using std::string_view;
using std::vector;

namespace pbforge
{
    auto Formula::num_variables() const -> size_t
    {
        size_t result = declared_vars;
        for (const auto & c : constraints)
            result = std::max<size_t>(result, max_variable(c));
        return result;
    }

    auto Formula::operator==(const Formula & other) const -> bool
    {
        return constraints == other.constraints && num_variables() == other.num_variables();
    }

    auto make_geq(const vector<pair<Integer, Literal>> & signed_terms, const Integer & degree) -> Constraint
    {
        Constraint result;
        result.degree = degree;
        result.terms.reserve(signed_terms.size());
        for (const auto & [coeff, lit] : signed_terms) {
            if (coeff < 0) {
                // -a l == a ~l - a
                result.terms.push_back(Term{-coeff, lit.complement()});
                result.degree -= coeff;
            }
            else
                result.terms.push_back(Term{coeff, lit});
        }
        return normalize(result);
    }

    namespace
    {
        auto parse_header(string_view line, Formula & formula) -> void
        {
            auto read_after = [&](string_view key) -> std::optional<size_t> {
                auto pos = line.find(key);
                if (pos == string_view::npos)
                    return std::nullopt;
                pos += key.size();
                while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
                    ++pos;
                size_t value = 0;
                bool any = false;
                while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
                    value = value * 10 + static_cast<size_t>(line[pos] - '0');
                    ++pos;
                    any = true;
                }
                return any ? std::optional<size_t>{value} : std::nullopt;
            };
            if (auto v = read_after("#variable="))
                formula.declared_vars = *v;
            if (auto v = read_after("#constraint="))
                formula.declared_constraints = *v;
        }

        enum class Relation
        {
            GreaterEqual,
            Equal,
            LessEqual
        };

        auto handle_statement(const vector<Token> & tokens, const Token & terminator, Formula & formula, size_t & statements) -> void
        {
            if (tokens.empty())
                throw ParseError{"empty constraint", terminator.line, terminator.column};

            if (tokens.front().text.starts_with("min:") || tokens.front().text.starts_with("max:")) {
                formula.warnings.push_back("line " + std::to_string(tokens.front().line) + ": objective ignored");
                return;
            }

            vector<pair<Integer, Literal>> terms;
            size_t i = 0;
            while (i < tokens.size()) {
                const auto & t = tokens[i];
                if (t.text == ">=" || t.text == "=" || t.text == "<=")
                    break;
                if (looks_like_literal(t.text))
                    throw ParseError{"literal '" + t.text + "' without a coefficient (nonlinear terms are unsupported)", t.line, t.column};
                auto coeff = parse_integer(t, "a coefficient or relation");
                if (i + 1 >= tokens.size())
                    throw ParseError{"coefficient without a literal", t.line, t.column};
                terms.emplace_back(std::move(coeff), parse_literal(tokens[i + 1]));
                i += 2;
            }
            if (i >= tokens.size())
                throw ParseError{"missing relation (>=, = or <=)", terminator.line, terminator.column};

            const auto & op = tokens[i];
            Relation relation = op.text == ">=" ? Relation::GreaterEqual : op.text == "=" ? Relation::Equal : Relation::LessEqual;
            if (i + 1 >= tokens.size())
                throw ParseError{"missing degree after '" + op.text + "'", op.line, op.column};
            auto degree = parse_integer(tokens[i + 1], "an integer degree");
            if (i + 2 != tokens.size())
                throw ParseError{"unexpected token '" + tokens[i + 2].text + "' before ';'", tokens[i + 2].line, tokens[i + 2].column};

            auto opposite = [&]() {
                vector<pair<Integer, Literal>> flipped;
                flipped.reserve(terms.size());
                for (const auto & [c, l] : terms)
                    flipped.emplace_back(-c, l);
                return make_geq(flipped, -degree);
            };

            switch (relation) {
            case Relation::GreaterEqual:
                formula.constraints.push_back(make_geq(terms, degree));
                break;
            case Relation::Equal:
                formula.constraints.push_back(make_geq(terms, degree));
                formula.constraints.push_back(opposite());
                break;
            case Relation::LessEqual:
                formula.constraints.push_back(opposite());
                break;
            }
            ++statements;
        }
    }

    auto parse_opb(string_view text, const OpbOptions & options) -> Formula
    {
        Formula formula;
        bool header_seen = false;
        size_t statements = 0;
        vector<Token> pending;

        size_t line_number = 0;
        size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == string_view::npos)
                end = text.size();
            string_view line = text.substr(pos, end - pos);
            ++line_number;
            pos = end + 1;

            auto first = line.find_first_not_of(" \t\r");
            if (first == string_view::npos)
                continue;
            if (line[first] == '*') {
                if (! header_seen && line.find("#variable=") != string_view::npos) {
                    parse_header(line, formula);
                    header_seen = true;
                }
                continue;
            }

            for (auto & token : split_words(line, line_number)) {
                if (token.text == ";") {
                    handle_statement(pending, token, formula, statements);
                    pending.clear();
                }
                else
                    pending.push_back(std::move(token));
            }
        }

        if (! pending.empty())
            throw ParseError{"missing terminating ';'", pending.back().line, pending.back().column};

        if (header_seen) {
            vector<string> problems;
            if (statements != formula.declared_constraints)
                problems.push_back("header declares " + std::to_string(formula.declared_constraints) + " constraints but " +
                    std::to_string(statements) + " were read");
            size_t used = 0;
            for (const auto & c : formula.constraints)
                used = std::max<size_t>(used, max_variable(c));
            if (used > formula.declared_vars)
                problems.push_back("header declares " + std::to_string(formula.declared_vars) + " variables but x" +
                    std::to_string(used) + " is used");
            for (auto & p : problems) {
                if (options.strict)
                    throw ParseError{p, 1};
                formula.warnings.push_back(std::move(p));
            }
        }

        return formula;
    }

    auto read_opb_file(const std::filesystem::path & path, const OpbOptions & options) -> Formula
    {
        std::ifstream in{path, std::ios::binary};
        if (! in)
            throw Error{"cannot open '" + path.string() + "'"};
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return parse_opb(buffer.str(), options);
    }

    auto serialize_opb(const Formula & formula) -> string
    {
        string result = "* #variable= " + std::to_string(formula.num_variables()) +
            " #constraint= " + std::to_string(formula.constraints.size()) + "\n";
        for (const auto & comment : formula.comments)
            result += "* " + comment + "\n";
        for (const auto & c : formula.constraints)
            result += to_string(c) + "\n";
        return result;
    }
}
