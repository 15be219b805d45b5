#include <pbforge/errors.hh>
#include <pbforge/opb.hh>
#include <pbforge/proof_ast.hh>

#include <limits>
#include <sstream>

using std::optional;
using std::size_t;
using std::string;
using std::string_view;
using std::vector;

namespace pbforge
{
    auto Pbc::operator==(const Pbc & other) const -> bool
    {
        return target == other.target && subproof == other.subproof;
    }

    auto ProofGoal::operator==(const ProofGoal & other) const -> bool
    {
        return goal == other.goal && steps == other.steps;
    }

    namespace
    {
        constexpr size_t max_nesting_depth = 256;

        auto is_comment(const vector<Token> & tokens) -> bool
        {
            return ! tokens.empty() && tokens.front().text.starts_with("*");
        }

        auto parse_id(const Token & token, string_view what) -> ConstraintId
        {
            auto value = parse_integer(token, what);
            if (value < 1 || value > std::numeric_limits<ConstraintId>::max())
                throw ParseError{string{what} + " must be a positive integer, got '" + token.text + "'", token.line, token.column};
            return static_cast<ConstraintId>(value);
        }

        auto parse_count(const Token & token) -> size_t
        {
            auto value = parse_integer(token, "a constraint count");
            if (value < 0 || value > std::numeric_limits<size_t>::max())
                throw ParseError{"invalid constraint count '" + token.text + "'", token.line, token.column};
            return static_cast<size_t>(value);
        }

        /// Cursor over the tokens of one line.
        struct LineCursor
        {
            const TokenLine & line;
            size_t pos = 0;

            [[nodiscard]] auto at_end() const -> bool { return pos >= line.tokens.size(); }
            [[nodiscard]] auto peek() const -> const Token * { return at_end() ? nullptr : &line.tokens[pos]; }
            auto take() -> const Token &
            {
                if (at_end())
                    throw ParseError{"unexpected end of line", line.line, end_column()};
                return line.tokens[pos++];
            }
            [[nodiscard]] auto end_column() const -> size_t
            {
                if (line.tokens.empty())
                    return 0;
                const auto & last = line.tokens.back();
                return last.column + last.text.size();
            }
            auto skip_optional_semicolon() -> void
            {
                if (auto t = peek(); t && t->text == ";")
                    ++pos;
            }
            auto expect_end() -> void
            {
                if (auto t = peek())
                    throw ParseError{"unexpected token '" + t->text + "'", t->line, t->column};
            }
        };

        /// OPB term syntax up to and including the terminating ';'. Only ">=" is allowed.
        auto parse_constraint(LineCursor & cursor) -> Constraint
        {
            vector<std::pair<Integer, Literal>> terms;
            while (true) {
                const auto & t = cursor.take();
                if (t.text == ">=")
                    break;
                if (t.text == ";" || t.text == "=" || t.text == "<=")
                    throw ParseError{"expected '>=' in constraint, got '" + t.text + "'", t.line, t.column};
                if (looks_like_literal(t.text))
                    throw ParseError{"literal '" + t.text + "' without a coefficient", t.line, t.column};
                auto coeff = parse_integer(t, "a coefficient or '>='");
                terms.emplace_back(std::move(coeff), parse_literal(cursor.take()));
            }
            auto degree = parse_integer(cursor.take(), "an integer degree");
            const auto & semi = cursor.take();
            if (semi.text != ";")
                throw ParseError{"expected ';' after constraint, got '" + semi.text + "'", semi.line, semi.column};
            return make_geq(terms, degree);
        }

        auto parse_literal_list(LineCursor & cursor) -> vector<Literal>
        {
            vector<Literal> result;
            while (auto t = cursor.peek()) {
                if (t->text == ";") {
                    ++cursor.pos;
                    cursor.expect_end();
                    break;
                }
                result.push_back(parse_literal(cursor.take()));
            }
            return result;
        }

        auto parse_pol(LineCursor & cursor) -> Pol
        {
            Pol pol;
            const auto & tokens = cursor.line.tokens;
            while (! cursor.at_end()) {
                const auto & t = cursor.take();
                if (t.text == ";") {
                    cursor.expect_end();
                    break;
                }
                auto next_is = [&](string_view op) { return cursor.pos < tokens.size() && tokens[cursor.pos].text == op; };

                if (t.text == "+")
                    pol.rpn.emplace_back(RpnAdd{});
                else if (t.text == "s")
                    pol.rpn.emplace_back(RpnSaturate{});
                else if (t.text == "*" || t.text == "d" || t.text == "w")
                    throw ParseError{"operator '" + t.text + "' without its operand", t.line, t.column};
                else if (looks_like_literal(t.text)) {
                    auto lit = parse_literal(t);
                    if (next_is("w")) {
                        if (lit.is_negative())
                            throw ParseError{"weakening takes a variable, not '" + t.text + "'", t.line, t.column};
                        ++cursor.pos;
                        pol.rpn.emplace_back(RpnWeaken{lit.var()});
                    }
                    else
                        pol.rpn.emplace_back(lit);
                }
                else if (next_is("*") || next_is("d")) {
                    auto k = parse_integer(t, "a scalar");
                    if (k < 1)
                        throw ParseError{"scalar must be positive, got '" + t.text + "'", t.line, t.column};
                    if (tokens[cursor.pos].text == "*")
                        pol.rpn.emplace_back(RpnMultiply{std::move(k)});
                    else
                        pol.rpn.emplace_back(RpnDivide{std::move(k)});
                    ++cursor.pos;
                }
                else
                    pol.rpn.emplace_back(RpnId{parse_id(t, "constraint id")});
            }
            if (pol.rpn.empty())
                throw ParseError{"empty pol expression", cursor.line.line, cursor.end_column()};
            return pol;
        }

        auto parse_witness(LineCursor & cursor) -> Substitution
        {
            Substitution witness;
            while (auto t = cursor.peek()) {
                if (t->text == ";" || t->text == "begin")
                    break;
                const auto & from = cursor.take();
                auto lit = parse_literal(from);
                if (lit.is_negative())
                    throw ParseError{"witness maps variables, not '" + from.text + "'", from.line, from.column};
                if (auto arrow = cursor.peek(); arrow && arrow->text == "->")
                    ++cursor.pos;
                const auto & to = cursor.take();
                Substitution::Image image = false;
                if (to.text == "0" || to.text == "false")
                    image = false;
                else if (to.text == "1" || to.text == "true")
                    image = true;
                else
                    image = parse_literal(to);
                if (! witness.insert(lit.var(), image))
                    throw ParseError{"variable '" + from.text + "' mapped twice in witness", from.line, from.column};
            }
            return witness;
        }

        auto is_block_end(const TokenLine & line) -> bool
        {
            return line.tokens.size() == 1 && (line.tokens[0].text == "end" || line.tokens[0].text == "qed");
        }
    }

    auto tokenize(string_view text) -> vector<TokenLine>
    {
        vector<TokenLine> result;
        size_t line_number = 0;
        size_t pos = 0;
        while (pos < text.size()) {
            auto end = text.find('\n', pos);
            if (end == string_view::npos)
                end = text.size();
            ++line_number;
            auto tokens = split_words(text.substr(pos, end - pos), line_number);
            pos = end + 1;
            if (tokens.empty() || is_comment(tokens))
                continue;
            result.push_back(TokenLine{line_number, std::move(tokens)});
        }
        return result;
    }

    struct ProofReader::Imp
    {
        std::unique_ptr<std::istringstream> owned;
        std::istream & in;
        size_t line_number = 0;
        bool header_read = false;
        bool finished = false;
        string version;
        string buffer;

        explicit Imp(std::istream & i) : in(i) {}
        explicit Imp(std::unique_ptr<std::istringstream> o) : owned(std::move(o)), in(*owned) {}

        /// Next non-blank, non-comment line, or nullopt at end of input.
        auto next_line() -> optional<TokenLine>
        {
            while (std::getline(in, buffer)) {
                ++line_number;
                auto tokens = split_words(buffer, line_number);
                if (tokens.empty() || is_comment(tokens))
                    continue;
                return TokenLine{line_number, std::move(tokens)};
            }
            return std::nullopt;
        }

        auto require_line(string_view context) -> TokenLine
        {
            auto line = next_line();
            if (! line)
                throw ParseError{"unexpected end of input inside " + string{context}, line_number + 1};
            return std::move(*line);
        }

        auto read_header() -> void
        {
            if (header_read)
                return;
            header_read = true;
            auto line = next_line();
            if (! line)
                throw ParseError{"empty proof (missing 'pseudo-Boolean proof version' header)", line_number + 1};
            const auto & t = line->tokens;
            if (t.size() != 4 || t[0].text != "pseudo-Boolean" || t[1].text != "proof" || t[2].text != "version")
                throw ParseError{"expected 'pseudo-Boolean proof version 3.0' header", line->line, 1};
            if (t[3].text != "3.0")
                throw ParseError{"unsupported proof version '" + t[3].text + "' (only kernel format 3.0 is accepted)", line->line, t[3].column};
            version = t[3].text;
        }

        auto parse_block(string_view context, size_t depth) -> Subproof
        {
            if (depth > max_nesting_depth)
                throw ParseError{"subproofs nested too deeply", line_number};
            Subproof steps;
            while (true) {
                auto line = require_line(context);
                if (is_block_end(line))
                    return steps;
                steps.push_back(parse_step(line, depth));
            }
        }

        auto parse_red_goals(size_t depth) -> vector<ProofGoal>
        {
            vector<ProofGoal> goals;
            while (true) {
                auto line = require_line("red/dom block");
                if (is_block_end(line))
                    return goals;
                LineCursor cursor{line};
                const auto & keyword = cursor.take();
                if (keyword.text != "goal" && keyword.text != "proofgoal")
                    throw ParseError{"expected 'goal' or 'end' inside red/dom block, got '" + keyword.text + "'", keyword.line, keyword.column};
                const auto & which = cursor.take();
                ProofGoal goal;
                goal.line = line.line;
                if (which.text == "#new" || which.text == "#1")
                    goal.goal = NewConstraintGoal{};
                else
                    goal.goal = parse_id(which, "goal id");
                cursor.expect_end();
                goal.steps = parse_block("proof goal", depth + 1);
                goals.push_back(std::move(goal));
            }
        }

        auto parse_step(const TokenLine & line, size_t depth) -> ProofStep
        {
            LineCursor cursor{line};
            const auto & keyword = cursor.take();
            const string & k = keyword.text;
            ProofStep step;
            step.line = line.line;

            if (k == "f") {
                LoadFormula load;
                if (auto t = cursor.peek(); t && t->text != ";")
                    load.count = parse_count(cursor.take());
                cursor.skip_optional_semicolon();
                cursor.expect_end();
                step.rule = load;
            }
            else if (k == "pol" || k == "p") {
                step.rule = parse_pol(cursor);
            }
            else if (k == "rup" || k == "u") {
                Rup rup;
                rup.target = parse_constraint(cursor);
                while (cursor.peek()) {
                    rup.hinted = true;
                    const auto & h = cursor.take();
                    if (h.text == "~")
                        continue;
                    if (h.text == ";") {
                        cursor.expect_end();
                        break;
                    }
                    rup.hints.push_back(parse_id(h, "hint id"));
                }
                step.rule = std::move(rup);
            }
            else if (k == "pbc") {
                Pbc pbc;
                pbc.target = parse_constraint(cursor);
                const auto & begin = cursor.take();
                if (begin.text != "begin")
                    throw ParseError{"expected 'begin' after pbc constraint, got '" + begin.text + "'", begin.line, begin.column};
                cursor.expect_end();
                pbc.subproof = parse_block("pbc subproof", depth + 1);
                step.rule = std::move(pbc);
            }
            else if (k == "red" || k == "dom") {
                Red red;
                red.dominance = k == "dom";
                red.target = parse_constraint(cursor);
                red.witness = parse_witness(cursor);
                cursor.skip_optional_semicolon();
                bool has_block = false;
                if (auto t = cursor.peek(); t && t->text == "begin") {
                    ++cursor.pos;
                    has_block = true;
                }
                cursor.expect_end();
                if (has_block)
                    red.goals = parse_red_goals(depth + 1);
                if (red.witness.empty() && ! red.goals.empty())
                    throw ParseError{"proof goals given for an empty witness", line.line};
                step.rule = std::move(red);
            }
            else if (k == "del") {
                const auto & mode = cursor.take();
                if (mode.text != "id")
                    throw ParseError{"unsupported deletion mode '" + mode.text + "' (only 'del id' is supported)", mode.line, mode.column};
                Del del;
                while (auto t = cursor.peek()) {
                    if (t->text == ";") {
                        ++cursor.pos;
                        cursor.expect_end();
                        break;
                    }
                    del.ids.push_back(parse_id(cursor.take(), "constraint id"));
                }
                if (del.ids.empty())
                    throw ParseError{"del without ids", line.line, keyword.column};
                step.rule = std::move(del);
            }
            else if (k == "weaken") {
                WeakenStep w;
                w.id = parse_id(cursor.take(), "constraint id");
                const auto & var = cursor.take();
                auto lit = parse_literal(var);
                if (lit.is_negative())
                    throw ParseError{"weaken takes a variable, not '" + var.text + "'", var.line, var.column};
                w.var = lit.var();
                cursor.skip_optional_semicolon();
                cursor.expect_end();
                step.rule = w;
            }
            else if (k == "sol" || k == "soli") {
                step.rule = Sol{parse_literal_list(cursor), k == "soli"};
            }
            else if (k == "output") {
                const auto & what = cursor.take();
                if (what.text != "NONE")
                    throw ParseError{"unsupported output type '" + what.text + "'", what.line, what.column};
                cursor.skip_optional_semicolon();
                cursor.expect_end();
                step.rule = Output{};
            }
            else if (k == "conclusion") {
                const auto & kind = cursor.take();
                Conclusion conclusion{};
                if (kind.text == "UNSAT") {
                    conclusion.kind = ConclusionKind::Unsat;
                    if (auto t = cursor.peek(); t && t->text == ":") {
                        ++cursor.pos;
                        conclusion.ref = parse_id(cursor.take(), "constraint id");
                    }
                    cursor.skip_optional_semicolon();
                    cursor.expect_end();
                }
                else if (kind.text == "SAT") {
                    conclusion.kind = ConclusionKind::Sat;
                    if (auto t = cursor.peek(); t && t->text == ":") {
                        ++cursor.pos;
                        conclusion.solution = parse_literal_list(cursor);
                    }
                    cursor.skip_optional_semicolon();
                    cursor.expect_end();
                }
                else if (kind.text == "BOUNDS") {
                    conclusion.kind = ConclusionKind::Bounds;
                    cursor.pos = line.tokens.size();
                }
                else
                    throw ParseError{"unsupported conclusion '" + kind.text + "'", kind.line, kind.column};
                step.rule = std::move(conclusion);
            }
            else if (k == "end" || k == "qed" || k == "begin")
                throw ParseError{"unbalanced '" + k + "'", keyword.line, keyword.column};
            else
                throw ParseError{"unsupported token '" + k + "'", keyword.line, keyword.column};

            return step;
        }

        auto next() -> optional<ProofStep>
        {
            read_header();
            if (finished)
                return std::nullopt;

            auto line = next_line();
            if (! line)
                throw ParseError{"missing 'end pseudo-Boolean proof' trailer", line_number + 1};

            const auto & t = line->tokens;
            if (t.size() == 3 && t[0].text == "end" && t[1].text == "pseudo-Boolean" && t[2].text == "proof") {
                finished = true;
                if (auto extra = next_line())
                    throw ParseError{"content after 'end pseudo-Boolean proof'", extra->line, 1};
                return std::nullopt;
            }
            return parse_step(*line, 0);
        }
    };

    ProofReader::ProofReader(std::istream & in) : _imp(std::make_unique<Imp>(in)) {}

    ProofReader::ProofReader(string text) : _imp(std::make_unique<Imp>(std::make_unique<std::istringstream>(std::move(text)))) {}

    ProofReader::~ProofReader() = default;

    auto ProofReader::version() -> const string &
    {
        _imp->read_header();
        return _imp->version;
    }

    auto ProofReader::next() -> optional<ProofStep>
    {
        return _imp->next();
    }

    auto ProofReader::current_line() const -> size_t
    {
        return _imp->line_number;
    }

    auto parse_proof(string_view text) -> Proof
    {
        ProofReader reader{string{text}};
        Proof proof;
        proof.version = reader.version();
        while (auto step = reader.next())
            proof.steps.push_back(std::move(*step));
        return proof;
    }

    namespace
    {
        auto serialize_rpn(const RpnToken & token) -> string
        {
            return std::visit(
                [](const auto & t) -> string {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, RpnId>)
                        return std::to_string(t.id);
                    else if constexpr (std::is_same_v<T, Literal>)
                        return to_string(t);
                    else if constexpr (std::is_same_v<T, RpnAdd>)
                        return "+";
                    else if constexpr (std::is_same_v<T, RpnMultiply>)
                        return to_string(t.factor) + " *";
                    else if constexpr (std::is_same_v<T, RpnDivide>)
                        return to_string(t.divisor) + " d";
                    else if constexpr (std::is_same_v<T, RpnSaturate>)
                        return "s";
                    else
                        return "x" + std::to_string(t.var) + " w";
                },
                token);
        }

        auto serialize_literals(const vector<Literal> & literals) -> string
        {
            string result;
            for (const auto & l : literals)
                result += " " + to_string(l);
            return result;
        }

        auto serialize_image(const Substitution::Image & image) -> string
        {
            if (const auto * lit = std::get_if<Literal>(&image))
                return to_string(*lit);
            return std::get<bool>(image) ? "1" : "0";
        }

        auto serialize_into(const ProofStep & step, string & out) -> void;

        auto serialize_block(const Subproof & steps, string & out) -> void
        {
            for (const auto & s : steps)
                serialize_into(s, out);
            out += "end\n";
        }

        auto serialize_into(const ProofStep & step, string & out) -> void
        {
            std::visit(
                [&](const auto & r) {
                    using T = std::decay_t<decltype(r)>;
                    if constexpr (std::is_same_v<T, LoadFormula>) {
                        out += "f";
                        if (r.count)
                            out += " " + std::to_string(*r.count);
                        out += "\n";
                    }
                    else if constexpr (std::is_same_v<T, Pol>) {
                        out += "pol";
                        for (const auto & t : r.rpn)
                            out += " " + serialize_rpn(t);
                        out += "\n";
                    }
                    else if constexpr (std::is_same_v<T, Rup>) {
                        out += "rup " + to_string(r.target);
                        if (r.hinted && r.hints.empty())
                            out += " ~";
                        for (auto h : r.hints)
                            out += " " + std::to_string(h);
                        out += "\n";
                    }
                    else if constexpr (std::is_same_v<T, Pbc>) {
                        out += "pbc " + to_string(r.target) + " begin\n";
                        serialize_block(r.subproof, out);
                    }
                    else if constexpr (std::is_same_v<T, Red>) {
                        out += (r.dominance ? "dom " : "red ") + to_string(r.target);
                        for (const auto & [var, image] : r.witness.mapping())
                            out += " x" + std::to_string(var) + " -> " + serialize_image(image);
                        out += " ;";
                        if (! r.goals.empty()) {
                            out += " begin\n";
                            for (const auto & g : r.goals) {
                                out += "goal ";
                                if (const auto * id = std::get_if<ConstraintId>(&g.goal))
                                    out += std::to_string(*id);
                                else
                                    out += "#new";
                                out += "\n";
                                serialize_block(g.steps, out);
                            }
                            out += "end";
                        }
                        out += "\n";
                    }
                    else if constexpr (std::is_same_v<T, Del>) {
                        out += "del id";
                        for (auto id : r.ids)
                            out += " " + std::to_string(id);
                        out += "\n";
                    }
                    else if constexpr (std::is_same_v<T, WeakenStep>) {
                        out += "weaken " + std::to_string(r.id) + " x" + std::to_string(r.var) + "\n";
                    }
                    else if constexpr (std::is_same_v<T, Sol>) {
                        out += (r.implied ? "soli" : "sol") + serialize_literals(r.literals) + "\n";
                    }
                    else if constexpr (std::is_same_v<T, Conclusion>) {
                        switch (r.kind) {
                        case ConclusionKind::Unsat:
                            out += "conclusion UNSAT";
                            if (r.ref)
                                out += " : " + std::to_string(*r.ref);
                            break;
                        case ConclusionKind::Sat:
                            out += "conclusion SAT";
                            if (r.solution)
                                out += " :" + serialize_literals(*r.solution);
                            break;
                        case ConclusionKind::Bounds:
                            out += "conclusion BOUNDS";
                            break;
                        }
                        out += "\n";
                    }
                    else {
                        out += "output NONE\n";
                    }
                },
                step.rule);
        }
    }

    auto serialize_step(const ProofStep & step) -> string
    {
        string out;
        serialize_into(step, out);
        return out;
    }

    auto serialize_proof(const Proof & proof) -> string
    {
        string out = "pseudo-Boolean proof version " + (proof.version.empty() ? string{"3.0"} : proof.version) + "\n";
        for (const auto & s : proof.steps)
            serialize_into(s, out);
        out += "end pseudo-Boolean proof\n";
        return out;
    }

    auto rule_name(const Rule & rule) -> string_view
    {
        return std::visit(
            [](const auto & r) -> string_view {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, LoadFormula>)
                    return "f";
                else if constexpr (std::is_same_v<T, Pol>)
                    return "pol";
                else if constexpr (std::is_same_v<T, Rup>)
                    return "rup";
                else if constexpr (std::is_same_v<T, Pbc>)
                    return "pbc";
                else if constexpr (std::is_same_v<T, Red>)
                    return r.dominance ? "dom" : "red";
                else if constexpr (std::is_same_v<T, Del>)
                    return "del";
                else if constexpr (std::is_same_v<T, WeakenStep>)
                    return "weaken";
                else if constexpr (std::is_same_v<T, Sol>)
                    return r.implied ? "soli" : "sol";
                else if constexpr (std::is_same_v<T, Conclusion>)
                    return "conclusion";
                else
                    return "output";
            },
            rule);
    }
}
