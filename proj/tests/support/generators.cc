#include "generators.hh"

#include <pbforge/checker.hh>
#include <pbforge/proof_ast.hh>

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

using std::size_t;
using std::string;
using std::vector;

namespace pbforge::testing
{
    using pbforge::to_string;

    namespace
    {
        auto uniform(Rng & rng, size_t lo, size_t hi) -> size_t
        {
            return std::uniform_int_distribution<size_t>{lo, hi}(rng);
        }

        auto coin(Rng & rng) -> bool
        {
            return std::bernoulli_distribution{0.5}(rng);
        }

        /// Distinct variables, random polarity.
        auto random_literals(Rng & rng, size_t vars, size_t count) -> vector<Literal>
        {
            vector<Variable> pool(vars);
            for (size_t i = 0; i < vars; ++i)
                pool[i] = static_cast<Variable>(i + 1);
            std::shuffle(pool.begin(), pool.end(), rng);
            vector<Literal> result;
            for (size_t i = 0; i < std::min(count, vars); ++i)
                result.push_back(coin(rng) ? Literal::positive(pool[i]) : Literal::negative(pool[i]));
            return result;
        }
    }

    auto random_literal(Rng & rng, size_t vars) -> Literal
    {
        auto v = static_cast<Variable>(uniform(rng, 1, vars));
        return coin(rng) ? Literal::positive(v) : Literal::negative(v);
    }

    auto random_constraint(Rng & rng, size_t vars, size_t max_terms, int max_coeff) -> Constraint
    {
        Constraint c;
        size_t terms = uniform(rng, 0, max_terms);
        Integer sum = 0;
        for (size_t i = 0; i < terms; ++i) {
            Integer a = static_cast<int>(uniform(rng, 0, static_cast<size_t>(max_coeff)));
            sum += a;
            c.terms.push_back(Term{a, random_literal(rng, vars)});
        }
        c.degree = static_cast<long>(uniform(rng, 0, static_cast<size_t>(sum) + 2));
        return c;
    }

    auto random_valuation(Rng & rng, size_t vars) -> Valuation
    {
        Valuation v;
        for (size_t x = 1; x <= vars; ++x)
            v.set(static_cast<Variable>(x), coin(rng));
        return v;
    }

    auto valuation_from_bits(std::uint64_t bits, size_t vars) -> Valuation
    {
        Valuation v;
        for (size_t x = 1; x <= vars; ++x)
            v.set(static_cast<Variable>(x), (bits >> (x - 1)) & 1);
        return v;
    }

    auto random_formula(Rng & rng, size_t vars, size_t constraints) -> Formula
    {
        Formula f;
        for (size_t i = 0; i < constraints; ++i) {
            Constraint c;
            auto kind = uniform(rng, 0, 9);
            if (kind < 6) {
                for (auto l : random_literals(rng, vars, uniform(rng, 2, 3)))
                    c.terms.push_back(Term{1, l});
                c.degree = 1;
            }
            else if (kind < 8) {
                auto lits = random_literals(rng, vars, uniform(rng, 3, 4));
                for (auto l : lits)
                    c.terms.push_back(Term{1, l});
                c.degree = static_cast<long>(lits.size()) - 1;
            }
            else {
                Integer sum = 0;
                for (auto l : random_literals(rng, vars, uniform(rng, 2, 4))) {
                    Integer a = static_cast<int>(uniform(rng, 1, 5));
                    sum += a;
                    c.terms.push_back(Term{a, l});
                }
                c.degree = static_cast<long>(uniform(rng, 1, static_cast<size_t>(sum)));
            }
            f.constraints.push_back(normalize(c));
        }
        f.declared_vars = vars;
        f.declared_constraints = f.constraints.size();
        return f;
    }

    namespace
    {
        class DpllWriter
        {
        public:
            DpllWriter(const Formula & formula, Rng * rng) :
                _formula(formula),
                _rng(rng),
                _vars(formula.num_variables()),
                _next_id(formula.constraints.size() + 1)
            {
                for (size_t i = 0; i < formula.constraints.size(); ++i)
                    _view.push_back(IdConstraint{i + 1, &formula.constraints[i]});
            }

            auto run() -> GeneratedProof
            {
                _out << "pseudo-Boolean proof version 3.0\n";
                emit("f " + std::to_string(_formula.constraints.size()) + " ;");
                auto result = solve({});
                GeneratedProof proof;
                if (auto * id = std::get_if<ConstraintId>(&result)) {
                    emit("conclusion UNSAT : " + std::to_string(*id) + " ;");
                    proof.unsat = true;
                }
                else {
                    string lits;
                    for (const auto & l : std::get<vector<Literal>>(result))
                        lits += " " + to_string(l);
                    emit("sol" + lits + " ;");
                    emit("conclusion SAT ;");
                }
                _out << "end pseudo-Boolean proof\n";
                proof.text = _out.str();
                proof.steps = _steps;
                return proof;
            }

        private:
            using Outcome = std::variant<ConstraintId, vector<Literal>>;

            auto emit(const string & line) -> void
            {
                _out << line << "\n";
                ++_steps;
            }

            auto learned_clause(const vector<Literal> & decisions) -> Constraint
            {
                Constraint c;
                for (auto d : decisions)
                    c.terms.push_back(Term{1, d.complement()});
                c.degree = 1;
                return c;
            }

            auto solve(const vector<Literal> & decisions) -> Outcome
            {
                PartialAssignment rho;
                for (auto d : decisions)
                    rho.assign(d);
                auto conflict = propagate_in_place(_view, rho);
                if (conflict) {
                    // Only the antecedents that the conflict actually depends on.
                    const auto & trail = rho.trail();
                    std::set<ConstraintId> marked{*conflict};
                    vector<bool> used(trail.size(), false);
                    for (size_t i = trail.size(); i-- > 0;) {
                        if (! trail[i].reason || marked.contains(*trail[i].reason))
                            continue;
                        auto falsified = trail[i].literal.complement();
                        for (auto id : marked) {
                            const auto & terms = _formula.constraints[id - 1].terms;
                            if (std::any_of(terms.begin(), terms.end(), [&](const Term & t) { return t.literal == falsified; })) {
                                marked.insert(*trail[i].reason);
                                used[i] = true;
                                break;
                            }
                        }
                    }
                    string hints;
                    for (size_t i = 0; i < trail.size(); ++i)
                        if (used[i])
                            hints += " " + std::to_string(*trail[i].reason);
                    hints += " " + std::to_string(*conflict);
                    emit("rup " + to_string(learned_clause(decisions)) + hints);
                    return _next_id++;
                }

                vector<Variable> open;
                for (Variable x = 1; x <= _vars; ++x)
                    if (! rho.value(x))
                        open.push_back(x);
                if (open.empty()) {
                    vector<Literal> model;
                    for (Variable x = 1; x <= _vars; ++x)
                        model.push_back(*rho.value(x) ? Literal::positive(x) : Literal::negative(x));
                    return model;
                }

                Variable x = _rng ? open[uniform(*_rng, 0, open.size() - 1)] : open.front();
                Literal first = _rng && coin(*_rng) ? Literal::positive(x) : Literal::negative(x);

                auto extend = [&](Literal l) {
                    auto next = decisions;
                    next.push_back(l);
                    return next;
                };
                auto left = solve(extend(first));
                if (std::holds_alternative<vector<Literal>>(left))
                    return left;
                auto right = solve(extend(first.complement()));
                if (std::holds_alternative<vector<Literal>>(right))
                    return right;

                auto a = std::get<ConstraintId>(left), b = std::get<ConstraintId>(right);
                emit("pol " + std::to_string(a) + " " + std::to_string(b) + " + s ;");
                auto merged = _next_id++;
                emit("del id " + std::to_string(a) + " " + std::to_string(b) + " ;");
                return merged;
            }

            const Formula & _formula;
            Rng * _rng;
            Variable _vars;
            ConstraintId _next_id;
            vector<IdConstraint> _view;
            std::ostringstream _out;
            size_t _steps = 0;
        };
    }

    auto dpll_proof(const Formula & formula, Rng * rng) -> GeneratedProof
    {
        return DpllWriter{formula, rng}.run();
    }

    auto random_pol_proof(Rng & rng, const Formula & formula, size_t steps) -> string
    {
        std::ostringstream out;
        out << "pseudo-Boolean proof version 3.0\n";
        out << "f " << formula.constraints.size() << " ;\n";
        size_t vars = std::max<size_t>(1, formula.num_variables());
        vector<ConstraintId> live;
        std::map<ConstraintId, Constraint> clauses;
        for (size_t i = 0; i < formula.constraints.size(); ++i) {
            live.push_back(i + 1);
            const auto & c = formula.constraints[i];
            if (c.degree == 1 && std::all_of(c.terms.begin(), c.terms.end(), [](const Term & t) { return t.coefficient == 1; }))
                clauses.emplace(i + 1, c);
        }
        ConstraintId next = formula.constraints.size() + 1;

        auto pick = [&] { return live[uniform(rng, 0, live.size() - 1)]; };
        for (size_t s = 0; s < steps && ! live.empty(); ++s) {
            auto kind = uniform(rng, 0, 9);
            if (kind < 7) {
                std::ostringstream expr;
                expr << pick();
                if (coin(rng))
                    expr << " " << uniform(rng, 1, 4) << " *";
                for (size_t operands = uniform(rng, 0, 2); operands > 0; --operands) {
                    if (uniform(rng, 0, 3) == 0)
                        expr << " " << to_string(random_literal(rng, vars));
                    else
                        expr << " " << pick();
                    expr << " +";
                }
                switch (uniform(rng, 0, 3)) {
                case 0: expr << " " << uniform(rng, 2, 3) << " d"; break;
                case 1: expr << " s"; break;
                case 2: expr << " x" << uniform(rng, 1, vars) << " w"; break;
                default: break;
                }
                out << "pol " << expr.str() << " ;\n";
                live.push_back(next++);
            }
            else if (kind < 9 && ! clauses.empty()) {
                auto it = clauses.begin();
                std::advance(it, static_cast<long>(uniform(rng, 0, clauses.size() - 1)));
                out << "rup " << to_string(it->second) << " " << it->first << "\n";
                clauses.emplace(next, it->second);
                live.push_back(next++);
            }
            else if (live.size() > formula.constraints.size()) {
                auto victim = live.back();
                if (victim > formula.constraints.size()) {
                    out << "del id " << victim << " ;\n";
                    live.pop_back();
                    clauses.erase(victim);
                }
            }
        }
        out << "conclusion UNSAT ;\n";
        out << "end pseudo-Boolean proof\n";
        return out.str();
    }

    auto to_string(Mutation m) -> string
    {
        switch (m) {
        case Mutation::FlipCoefficientSign: return "flip-coefficient-sign";
        case Mutation::FlipLiteral: return "flip-literal";
        case Mutation::DegreePlusOne: return "degree-plus-one";
        case Mutation::IdPlusOne: return "id-plus-one";
        case Mutation::SwapKeyword: return "swap-keyword";
        }
        return "?";
    }

    namespace
    {
        auto split_lines(const string & text) -> vector<string>
        {
            vector<string> lines;
            std::stringstream in{text};
            string line;
            while (std::getline(in, line))
                lines.push_back(line);
            return lines;
        }

        auto split_words(const string & line) -> vector<string>
        {
            vector<string> words;
            std::stringstream in{line};
            string w;
            while (in >> w)
                words.push_back(w);
            return words;
        }

        auto is_number(const string & s) -> bool
        {
            size_t start = (! s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
            return s.size() > start && std::all_of(s.begin() + static_cast<long>(start), s.end(), [](char c) { return c >= '0' && c <= '9'; });
        }

        auto is_literal(const string & s) -> bool
        {
            size_t start = (! s.empty() && s[0] == '~') ? 1 : 0;
            return s.size() > start + 1 && s[start] == 'x' && is_number(s.substr(start + 1));
        }

        const std::map<string, string> keyword_swaps{{"f", "pol"}, {"pol", "rup"}, {"p", "u"}, {"rup", "pol"}, {"u", "p"}, {"pbc", "rup"},
            {"red", "rup"}, {"del", "weaken"}, {"weaken", "del"}, {"sol", "pol"}, {"soli", "pol"}, {"conclusion", "output"}};
    }

    auto mutation_sites(const string & proof) -> vector<MutationSite>
    {
        vector<MutationSite> sites;
        auto lines = split_lines(proof);
        for (size_t li = 1; li < lines.size(); ++li) {
            auto words = split_words(lines[li]);
            if (words.empty() || words[0] == "end" || words[0] == "begin" || words[0] == "*" || words[0] == "goal" || words[0] == "proofgoal")
                continue;
            const auto & key = words[0];
            if (keyword_swaps.contains(key))
                sites.push_back({Mutation::SwapKeyword, li, 0});

            if (key == "rup" || key == "u" || key == "pbc" || key == "red" || key == "dom") {
                size_t i = 1;
                for (; i < words.size() && words[i] != ">="; ++i) {
                    if (is_number(words[i]))
                        sites.push_back({Mutation::FlipCoefficientSign, li, i});
                    else if (is_literal(words[i]))
                        sites.push_back({Mutation::FlipLiteral, li, i});
                }
                if (i + 1 < words.size() && is_number(words[i + 1]))
                    sites.push_back({Mutation::DegreePlusOne, li, i + 1});
                for (size_t j = i + 3; j < words.size(); ++j) {
                    if ((key == "rup" || key == "u") && is_number(words[j]))
                        sites.push_back({Mutation::IdPlusOne, li, j});
                    else if (is_literal(words[j]))
                        sites.push_back({Mutation::FlipLiteral, li, j});
                }
            }
            else if (key == "pol" || key == "p") {
                for (size_t i = 1; i < words.size(); ++i) {
                    bool scalar = i + 1 < words.size() && (words[i + 1] == "*" || words[i + 1] == "d");
                    if (is_number(words[i]))
                        sites.push_back({scalar ? Mutation::FlipCoefficientSign : Mutation::IdPlusOne, li, i});
                    else if (is_literal(words[i]))
                        sites.push_back({Mutation::FlipLiteral, li, i});
                }
            }
            else if (key == "del" || key == "conclusion" || key == "f" || key == "weaken") {
                for (size_t i = 1; i < words.size(); ++i)
                    if (is_number(words[i]))
                        sites.push_back({Mutation::IdPlusOne, li, i});
                    else if (is_literal(words[i]))
                        sites.push_back({Mutation::FlipLiteral, li, i});
            }
            else if (key == "sol" || key == "soli") {
                for (size_t i = 1; i < words.size(); ++i)
                    if (is_literal(words[i]))
                        sites.push_back({Mutation::FlipLiteral, li, i});
            }
        }
        return sites;
    }

    auto apply_mutation(const string & proof, const MutationSite & site) -> string
    {
        auto lines = split_lines(proof);
        auto words = split_words(lines.at(site.line));
        auto & w = words.at(site.token);
        switch (site.kind) {
        case Mutation::FlipCoefficientSign:
            if (w[0] == '-')
                w = w.substr(1);
            else if (w[0] == '+')
                w = "-" + w.substr(1);
            else
                w = "-" + w;
            break;
        case Mutation::FlipLiteral: w = w[0] == '~' ? w.substr(1) : "~" + w; break;
        case Mutation::DegreePlusOne:
        case Mutation::IdPlusOne: w = to_string(Integer{*parse_integer(w) + 1}); break;
        case Mutation::SwapKeyword: w = keyword_swaps.at(w); break;
        }
        string line;
        for (const auto & word : words)
            line += (line.empty() ? "" : " ") + word;
        lines[site.line] = line;
        string result;
        for (const auto & l : lines)
            result += l + "\n";
        return result;
    }

    auto scalability_case(size_t steps, size_t width, bool with_deletions, size_t live_window) -> ScalabilityCase
    {
        ScalabilityCase result;
        auto & f = result.formula;
        // x1 and ~x1 make the formula refutable in one step at the end; the wide clauses
        // over x2..x(width+1) are what the bulk of the proof works on.
        f.constraints.push_back(Constraint{{Term{1, Literal::positive(1)}}, 1});
        f.constraints.push_back(Constraint{{Term{1, Literal::negative(1)}}, 1});
        const size_t wide = 4;
        for (size_t j = 0; j < wide; ++j) {
            Constraint c;
            for (size_t i = 0; i < width; ++i) {
                auto v = static_cast<Variable>(i + 2);
                c.terms.push_back(Term{1, (i + j) % 3 == 0 ? Literal::negative(v) : Literal::positive(v)});
            }
            c.degree = 1;
            f.constraints.push_back(c);
        }
        f.declared_vars = width + 1;
        f.declared_constraints = f.constraints.size();

        std::ostringstream out;
        out << "pseudo-Boolean proof version 3.0\n";
        out << "f " << f.constraints.size() << " ;\n";
        size_t emitted = 1;
        ConstraintId next = f.constraints.size() + 1;
        std::deque<ConstraintId> window;
        auto derived = [&](ConstraintId id) {
            window.push_back(id);
            if (with_deletions && window.size() > live_window) {
                out << "del id " << window.front() << " ;\n";
                window.pop_front();
                ++emitted;
            }
        };

        for (size_t round = 0; emitted + 2 < steps; ++round) {
            auto a = 3 + round % wide, b = 3 + (round + 1) % wide;
            out << "pol " << a << " " << b << " + s ;\n";
            auto sum = next++;
            ++emitted;
            derived(sum);
            out << "rup " << to_string(f.constraints[a - 1]) << " " << a << "\n";
            auto copy = next++;
            ++emitted;
            derived(copy);
            out << "pol " << copy << " 2 * " << sum << " + 3 d ;\n";
            ++emitted;
            derived(next++);
        }
        out << "pol 1 2 + ;\n";
        out << "conclusion UNSAT : " << next << " ;\n";
        out << "end pseudo-Boolean proof\n";
        result.proof = out.str();
        result.steps = emitted + 2;
        return result;
    }

    namespace
    {
        auto child_peak_kib(const std::function<int()> & body) -> std::optional<std::pair<long, int>>
        {
            pid_t pid = fork();
            if (pid < 0)
                return std::nullopt;
            if (pid == 0)
                _exit(body());
            int status = 0;
            struct rusage usage{};
            if (wait4(pid, &status, 0, &usage) < 0)
                return std::nullopt;
            return std::pair{usage.ru_maxrss, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
        }
    }

    auto probe_check_memory(const Formula & formula, const string & proof_path) -> std::optional<MemoryProbe>
    {
        auto idle = child_peak_kib([] { return 0; });
        auto run = child_peak_kib([&] {
            std::ifstream in{proof_path};
            ProofReader reader{in};
            auto verdict = check(formula, reader);
            return verdict.status == VerdictStatus::VerifiedUnsat ? 0 : 1;
        });
        if (! idle || ! run)
            return std::nullopt;
        return MemoryProbe{std::max(0L, run->first - idle->first), run->second == 0};
    }
}
