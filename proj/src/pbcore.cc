#include <pbforge/errors.hh>
#include <pbforge/pbcore.hh>

#include <algorithm>
#include <unordered_map>

using std::optional;
using std::span;
using std::string;
using std::unordered_map;
using std::vector;

namespace pbforge
{
    auto parse_integer(std::string_view text) -> optional<Integer>
    {
        std::size_t pos = 0;
        bool negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            negative = text[pos] == '-';
            ++pos;
        }
        if (pos == text.size())
            return std::nullopt;

        Integer result = 0;
        for (; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c < '0' || c > '9')
                return std::nullopt;
            result *= 10;
            result += c - '0';
        }
        if (negative)
            result = -result;
        return result;
    }

    auto to_string(const Integer & value) -> string
    {
        return value.str();
    }

    auto Valuation::set(Variable var, bool value) -> void
    {
        if (var >= _values.size())
            _values.resize(var + 1, false);
        _values[var] = value;
    }

    auto PartialAssignment::value(Variable var) const -> optional<bool>
    {
        if (var >= _values.size() || _values[var] == 0)
            return std::nullopt;
        return _values[var] > 0;
    }

    auto PartialAssignment::literal_value(Literal lit) const -> optional<bool>
    {
        auto v = value(lit.var());
        if (! v)
            return std::nullopt;
        return *v != lit.is_negative();
    }

    auto PartialAssignment::is_falsified(Literal lit) const -> bool
    {
        auto var = lit.var();
        if (var >= _values.size())
            return false;
        return _values[var] == (lit.is_negative() ? 1 : -1);
    }

    auto PartialAssignment::assign(Literal lit, optional<ConstraintId> reason) -> bool
    {
        auto var = lit.var();
        if (var >= _values.size())
            _values.resize(var + 1, 0);
        if (_values[var] != 0)
            return false;
        _values[var] = lit.is_negative() ? -1 : 1;
        _trail.push_back(TrailEntry{lit, reason});
        return true;
    }

    auto PartialAssignment::undo_to(std::size_t trail_size) -> void
    {
        while (_trail.size() > trail_size) {
            _values[_trail.back().literal.var()] = 0;
            _trail.pop_back();
        }
    }

    auto Substitution::insert(Variable var, Image image) -> bool
    {
        return _map.emplace(var, image).second;
    }

    auto Substitution::lookup(Variable var) const -> const Image *
    {
        auto it = _map.find(var);
        return it == _map.end() ? nullptr : &it->second;
    }

    auto eval_literal(const Valuation & v, Literal lit) -> int
    {
        return v.get(lit.var()) != lit.is_negative() ? 1 : 0;
    }

    auto eval_sum(const Valuation & v, span<const Term> terms) -> Integer
    {
        Integer sum = 0;
        for (const auto & t : terms)
            if (eval_literal(v, t.literal))
                sum += t.coefficient;
        return sum;
    }

    auto coeff_sum(span<const Term> terms) -> Integer
    {
        Integer sum = 0;
        for (const auto & t : terms)
            sum += t.coefficient;
        return sum;
    }

    auto is_satisfied(const Valuation & v, const Constraint & c) -> bool
    {
        return c.degree <= eval_sum(v, c.terms);
    }

    auto normalize(const Constraint & c) -> Constraint
    {
        struct Slot
        {
            Variable var;
            Integer pos = 0;
            Integer neg = 0;
        };

        vector<Slot> slots;
        unordered_map<Variable, std::size_t> index;
        slots.reserve(c.terms.size());
        index.reserve(c.terms.size());

        for (const auto & t : c.terms) {
            auto [it, fresh] = index.try_emplace(t.literal.var(), slots.size());
            if (fresh)
                slots.push_back(Slot{t.literal.var()});
            auto & slot = slots[it->second];
            (t.literal.is_negative() ? slot.neg : slot.pos) += t.coefficient;
        }

        Constraint result;
        result.degree = c.degree;
        result.terms.reserve(slots.size());
        for (auto & slot : slots) {
            Integer cancelled = std::min(slot.pos, slot.neg);
            if (cancelled > 0) {
                slot.pos -= cancelled;
                slot.neg -= cancelled;
                result.degree = saturating_sub(result.degree, cancelled);
            }
            if (slot.pos > 0)
                result.terms.push_back(Term{std::move(slot.pos), Literal::positive(slot.var)});
            else if (slot.neg > 0)
                result.terms.push_back(Term{std::move(slot.neg), Literal::negative(slot.var)});
        }
        if (result.degree < 0)
            result.degree = 0;
        return result;
    }

    auto is_normalized(const Constraint & c) -> bool
    {
        if (c.degree < 0)
            return false;
        unordered_map<Variable, bool> seen;
        for (const auto & t : c.terms) {
            if (t.coefficient <= 0)
                return false;
            if (! seen.emplace(t.literal.var(), true).second)
                return false;
        }
        return true;
    }

    auto add(const Constraint & a, const Constraint & b) -> Constraint
    {
        Constraint sum;
        sum.terms.reserve(a.terms.size() + b.terms.size());
        sum.terms.insert(sum.terms.end(), a.terms.begin(), a.terms.end());
        sum.terms.insert(sum.terms.end(), b.terms.begin(), b.terms.end());
        sum.degree = a.degree + b.degree;
        return normalize(sum);
    }

    auto multiply(const Constraint & c, const Integer & k) -> Constraint
    {
        if (k <= 0)
            throw RuleViolation{"multiplication by " + to_string(k) + " (must be positive)"};
        Constraint result = c;
        for (auto & t : result.terms)
            t.coefficient *= k;
        result.degree *= k;
        return normalize(result);
    }

    auto divide(const Constraint & c, const Integer & k) -> Constraint
    {
        if (k <= 0)
            throw RuleViolation{"division by " + to_string(k) + " (must be positive)"};
        Constraint result = normalize(c);
        for (auto & t : result.terms)
            t.coefficient = ceil_div(t.coefficient, k);
        result.degree = ceil_div(result.degree, k);
        return result;
    }

    auto saturate(const Constraint & c) -> Constraint
    {
        Constraint result = normalize(c);
        for (auto & t : result.terms)
            if (t.coefficient > result.degree)
                t.coefficient = result.degree;
        return normalize(result);
    }

    auto weaken(const Constraint & c, Variable var) -> Constraint
    {
        Constraint result = normalize(c);
        auto it = std::find_if(result.terms.begin(), result.terms.end(),
            [&](const Term & t) { return t.literal.var() == var; });
        if (it != result.terms.end()) {
            result.degree = saturating_sub(result.degree, it->coefficient);
            result.terms.erase(it);
        }
        return result;
    }

    auto negate(const Constraint & c) -> Constraint
    {
        Constraint result = normalize(c);
        Integer sum = coeff_sum(result.terms);
        for (auto & t : result.terms)
            t.literal = t.literal.complement();
        result.degree = saturating_sub(sum + 1, result.degree);
        return result;
    }

    auto is_contradiction(const Constraint & c) -> bool
    {
        return coeff_sum(c.terms) < c.degree;
    }

    auto is_trivially_true(const Constraint & c) -> bool
    {
        return c.degree <= 0;
    }

    auto literal_axiom(Literal lit) -> Constraint
    {
        return Constraint{{Term{1, lit}}, 0};
    }

    auto slack(const Constraint & c, const PartialAssignment & rho) -> Integer
    {
        Integer result = -c.degree;
        for (const auto & t : c.terms)
            if (! rho.is_falsified(t.literal))
                result += t.coefficient;
        return result;
    }

    auto propagate_in_place(span<const IdConstraint> constraints, PartialAssignment & rho) -> optional<ConstraintId>
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto & [id, c] : constraints) {
                Integer s = slack(*c, rho);
                if (s < 0)
                    return id;
                for (const auto & t : c->terms)
                    if (t.coefficient > s && ! rho.literal_value(t.literal))
                        if (rho.assign(t.literal, id))
                            changed = true;
            }
        }
        return std::nullopt;
    }

    auto propagate(span<const IdConstraint> constraints, PartialAssignment rho) -> PropagationResult
    {
        auto conflict = propagate_in_place(constraints, rho);
        return PropagationResult{conflict, std::move(rho)};
    }

    auto apply_substitution(const Substitution & omega, const Constraint & c) -> Constraint
    {
        Constraint result;
        result.degree = c.degree;
        result.terms.reserve(c.terms.size());
        for (const auto & t : c.terms) {
            const auto * image = omega.lookup(t.literal.var());
            if (! image) {
                result.terms.push_back(t);
                continue;
            }
            if (const auto * lit = std::get_if<Literal>(image)) {
                result.terms.push_back(Term{t.coefficient, t.literal.is_negative() ? lit->complement() : *lit});
                continue;
            }
            bool satisfied = std::get<bool>(*image) != t.literal.is_negative();
            if (satisfied)
                result.degree = saturating_sub(result.degree, t.coefficient);
        }
        result = normalize(result);
        if (result.degree == 0)
            result.terms.clear();
        return result;
    }

    auto apply_substitution_to_valuation(const Substitution & omega, const Valuation & v) -> Valuation
    {
        Valuation result = v;
        for (const auto & [var, image] : omega.mapping()) {
            if (const auto * lit = std::get_if<Literal>(&image))
                result.set(var, eval_literal(v, *lit) == 1);
            else
                result.set(var, std::get<bool>(image));
        }
        return result;
    }

    auto variables_of(const Constraint & c) -> vector<Variable>
    {
        vector<Variable> result;
        result.reserve(c.terms.size());
        for (const auto & t : c.terms)
            result.push_back(t.literal.var());
        return result;
    }

    auto max_variable(const Constraint & c) -> Variable
    {
        Variable result = 0;
        for (const auto & t : c.terms)
            result = std::max(result, t.literal.var());
        return result;
    }

    auto canonical_form(const Constraint & c) -> Constraint
    {
        Constraint result = normalize(c);
        std::sort(result.terms.begin(), result.terms.end(),
            [](const Term & a, const Term & b) { return a.literal < b.literal; });
        return result;
    }

    auto to_string(Literal lit) -> string
    {
        return (lit.is_negative() ? "~x" : "x") + std::to_string(lit.var());
    }

    auto to_string(const Constraint & c) -> string
    {
        string result;
        for (const auto & t : c.terms) {
            result += "+" + to_string(t.coefficient) + " " + to_string(t.literal) + " ";
        }
        result += ">= " + to_string(c.degree) + " ;";
        return result;
    }
}
