#ifndef PBFORGE_GUARD_PBFORGE_PBCORE_HH
#define PBFORGE_GUARD_PBFORGE_PBCORE_HH

#include <pbforge/integer.hh>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pbforge
{
    using Variable = std::uint32_t;
    using ConstraintId = std::uint64_t;

    class Literal
    {
    public:
        static auto positive(Variable var) -> Literal { return Literal{var, false}; }
        static auto negative(Variable var) -> Literal { return Literal{var, true}; }

        [[nodiscard]] auto var() const noexcept -> Variable { return _var; }
        [[nodiscard]] auto is_negative() const noexcept -> bool { return _negative; }
        [[nodiscard]] auto complement() const noexcept -> Literal { return Literal{_var, ! _negative}; }

        auto operator<=>(const Literal &) const = default;

    private:
        Literal(Variable var, bool negative) : _var(var), _negative(negative) {}

        Variable _var;
        bool _negative;
    };

    struct Term
    {
        Integer coefficient;
        Literal literal;

        auto operator==(const Term &) const -> bool = default;
    };

    /// sum(terms) >= degree. Every operation below returns normalized constraints.
    struct Constraint
    {
        std::vector<Term> terms;
        Integer degree;

        auto operator==(const Constraint &) const -> bool = default;
    };

    /// Total assignment; variables never set read as false.
    class Valuation
    {
    public:
        Valuation() = default;

        [[nodiscard]] auto get(Variable var) const -> bool { return var < _values.size() && _values[var]; }
        auto set(Variable var, bool value) -> void;

    private:
        std::vector<bool> _values;
    };

    /// Assignment with an explicit unassigned state and a trail recording assignment order,
    /// so that propagation can be undone and its reasons inspected.
    class PartialAssignment
    {
    public:
        struct TrailEntry
        {
            Literal literal;
            std::optional<ConstraintId> reason;
        };

        [[nodiscard]] auto value(Variable var) const -> std::optional<bool>;
        [[nodiscard]] auto literal_value(Literal lit) const -> std::optional<bool>;
        [[nodiscard]] auto is_falsified(Literal lit) const -> bool;

        /// Makes lit true. Returns false (and changes nothing) if its variable is already assigned.
        auto assign(Literal lit, std::optional<ConstraintId> reason = std::nullopt) -> bool;
        auto undo_to(std::size_t trail_size) -> void;

        [[nodiscard]] auto trail() const -> const std::vector<TrailEntry> & { return _trail; }

    private:
        std::vector<std::int8_t> _values;
        std::vector<TrailEntry> _trail;
    };

    /// Partial map from variables to a constant or a literal, applied once (no chaining).
    class Substitution
    {
    public:
        using Image = std::variant<bool, Literal>;

        /// Returns false if var is already in the domain.
        auto insert(Variable var, Image image) -> bool;

        [[nodiscard]] auto lookup(Variable var) const -> const Image *;
        [[nodiscard]] auto empty() const -> bool { return _map.empty(); }
        [[nodiscard]] auto mapping() const -> const std::map<Variable, Image> & { return _map; }

        auto operator==(const Substitution &) const -> bool = default;

    private:
        std::map<Variable, Image> _map;
    };

    auto eval_literal(const Valuation & v, Literal lit) -> int;
    auto eval_sum(const Valuation & v, std::span<const Term> terms) -> Integer;
    auto coeff_sum(std::span<const Term> terms) -> Integer;
    auto is_satisfied(const Valuation & v, const Constraint & c) -> bool;

    /// Merges duplicate literals, cancels opposite literals on one variable, drops zero
    /// coefficients. Variables keep their first-occurrence order.
    auto normalize(const Constraint & c) -> Constraint;
    [[nodiscard]] auto is_normalized(const Constraint & c) -> bool;

    auto add(const Constraint & a, const Constraint & b) -> Constraint;
    /// Throws RuleViolation if k is zero.
    auto multiply(const Constraint & c, const Integer & k) -> Constraint;
    /// Ceiling division of every coefficient and the degree. Throws RuleViolation if k is zero.
    auto divide(const Constraint & c, const Integer & k) -> Constraint;
    auto saturate(const Constraint & c) -> Constraint;
    /// Drops the term on var, lowering the degree by its coefficient.
    auto weaken(const Constraint & c, Variable var) -> Constraint;
    auto negate(const Constraint & c) -> Constraint;
    auto is_contradiction(const Constraint & c) -> bool;
    [[nodiscard]] auto is_trivially_true(const Constraint & c) -> bool;
    auto literal_axiom(Literal lit) -> Constraint;

    /// Coefficients of literals not falsified by rho, minus the degree.
    auto slack(const Constraint & c, const PartialAssignment & rho) -> Integer;

    struct IdConstraint
    {
        ConstraintId id;
        const Constraint * constraint;
    };

    struct PropagationResult
    {
        std::optional<ConstraintId> conflict;
        PartialAssignment assignment;
    };

    /// Unit propagation to fixpoint over constraints, scanned in the given order. Stops at
    /// the first constraint whose slack goes negative.
    auto propagate(std::span<const IdConstraint> constraints, PartialAssignment rho) -> PropagationResult;
    auto propagate_in_place(std::span<const IdConstraint> constraints, PartialAssignment & rho) -> std::optional<ConstraintId>;

    auto apply_substitution(const Substitution & omega, const Constraint & c) -> Constraint;
    auto apply_substitution_to_valuation(const Substitution & omega, const Valuation & v) -> Valuation;

    /// Variables of c in term order.
    auto variables_of(const Constraint & c) -> std::vector<Variable>;
    [[nodiscard]] auto max_variable(const Constraint & c) -> Variable;
    /// Terms sorted by (variable, polarity); equal canonical forms mean equal constraints up to term order.
    auto canonical_form(const Constraint & c) -> Constraint;

    auto to_string(Literal lit) -> std::string;
    /// OPB-style rendering, e.g. "+3 x1 +5 ~x2 >= 4 ;".
    auto to_string(const Constraint & c) -> std::string;
}

#endif
