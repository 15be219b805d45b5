#ifndef PBFORGE_GUARD_PBFORGE_PROOF_AST_HH
#define PBFORGE_GUARD_PBFORGE_PROOF_AST_HH

#include <pbforge/pbcore.hh>
#include <pbforge/syntax.hh>

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pbforge
{
    struct RpnId
    {
        ConstraintId id;
        auto operator==(const RpnId &) const -> bool = default;
    };

    struct RpnAdd
    {
        auto operator==(const RpnAdd &) const -> bool = default;
    };

    struct RpnMultiply
    {
        Integer factor;
        auto operator==(const RpnMultiply &) const -> bool = default;
    };

    struct RpnDivide
    {
        Integer divisor;
        auto operator==(const RpnDivide &) const -> bool = default;
    };

    struct RpnSaturate
    {
        auto operator==(const RpnSaturate &) const -> bool = default;
    };

    struct RpnWeaken
    {
        Variable var;
        auto operator==(const RpnWeaken &) const -> bool = default;
    };

    /// A bare literal in a pol expression pushes its literal axiom.
    using RpnToken = std::variant<RpnId, Literal, RpnAdd, RpnMultiply, RpnDivide, RpnSaturate, RpnWeaken>;

    struct ProofStep;
    using Subproof = std::vector<ProofStep>;

    struct LoadFormula
    {
        std::optional<std::size_t> count;
        auto operator==(const LoadFormula &) const -> bool = default;
    };

    struct Pol
    {
        std::vector<RpnToken> rpn;
        auto operator==(const Pol &) const -> bool = default;
    };

    struct Rup
    {
        Constraint target;
        std::vector<ConstraintId> hints;
        /// A hint section was present (possibly just "~").
        bool hinted = false;
        auto operator==(const Rup &) const -> bool = default;
    };

    struct Pbc
    {
        Constraint target;
        Subproof subproof;
        auto operator==(const Pbc &) const -> bool;
    };

    struct NewConstraintGoal
    {
        auto operator==(const NewConstraintGoal &) const -> bool = default;
    };

    using GoalId = std::variant<ConstraintId, NewConstraintGoal>;

    struct ProofGoal
    {
        GoalId goal;
        Subproof steps;
        std::size_t line = 0;
        auto operator==(const ProofGoal &) const -> bool;
    };

    /// Shared payload of red and dom.
    struct Red
    {
        Constraint target;
        Substitution witness;
        std::vector<ProofGoal> goals;
        bool dominance = false;
        auto operator==(const Red &) const -> bool = default;
    };

    struct Del
    {
        std::vector<ConstraintId> ids;
        auto operator==(const Del &) const -> bool = default;
    };

    struct WeakenStep
    {
        ConstraintId id;
        Variable var;
        auto operator==(const WeakenStep &) const -> bool = default;
    };

    struct Sol
    {
        std::vector<Literal> literals;
        /// soli: unlisted values may be implied by propagation.
        bool implied = false;
        auto operator==(const Sol &) const -> bool = default;
    };

    enum class ConclusionKind
    {
        Unsat,
        Sat,
        Bounds
    };

    struct Conclusion
    {
        ConclusionKind kind;
        std::optional<ConstraintId> ref;
        /// "conclusion SAT : <literals>" carries its own solution.
        std::optional<std::vector<Literal>> solution;
        auto operator==(const Conclusion &) const -> bool = default;
    };

    /// "output NONE"; has no effect on checking.
    struct Output
    {
        auto operator==(const Output &) const -> bool = default;
    };

    using Rule = std::variant<LoadFormula, Pol, Rup, Pbc, Red, Del, WeakenStep, Sol, Conclusion, Output>;

    struct ProofStep
    {
        std::size_t line = 0;
        Rule rule;
        /// Compares rules only; line numbers are ignored.
        auto operator==(const ProofStep & other) const -> bool { return rule == other.rule; }
    };

    struct Proof
    {
        std::string version;
        std::vector<ProofStep> steps;
        auto operator==(const Proof &) const -> bool = default;
    };

    struct TokenLine
    {
        std::size_t line;
        std::vector<Token> tokens;
    };

    /// Splits proof text into numbered token lines, dropping blank and '*' comment lines.
    auto tokenize(std::string_view text) -> std::vector<TokenLine>;

    /// Pull parser over kernel-format proof text. Each call to next() consumes exactly one
    /// top-level step (with any nested subproof), so replayed steps need not be retained.
    class ProofReader
    {
    public:
        explicit ProofReader(std::istream & in);
        explicit ProofReader(std::string text);
        ~ProofReader();

        ProofReader(const ProofReader &) = delete;
        auto operator=(const ProofReader &) -> ProofReader & = delete;

        /// Reads and validates the header if not yet done.
        auto version() -> const std::string &;

        /// nullopt once the trailer has been read. Throws ParseError.
        auto next() -> std::optional<ProofStep>;

        /// Line number of the most recently read line.
        [[nodiscard]] auto current_line() const -> std::size_t;

    private:
        struct Imp;
        std::unique_ptr<Imp> _imp;
    };

    auto parse_proof(std::string_view text) -> Proof;

    auto serialize_step(const ProofStep & step) -> std::string;
    auto serialize_proof(const Proof & proof) -> std::string;

    [[nodiscard]] auto rule_name(const Rule & rule) -> std::string_view;
}

#endif
