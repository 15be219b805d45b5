#ifndef PBFORGE_GUARD_PBFORGE_CHECKER_HH
#define PBFORGE_GUARD_PBFORGE_CHECKER_HH

#include <pbforge/constraint_db.hh>
#include <pbforge/opb.hh>
#include <pbforge/proof_ast.hh>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace pbforge
{
    struct CheckOptions
    {
        /// rup may only use its hints; no fallback to propagation over the whole database.
        bool strict_hints = false;
    };

    enum class VerdictStatus
    {
        VerifiedUnsat,
        VerifiedSat,
        Rejected
    };

    struct CheckStats
    {
        std::size_t steps = 0;
        std::size_t constraints_created = 0;
        std::size_t constraints_deleted = 0;
        std::size_t max_db_size = 0;
        std::size_t subproofs = 0;
        std::size_t rup_fallbacks = 0;
        /// Handler invocations keyed by rule name ("pol", "rup", ...).
        std::map<std::string, std::size_t> rules;
        /// pol operators applied, keyed by "+", "*", "d", "s", "w", "id", "lit".
        std::map<std::string, std::size_t> pol_operators;
    };

    struct Verdict
    {
        VerdictStatus status = VerdictStatus::Rejected;
        std::string detail;
        /// Proof line of the step that failed, for rejections.
        std::optional<std::size_t> failing_line;
        /// Rejected because the proof text itself was malformed.
        bool parse_error = false;
        CheckStats stats;
    };

    [[nodiscard]] auto to_string(VerdictStatus status) -> std::string;

    /// Replays a proof against a formula, one rule at a time. The handlers are public so that
    /// individual rules can be exercised directly; each throws RuleViolation on failure.
    class Checker
    {
    public:
        explicit Checker(const Formula & formula, CheckOptions options = {});

        /// Loads the formula under ids 1..M. count, if given, must equal M.
        auto load_formula(std::optional<std::size_t> count = std::nullopt) -> void;

        /// Evaluates a pol expression without storing the result.
        auto eval_pol(std::span<const RpnToken> rpn) -> Constraint;
        auto apply_pol(std::span<const RpnToken> rpn) -> ConstraintId;
        auto check_rup(const Constraint & target, std::span<const ConstraintId> hints, bool hinted = true) -> ConstraintId;
        auto check_pbc(const Constraint & target, const Subproof & subproof) -> ConstraintId;
        auto check_red(const Red & red) -> ConstraintId;
        auto check_solution(std::span<const Literal> literals, bool implied) -> void;
        auto delete_constraints(std::span<const ConstraintId> ids) -> void;
        auto apply_weaken(ConstraintId id, Variable var) -> ConstraintId;

        /// Replays one step. Conclusions are recorded, not judged; see verdict().
        auto replay(const ProofStep & step) -> void;

        /// Judges the recorded conclusion against the current state.
        auto verdict() -> Verdict;

        [[nodiscard]] auto db() -> ConstraintDb & { return _db; }
        [[nodiscard]] auto db() const -> const ConstraintDb & { return _db; }
        [[nodiscard]] auto stats() const -> const CheckStats & { return _stats; }

    private:
        auto replay_in_scope(const ProofStep & step) -> void;
        auto store(Constraint c) -> ConstraintId;
        auto lookup(ConstraintId id) const -> const Constraint &;
        auto subproof_reaches_contradiction(const Constraint & assumption, const Subproof & steps) -> bool;

        const Formula & _formula;
        CheckOptions _options;
        ConstraintDb _db;
        CheckStats _stats;
        bool _formula_loaded = false;
        bool _solution_checked = false;
        std::size_t _depth = 0;
        std::optional<Conclusion> _conclusion;
        std::size_t _conclusion_line = 0;
    };

    /// Never throws: every failure, including malformed proof text, becomes a Rejected verdict.
    auto check(const Formula & formula, const Proof & proof, const CheckOptions & options = {}) -> Verdict;
    auto check(const Formula & formula, ProofReader & reader, const CheckOptions & options = {}) -> Verdict;
}

#endif
