#include <pbforge/checker.hh>
#include <pbforge/errors.hh>

#include <algorithm>
#include <set>
#include <string_view>
#include <unordered_set>

using std::optional;
using std::size_t;
using std::span;
using std::string;
using std::string_view;
using std::vector;

namespace pbforge
{
    namespace
    {
        /// A rule failure, tagged with the line of the innermost step that raised it.
        struct StepFailure
        {
            size_t line;
            string message;
        };

        /// Pseudo-id for the negated target during rup; never a real constraint id.
        constexpr ConstraintId negated_target_id = 0;

        auto id_string(ConstraintId id) -> string
        {
            return std::to_string(id);
        }

        auto goal_name(const GoalId & goal) -> string
        {
            if (const auto * id = std::get_if<ConstraintId>(&goal))
                return "goal " + id_string(*id);
            return "goal #new";
        }
    }

    auto to_string(VerdictStatus status) -> string
    {
        switch (status) {
        case VerdictStatus::VerifiedUnsat: return "VerifiedUnsat";
        case VerdictStatus::VerifiedSat: return "VerifiedSat";
        case VerdictStatus::Rejected: return "Rejected";
        }
        return "Rejected";
    }

    Checker::Checker(const Formula & formula, CheckOptions options) :
        _formula(formula),
        _options(options)
    {
    }

    auto Checker::store(Constraint c) -> ConstraintId
    {
        auto id = _db.insert(std::move(c));
        ++_stats.constraints_created;
        _stats.max_db_size = std::max(_stats.max_db_size, _db.live_count());
        return id;
    }

    auto Checker::lookup(ConstraintId id) const -> const Constraint &
    {
        const auto * c = _db.get(id);
        if (! c)
            throw RuleViolation{"reference to unknown or deleted constraint " + id_string(id)};
        return *c;
    }

    auto Checker::load_formula(optional<size_t> count) -> void
    {
        if (_formula_loaded)
            throw RuleViolation{"formula loaded twice"};
        if (count && *count != _formula.constraints.size())
            throw RuleViolation{"proof expects " + std::to_string(*count) + " formula constraints but the formula has " +
                std::to_string(_formula.constraints.size())};
        _formula_loaded = true;
        for (const auto & c : _formula.constraints)
            store(c);
    }

    auto Checker::eval_pol(span<const RpnToken> rpn) -> Constraint
    {
        vector<Constraint> stack;
        auto pop = [&](string_view op) {
            if (stack.empty())
                throw RuleViolation{"pol stack underflow at '" + string{op} + "'"};
            Constraint c = std::move(stack.back());
            stack.pop_back();
            return c;
        };

        for (const auto & token : rpn) {
            std::visit(
                [&](const auto & t) {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, RpnId>) {
                        stack.push_back(lookup(t.id));
                        ++_stats.pol_operators["id"];
                    }
                    else if constexpr (std::is_same_v<T, Literal>) {
                        stack.push_back(literal_axiom(t));
                        ++_stats.pol_operators["lit"];
                    }
                    else if constexpr (std::is_same_v<T, RpnAdd>) {
                        auto b = pop("+");
                        auto a = pop("+");
                        stack.push_back(add(a, b));
                        ++_stats.pol_operators["+"];
                    }
                    else if constexpr (std::is_same_v<T, RpnMultiply>) {
                        stack.push_back(multiply(pop("*"), t.factor));
                        ++_stats.pol_operators["*"];
                    }
                    else if constexpr (std::is_same_v<T, RpnDivide>) {
                        stack.push_back(divide(pop("d"), t.divisor));
                        ++_stats.pol_operators["d"];
                    }
                    else if constexpr (std::is_same_v<T, RpnSaturate>) {
                        stack.push_back(saturate(pop("s")));
                        ++_stats.pol_operators["s"];
                    }
                    else {
                        stack.push_back(weaken(pop("w"), t.var));
                        ++_stats.pol_operators["w"];
                    }
                },
                token);
        }

        if (stack.size() != 1)
            throw RuleViolation{"pol expression leaves " + std::to_string(stack.size()) + " constraints on the stack (expected 1)"};
        return std::move(stack.back());
    }

    auto Checker::apply_pol(span<const RpnToken> rpn) -> ConstraintId
    {
        return store(eval_pol(rpn));
    }

    auto Checker::check_rup(const Constraint & target_in, span<const ConstraintId> hints, bool hinted) -> ConstraintId
    {
        Constraint target = normalize(target_in);
        Constraint negated = negate(target);

        vector<IdConstraint> view;
        view.reserve(hints.size() + 1);
        view.push_back(IdConstraint{negated_target_id, &negated});
        for (auto id : hints) {
            const auto * c = _db.get(id);
            if (! c)
                throw RuleViolation{"rup hint " + id_string(id) + " does not exist"};
            view.push_back(IdConstraint{id, c});
        }

        PartialAssignment rho;
        bool conflict = propagate_in_place(view, rho).has_value();

        if (! conflict && ! _options.strict_hints) {
            ++_stats.rup_fallbacks;
            vector<IdConstraint> everything;
            everything.reserve(_db.live_count() + 1);
            everything.push_back(IdConstraint{negated_target_id, &negated});
            _db.for_each_live([&](ConstraintId id, const Constraint & c) { everything.push_back(IdConstraint{id, &c}); });
            conflict = propagate_in_place(everything, rho).has_value();
        }

        if (! conflict)
            throw RuleViolation{string{"rup failed: no conflict by unit propagation"} +
                (_options.strict_hints ? (hinted ? " over the hints" : " (no hints given, strict hints)") : "")};

        return store(std::move(target));
    }

    auto Checker::subproof_reaches_contradiction(const Constraint & assumption, const Subproof & steps) -> bool
    {
        store(assumption);
        ++_depth;
        try {
            for (const auto & step : steps)
                replay_in_scope(step);
        }
        catch (...) {
            --_depth;
            throw;
        }
        --_depth;
        return _db.contradiction_witness().has_value();
    }

    auto Checker::check_pbc(const Constraint & target_in, const Subproof & subproof) -> ConstraintId
    {
        Constraint target = normalize(target_in);
        ++_stats.subproofs;

        auto snapshot = _db.snapshot();
        bool closed;
        try {
            closed = subproof_reaches_contradiction(negate(target), subproof);
        }
        catch (...) {
            _db.restore(snapshot);
            throw;
        }
        _db.restore(snapshot);

        if (! closed)
            throw RuleViolation{"pbc subproof incomplete: no contradiction derived"};
        return store(std::move(target));
    }

    auto Checker::check_red(const Red & red) -> ConstraintId
    {
        Constraint target = normalize(red.target);
        const auto & omega = red.witness;

        struct Obligation
        {
            GoalId goal;
            Constraint constraint;
            bool covered = false;
        };

        // Affected live constraints in id order, then the new-constraint goal.
        vector<Obligation> obligations;
        _db.for_each_live([&](ConstraintId id, const Constraint & c) {
            for (const auto & t : c.terms)
                if (omega.lookup(t.literal.var())) {
                    obligations.push_back(Obligation{id, apply_substitution(omega, c)});
                    break;
                }
        });
        obligations.push_back(Obligation{NewConstraintGoal{}, apply_substitution(omega, target)});

        auto find_obligation = [&](const GoalId & goal) -> Obligation * {
            for (auto & o : obligations)
                if (o.goal == goal)
                    return &o;
            return nullptr;
        };

        if (! red.goals.empty()) {
            ++_stats.subproofs;
            auto outer = _db.snapshot();
            try {
                store(negate(target));
                for (const auto & goal : red.goals) {
                    auto * obligation = find_obligation(goal.goal);
                    if (! obligation)
                        throw StepFailure{goal.line, goal_name(goal.goal) + " does not name an affected constraint"};
                    if (obligation->covered)
                        throw StepFailure{goal.line, goal_name(goal.goal) + " given twice"};

                    auto inner = _db.snapshot();
                    bool closed;
                    try {
                        closed = subproof_reaches_contradiction(negate(obligation->constraint), goal.steps);
                    }
                    catch (...) {
                        _db.restore(inner);
                        throw;
                    }
                    _db.restore(inner);
                    if (! closed)
                        throw StepFailure{goal.line, goal_name(goal.goal) + ": subproof derives no contradiction"};
                    obligation->covered = true;
                }
            }
            catch (...) {
                _db.restore(outer);
                throw;
            }
            _db.restore(outer);
        }

        // Remaining obligations must be trivially true or already present in the database.
        std::optional<std::set<string>> present;
        for (auto & o : obligations) {
            if (o.covered || is_trivially_true(o.constraint))
                continue;
            if (! present) {
                present.emplace();
                _db.for_each_live([&](ConstraintId, const Constraint & c) { present->insert(to_string(canonical_form(c))); });
            }
            if (! present->contains(to_string(canonical_form(o.constraint))))
                throw RuleViolation{"red: " + goal_name(o.goal) + " (" + to_string(o.constraint) + ") is not covered by a proof goal"};
        }

        return store(std::move(target));
    }

    auto Checker::check_solution(span<const Literal> literals, bool implied) -> void
    {
        PartialAssignment rho;
        for (const auto & lit : literals)
            if (! rho.assign(lit) && rho.literal_value(lit) == false)
                throw RuleViolation{"solution assigns " + to_string(lit) + " both ways"};

        if (implied) {
            auto live = _db.live();
            if (auto conflict = propagate_in_place(live, rho))
                throw RuleViolation{"solution conflicts with constraint " + id_string(*conflict) + " under propagation"};
        }

        Valuation v;
        for (const auto & entry : rho.trail())
            v.set(entry.literal.var(), ! entry.literal.is_negative());

        _db.for_each_live([&](ConstraintId id, const Constraint & c) {
            if (! is_satisfied(v, c))
                throw RuleViolation{"solution violates constraint " + id_string(id)};
        });
        _solution_checked = true;
    }

    auto Checker::delete_constraints(span<const ConstraintId> ids) -> void
    {
        for (auto id : ids) {
            _db.erase(id);
            ++_stats.constraints_deleted;
        }
    }

    auto Checker::apply_weaken(ConstraintId id, Variable var) -> ConstraintId
    {
        return store(weaken(lookup(id), var));
    }

    auto Checker::replay_in_scope(const ProofStep & step) -> void
    {
        ++_stats.steps;
        ++_stats.rules[string{rule_name(step.rule)}];
        try {
            std::visit(
                [&](const auto & r) {
                    using T = std::decay_t<decltype(r)>;
                    if constexpr (std::is_same_v<T, LoadFormula>) {
                        if (_depth > 0)
                            throw RuleViolation{"formula loaded inside a subproof"};
                        load_formula(r.count);
                    }
                    else if constexpr (std::is_same_v<T, Pol>)
                        apply_pol(r.rpn);
                    else if constexpr (std::is_same_v<T, Rup>)
                        check_rup(r.target, r.hints, r.hinted);
                    else if constexpr (std::is_same_v<T, Pbc>)
                        check_pbc(r.target, r.subproof);
                    else if constexpr (std::is_same_v<T, Red>)
                        check_red(r);
                    else if constexpr (std::is_same_v<T, Del>)
                        delete_constraints(r.ids);
                    else if constexpr (std::is_same_v<T, WeakenStep>)
                        apply_weaken(r.id, r.var);
                    else if constexpr (std::is_same_v<T, Sol>)
                        check_solution(r.literals, r.implied);
                    else if constexpr (std::is_same_v<T, Conclusion>) {
                        if (_depth > 0)
                            throw RuleViolation{"conclusion inside a subproof"};
                        if (_conclusion)
                            throw RuleViolation{"second conclusion"};
                        _conclusion = r;
                        _conclusion_line = step.line;
                    }
                },
                step.rule);
        }
        catch (const Error & e) {
            throw StepFailure{step.line, e.what()};
        }
    }

    auto Checker::replay(const ProofStep & step) -> void
    {
        if (_conclusion)
            throw StepFailure{step.line, "step after conclusion"};
        replay_in_scope(step);
    }

    auto Checker::verdict() -> Verdict
    {
        Verdict v;
        v.stats = _stats;
        v.stats.max_db_size = std::max(v.stats.max_db_size, _db.max_live_count());

        auto reject = [&](string reason, optional<size_t> line) {
            v.status = VerdictStatus::Rejected;
            v.detail = std::move(reason);
            v.failing_line = line;
            return v;
        };

        if (! _conclusion)
            return reject("proof has no conclusion", std::nullopt);

        switch (_conclusion->kind) {
        case ConclusionKind::Bounds:
            return reject("unsupported: optimization conclusions", _conclusion_line);

        case ConclusionKind::Unsat: {
            auto witness = _db.contradiction_witness();
            if (! witness)
                return reject("conclusion UNSAT but no contradiction was derived", _conclusion_line);
            if (auto ref = _conclusion->ref; ref && *ref != *witness) {
                const auto * c = _db.get(*ref);
                if (! c || ! is_contradiction(*c))
                    return reject("conclusion UNSAT names constraint " + id_string(*ref) + ", which is not a contradiction",
                        _conclusion_line);
            }
            v.status = VerdictStatus::VerifiedUnsat;
            v.detail = "contradiction derived as constraint " + id_string(*witness);
            return v;
        }

        case ConclusionKind::Sat: {
            if (_conclusion->solution) {
                try {
                    check_solution(*_conclusion->solution, false);
                }
                catch (const Error & e) {
                    return reject(e.what(), _conclusion_line);
                }
            }
            if (! _solution_checked)
                return reject("conclusion SAT without a checked solution", _conclusion_line);
            v.status = VerdictStatus::VerifiedSat;
            v.detail = "solution checked";
            return v;
        }
        }
        return reject("unknown conclusion", _conclusion_line);
    }

    namespace
    {
        template <typename NextStep>
        auto run(const Formula & formula, const CheckOptions & options, NextStep && next_step) -> Verdict
        {
            Checker checker{formula, options};
            try {
                while (auto step = next_step())
                    checker.replay(*step);
            }
            catch (const StepFailure & f) {
                Verdict v;
                v.status = VerdictStatus::Rejected;
                v.detail = f.message;
                v.failing_line = f.line;
                v.stats = checker.stats();
                return v;
            }
            catch (const ParseError & e) {
                Verdict v;
                v.status = VerdictStatus::Rejected;
                v.detail = e.what();
                v.failing_line = e.line();
                v.parse_error = true;
                v.stats = checker.stats();
                return v;
            }
            catch (const std::exception & e) {
                Verdict v;
                v.status = VerdictStatus::Rejected;
                v.detail = e.what();
                v.stats = checker.stats();
                return v;
            }
            return checker.verdict();
        }
    }

    auto check(const Formula & formula, const Proof & proof, const CheckOptions & options) -> Verdict
    {
        size_t next = 0;
        return run(formula, options, [&]() -> const ProofStep * {
            return next < proof.steps.size() ? &proof.steps[next++] : nullptr;
        });
    }

    auto check(const Formula & formula, ProofReader & reader, const CheckOptions & options) -> Verdict
    {
        optional<ProofStep> current;
        return run(formula, options, [&]() -> const ProofStep * {
            current = reader.next();
            return current ? &*current : nullptr;
        });
    }
}
