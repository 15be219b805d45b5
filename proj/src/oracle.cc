#include <pbforge/errors.hh>
#include <pbforge/oracle.hh>

#include <bit>
#include <limits>

using std::size_t;
using std::uint64_t;
using std::vector;

namespace pbforge
{
    auto to_string(OracleStatus status) -> std::string
    {
        switch (status) {
        case OracleStatus::Sat: return "SAT";
        case OracleStatus::Unsat: return "UNSAT";
        case OracleStatus::TooLarge: return "TooLarge";
        }
        return "TooLarge";
    }

    namespace
    {
        auto fits(const Integer & value) -> bool
        {
            // Room for sums of many coefficients.
            return value >= 0 && value <= Integer{std::numeric_limits<std::int64_t>::max() / 4};
        }

        auto satisfies_all(const Formula & formula, const Valuation & v) -> bool
        {
            for (const auto & c : formula.constraints)
                if (! is_satisfied(v, c))
                    return false;
            return true;
        }

        /// Depth-first search from the highest variable down, false before true, over int64 copies
        /// of the constraints. Each constraint tracks the largest sum still reachable.
        class Search
        {
        public:
            Search(const Formula & formula, size_t n) :
                _n(n),
                _occurrences(n + 1)
            {
                for (size_t i = 0; i < formula.constraints.size(); ++i) {
                    const auto & c = formula.constraints[i];
                    std::int64_t total = 0;
                    for (const auto & t : c.terms) {
                        auto a = t.coefficient.convert_to<std::int64_t>();
                        total += a;
                        _occurrences[t.literal.var()].push_back(Occurrence{i, a, t.literal.is_negative()});
                    }
                    _reachable.push_back(total);
                    _degree.push_back(c.degree.convert_to<std::int64_t>());
                    if (total < _degree.back())
                        _violated = true;
                }
            }

            auto run() -> std::optional<Valuation>
            {
                if (_violated)
                    return std::nullopt;
                _values.assign(_n + 1, false);
                if (! descend(_n))
                    return std::nullopt;
                Valuation v;
                for (size_t x = 1; x <= _n; ++x)
                    v.set(static_cast<Variable>(x), _values[x]);
                return v;
            }

            uint64_t visited = 0;

        private:
            struct Occurrence
            {
                size_t constraint;
                std::int64_t coefficient;
                bool negative;
            };

            auto descend(size_t var) -> bool
            {
                ++visited;
                if (var == 0)
                    return true;
                for (bool value : {false, true}) {
                    _values[var] = value;
                    bool ok = true;
                    size_t applied = 0;
                    const auto & occ = _occurrences[var];
                    for (; applied < occ.size(); ++applied) {
                        const auto & o = occ[applied];
                        if (o.negative == value) {
                            _reachable[o.constraint] -= o.coefficient;
                            if (_reachable[o.constraint] < _degree[o.constraint]) {
                                ++applied;
                                ok = false;
                                break;
                            }
                        }
                    }
                    if (ok && descend(var - 1))
                        return true;
                    for (size_t i = 0; i < applied; ++i)
                        if (occ[i].negative == value)
                            _reachable[occ[i].constraint] += occ[i].coefficient;
                }
                return false;
            }

            size_t _n;
            vector<vector<Occurrence>> _occurrences;
            vector<std::int64_t> _reachable;
            vector<std::int64_t> _degree;
            vector<bool> _values;
            bool _violated = false;
        };
    }

    auto enumerate_sat(const Formula & formula, size_t var_limit) -> OracleResult
    {
        OracleResult result;
        size_t n = formula.num_variables();
        result.variables = n;
        if (n > var_limit || n >= 63)
            return result;

        for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
            Valuation v;
            for (size_t x = 1; x <= n; ++x)
                v.set(static_cast<Variable>(x), (mask >> (x - 1)) & 1);
            ++result.assignments;
            if (satisfies_all(formula, v)) {
                result.status = OracleStatus::Sat;
                result.valuation = std::move(v);
                return result;
            }
        }
        result.status = OracleStatus::Unsat;
        return result;
    }

    auto brute_force_sat(const Formula & formula, size_t var_limit) -> OracleResult
    {
        size_t n = formula.num_variables();
        if (n > var_limit)
            return OracleResult{OracleStatus::TooLarge, std::nullopt, n, 0};

        for (const auto & c : formula.constraints) {
            Integer total = coeff_sum(c.terms);
            if (! fits(total) || ! fits(c.degree))
                return enumerate_sat(formula, var_limit);
        }

        OracleResult result;
        result.variables = n;
        Search search{formula, n};
        auto found = search.run();
        result.assignments = search.visited;
        if (found) {
            if (! satisfies_all(formula, *found))
                throw Error{"oracle produced a valuation that violates the formula"};
            result.status = OracleStatus::Sat;
            result.valuation = std::move(found);
        }
        else
            result.status = OracleStatus::Unsat;
        return result;
    }

    namespace
    {
        /// Maximum clique in the complement graph, with a greedy colouring bound.
        class CliqueSearch
        {
        public:
            explicit CliqueSearch(vector<uint64_t> neighbours) : _neighbours(std::move(neighbours)) {}

            auto run(uint64_t all) -> uint64_t
            {
                expand(0, 0, all);
                return _best;
            }

        private:
            auto expand(uint64_t current, size_t size, uint64_t candidates) -> void
            {
                vector<size_t> order;
                vector<size_t> bound;
                colour(candidates, order, bound);
                for (size_t i = order.size(); i-- > 0;) {
                    if (size + bound[i] <= _best_size)
                        return;
                    size_t v = order[i];
                    uint64_t next = candidates & _neighbours[v];
                    uint64_t with = current | (uint64_t{1} << v);
                    if (next == 0) {
                        if (size + 1 > _best_size) {
                            _best_size = size + 1;
                            _best = with;
                        }
                    }
                    else
                        expand(with, size + 1, next);
                    candidates &= ~(uint64_t{1} << v);
                }
            }

            auto colour(uint64_t candidates, vector<size_t> & order, vector<size_t> & bound) const -> void
            {
                size_t colour = 0;
                while (candidates) {
                    ++colour;
                    uint64_t uncoloured = candidates;
                    while (uncoloured) {
                        size_t v = static_cast<size_t>(std::countr_zero(uncoloured));
                        uncoloured &= ~(uint64_t{1} << v);
                        uncoloured &= ~_neighbours[v];
                        candidates &= ~(uint64_t{1} << v);
                        order.push_back(v);
                        bound.push_back(colour);
                    }
                }
            }

            vector<uint64_t> _neighbours;
            uint64_t _best = 0;
            size_t _best_size = 0;
        };
    }

    auto max_independent_set(const Graph & g, size_t limit) -> IndependentSetResult
    {
        if (g.n > limit || g.n > 64)
            throw InvalidInstance{"graph has " + std::to_string(g.n) + " vertices, above the limit of " + std::to_string(std::min<size_t>(limit, 64))};
        if (g.n == 0)
            return {};

        uint64_t all = g.n == 64 ? ~uint64_t{0} : (uint64_t{1} << g.n) - 1;
        vector<uint64_t> non_adjacent(g.n, all);
        for (size_t v = 0; v < g.n; ++v)
            non_adjacent[v] &= ~(uint64_t{1} << v);
        for (auto [u, v] : g.edges) {
            non_adjacent[u] &= ~(uint64_t{1} << v);
            non_adjacent[v] &= ~(uint64_t{1} << u);
        }

        uint64_t best = CliqueSearch{non_adjacent}.run(all);
        IndependentSetResult result;
        for (size_t v = 0; v < g.n; ++v)
            if (best >> v & 1)
                result.vertices.push_back(v);
        result.size = result.vertices.size();
        return result;
    }
}
