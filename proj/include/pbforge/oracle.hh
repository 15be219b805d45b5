#ifndef PBFORGE_GUARD_PBFORGE_ORACLE_HH
#define PBFORGE_GUARD_PBFORGE_ORACLE_HH

#include <pbforge/encodings.hh>
#include <pbforge/opb.hh>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbforge
{
    enum class OracleStatus
    {
        Sat,
        Unsat,
        TooLarge
    };

    struct OracleResult
    {
        OracleStatus status = OracleStatus::TooLarge;
        /// Set for Sat: the first satisfying valuation in enumeration order.
        std::optional<Valuation> valuation;
        std::size_t variables = 0;
        /// Complete or partial assignments visited.
        std::uint64_t assignments = 0;
    };

    [[nodiscard]] auto to_string(OracleStatus status) -> std::string;

    /// Exhaustive satisfiability over variables 1..N, N = formula.num_variables(). Valuations are
    /// ordered as binary counters with x1 the least significant bit and false before true, and
    /// the first satisfying one is returned. Partial assignments that already violate a
    /// constraint are pruned, which never changes the answer. TooLarge if N > var_limit.
    auto brute_force_sat(const Formula & formula, std::size_t var_limit = 25) -> OracleResult;

    /// The same search without pruning: visits every full valuation.
    auto enumerate_sat(const Formula & formula, std::size_t var_limit = 25) -> OracleResult;

    struct IndependentSetResult
    {
        std::size_t size = 0;
        std::vector<std::size_t> vertices;
    };

    /// Exact maximum independent set by branch and bound. Throws InvalidInstance if n > limit.
    auto max_independent_set(const Graph & g, std::size_t limit = 40) -> IndependentSetResult;
}

#endif
