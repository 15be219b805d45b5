#ifndef PBFORGE_GUARD_PBFORGE_OPB_HH
#define PBFORGE_GUARD_PBFORGE_OPB_HH

#include <pbforge/pbcore.hh>

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pbforge
{
    /// A constraint set loaded from OPB. Constraint ids are positions, starting at 1.
    struct Formula
    {
        std::vector<Constraint> constraints;
        std::size_t declared_vars = 0;
        std::size_t declared_constraints = 0;

        /// Free-text lines emitted as OPB comments after the header. Not part of equality.
        std::vector<std::string> comments;
        /// Non-fatal parse diagnostics. Not part of equality.
        std::vector<std::string> warnings;

        /// Larger of the declared count and the highest variable index used.
        [[nodiscard]] auto num_variables() const -> std::size_t;

        /// Same constraints in the same order over the same number of variables.
        auto operator==(const Formula & other) const -> bool;
    };

    struct OpbOptions
    {
        /// Header count mismatches become errors instead of warnings.
        bool strict = false;
    };

    /// Accepts ">=", "=" and "<=" constraints. Negative coefficients are rewritten onto the
    /// complementary literal, and each equality becomes two ">=" constraints (the original
    /// followed by its opposite sense). Every stored constraint is normalized.
    auto parse_opb(std::string_view text, const OpbOptions & options = {}) -> Formula;
    auto read_opb_file(const std::filesystem::path & path, const OpbOptions & options = {}) -> Formula;

    auto serialize_opb(const Formula & formula) -> std::string;

    /// Builds a normalized ">=" constraint from signed coefficients and a signed degree.
    auto make_geq(const std::vector<std::pair<Integer, Literal>> & signed_terms, const Integer & degree) -> Constraint;
}

#endif
