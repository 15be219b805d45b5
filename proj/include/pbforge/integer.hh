#ifndef PBFORGE_GUARD_PBFORGE_INTEGER_HH
#define PBFORGE_GUARD_PBFORGE_INTEGER_HH

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace pbforge
{
    /// Coefficients and degrees are unbounded. Small values stay inline (no allocation).
    using Integer = boost::multiprecision::cpp_int;

    /// a - b, floored at zero.
    inline auto saturating_sub(const Integer & a, const Integer & b) -> Integer
    {
        return a > b ? Integer{a - b} : Integer{0};
    }

    /// ceil(a / k) for a >= 0, k >= 1.
    inline auto ceil_div(const Integer & a, const Integer & k) -> Integer
    {
        return (a + k - 1) / k;
    }

    /// Parses an optionally signed decimal integer. Returns nullopt on anything else.
    auto parse_integer(std::string_view text) -> std::optional<Integer>;

    auto to_string(const Integer & value) -> std::string;
}

#endif
