#ifndef PBFORGE_GUARD_PBFORGE_ERRORS_HH
#define PBFORGE_GUARD_PBFORGE_ERRORS_HH

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbforge
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// An inference rule was applied with arguments that do not justify its conclusion.
    class RuleViolation : public Error
    {
    public:
        using Error::Error;
    };

    /// Malformed OPB or proof text. Line and column are 1-based; 0 means unknown.
    class ParseError : public Error
    {
    public:
        ParseError(const std::string & message, std::size_t line, std::size_t column = 0);

        [[nodiscard]] auto line() const noexcept -> std::size_t { return _line; }
        [[nodiscard]] auto column() const noexcept -> std::size_t { return _column; }
        [[nodiscard]] auto message() const -> const std::string & { return _message; }

    private:
        std::string _message;
        std::size_t _line;
        std::size_t _column;
    };

    class InvalidInstance : public Error
    {
    public:
        using Error::Error;
    };

    class InvalidWitness : public Error
    {
    public:
        using Error::Error;
    };
}

#endif
