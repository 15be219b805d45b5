#include <pbforge/errors.hh>

namespace pbforge
{
    namespace
    {
        auto format_location(const std::string & message, std::size_t line, std::size_t column) -> std::string
        {
            std::string result = "line " + std::to_string(line);
            if (column != 0)
                result += ", column " + std::to_string(column);
            return result + ": " + message;
        }
    }

    ParseError::ParseError(const std::string & message, std::size_t line, std::size_t column) :
        Error(format_location(message, line, column)),
        _message(message),
        _line(line),
        _column(column)
    {
    }
}
