#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpfilter {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite value handed to an exact evaluator (oracle, exact stages).
class invalid_input_error : public error
{
public:
    using error::error;
};

class parse_error : public error
{
public:
    parse_error(const std::string& message, std::size_t position)
        : error(message + " (at position " + std::to_string(position) + ")")
        , m_position(position)
    {}

    std::size_t position() const noexcept { return m_position; }

private:
    std::size_t m_position;
};

/// Raised when an error-bound derivation cannot produce a valid result.
class derivation_error : public error
{
public:
    using error::error;
};

class invalid_bounds_error : public error
{
public:
    using error::error;
};

class pipeline_error : public error
{
public:
    using error::error;
};

} // namespace fpfilter
