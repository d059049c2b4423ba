#pragma once

#include <stdexcept>
#include <string>

namespace biviso {

struct EmptyInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooLargeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    long line = 0;
    ParseError(const std::string& msg, long line_no)
        : std::runtime_error(msg), line(line_no) {}
};

}  // namespace biviso
