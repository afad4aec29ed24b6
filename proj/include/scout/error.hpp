#pragma once

#include <stdexcept>
#include <string>

namespace scout {

// Error taxonomy. The CLI maps these onto its exit-code contract
// (0 ok, 2 config, 3 schema/row, 4 missing upstream input).
enum class Errc {
    config,        // bad configuration key or value
    schema,        // CSV header violates the documented schema
    row,           // malformed row content (carries a line number)
    data,          // inputs violate a documented precondition
    unit,          // series carries the wrong unit tag
    insufficient,  // not enough data to evaluate
    alignment,     // series grids or time ranges do not line up
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& msg, long line_no = -1)
        : std::runtime_error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")"
                                          : msg),
          code(c),
          line(line_no) {}

    Errc code;
    long line;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg, long line_no = -1) {
    throw Error(c, msg, line_no);
}

}  // namespace scout
