#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asgkit {

// Half-open character span into the source text.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const SourceSpan&) const = default;
};

struct LineCol {
    std::size_t line = 1;
    std::size_t column = 1;
};

LineCol line_col_at(const std::string& text, std::size_t offset);

enum class ErrorCode {
    // model building / validation
    UnknownType,
    DuplicateElementName,
    MalformedElement,
    ModelFileError,
    // lexing / parsing
    LexError,
    SyntaxError,
    AmbiguityError,
    FreeOrderTooLarge,
    // instantiation
    UnresolvedReference,
    ConstraintViolation,
    // evaluation
    NextOutsideInvocation,
    NegativeParam,
    EvalError,
    // cli
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, SourceSpan span = {})
        : std::runtime_error(std::move(message)), code_(code), span_(span) {}

    ErrorCode code() const { return code_; }
    SourceSpan span() const { return span_; }

private:
    ErrorCode code_;
    SourceSpan span_;
};

}  // namespace asgkit
