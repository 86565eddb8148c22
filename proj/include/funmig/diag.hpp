#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace funmig {

// Source position attached to DSL diagnostics. line/col are 1-based;
// a zero line means "no position" (programmatic construction).
struct Span {
    std::string file;
    int line = 0;
    int col = 0;

    bool valid() const { return line > 0 && col > 0; }
    std::string to_string() const;
};

// Machine-readable diagnostic. `code` is a stable identifier
// (e.g. "UnknownEntity"), `message` is for humans.
struct Diagnostic {
    std::string code;
    std::string message;
    Span span;

    std::string to_string() const;
};

// Stable error codes used across the engine.
namespace errc {
inline constexpr const char* TypeMismatch = "TypeMismatch";
inline constexpr const char* UnknownEntity = "UnknownEntity";
inline constexpr const char* UnknownGenerator = "UnknownGenerator";
inline constexpr const char* UnknownAttribute = "UnknownAttribute";
inline constexpr const char* UnknownFunction = "UnknownFunction";
inline constexpr const char* UnknownRow = "UnknownRow";
inline constexpr const char* DuplicateEntity = "DuplicateEntity";
inline constexpr const char* DuplicateGenerator = "DuplicateGenerator";
inline constexpr const char* DuplicateName = "DuplicateName";
inline constexpr const char* DuplicateDeclaration = "DuplicateDeclaration";
inline constexpr const char* DuplicateId = "DuplicateId";
inline constexpr const char* EquationEndpointMismatch = "EquationEndpointMismatch";
inline constexpr const char* UnresolvedName = "UnresolvedName";
inline constexpr const char* IllFormedMapping = "IllFormedMapping";
inline constexpr const char* SchemaMismatch = "SchemaMismatch";
inline constexpr const char* ArityMismatch = "ArityMismatch";
inline constexpr const char* EvaluationError = "EvaluationError";
inline constexpr const char* Contradiction = "Contradiction";
inline constexpr const char* DanglingForeignKey = "DanglingForeignKey";
inline constexpr const char* ChaseBudgetExceeded = "ChaseBudgetExceeded";
inline constexpr const char* KeyConflict = "KeyConflict";
inline constexpr const char* PreconditionFailed = "PreconditionFailed";
inline constexpr const char* HeaderMismatch = "HeaderMismatch";
inline constexpr const char* UnparsableLiteral = "UnparsableLiteral";
inline constexpr const char* IoError = "IoError";
inline constexpr const char* SyntaxError = "SyntaxError";
inline constexpr const char* AmbiguousName = "AmbiguousName";
} // namespace errc

// Thrown for violated preconditions and runtime failures. Flows that
// produce diagnostics as values (validate_schema, the elaborator, the
// instance builder) do not throw this.
class EngineError : public std::runtime_error {
public:
    EngineError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace funmig
