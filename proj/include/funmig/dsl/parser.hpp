#pragma once

#include <string>
#include <vector>

#include "funmig/dsl/ast.hpp"

namespace funmig::dsl {

struct ParseResult {
    std::vector<Declaration> decls;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

// Parses one file's worth of text. Keywords are reserved and lowercase;
// comments run from '--' to end of line; LF and CRLF both accepted.
ParseResult parse(const std::string& text, const std::string& file = "<input>");

} // namespace funmig::dsl
