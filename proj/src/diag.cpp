#include "funmig/diag.hpp"

namespace funmig {

std::string Span::to_string() const {
    if (!valid()) return file.empty() ? "<none>" : file;
    return file + ":" + std::to_string(line) + ":" + std::to_string(col);
}

std::string Diagnostic::to_string() const {
    std::string out;
    if (span.valid() || !span.file.empty()) out += span.to_string() + ": ";
    out += code;
    if (!message.empty()) out += ": " + message;
    return out;
}

} // namespace funmig
