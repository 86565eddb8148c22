#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace funmig {

enum class BaseType { Int, Float, String, Bool };

std::string base_type_name(BaseType t);
std::optional<BaseType> base_type_from_name(const std::string& name);

// Variant index order matches BaseType.
using Literal = std::variant<std::int64_t, double, std::string, bool>;

BaseType literal_type(const Literal& v);

// Shortest round-trip form: 520.0 prints as "520", 0.1 as "0.1".
// Used everywhere a literal becomes text so outputs stay byte-stable.
std::string format_literal(const Literal& v);

// DSL form: strings quoted and escaped, other types as format_literal.
std::string quote_literal(const Literal& v);

// Parses the bare (unquoted) text of a cell as the given type.
// Returns nullopt if the text does not parse exactly.
std::optional<Literal> parse_literal(const std::string& text, BaseType t);

bool literal_equal(const Literal& a, const Literal& b, double float_tol = 0.0);

// Total order used for canonical output (sorting report rows etc).
bool literal_less(const Literal& a, const Literal& b);

std::string escape_string(const std::string& s);

} // namespace funmig
