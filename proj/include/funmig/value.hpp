#pragma once

#include <string>
#include <vector>

#include "funmig/literal.hpp"

namespace funmig {

// An attribute value: a literal, a labelled null (a named unknown that
// behaves like a variable), or a symbolic application of a UDF to
// arguments at least one of which contains a null.
struct Value {
    enum class Kind { Lit, Null, Term };

    Kind kind = Kind::Lit;
    Literal lit;              // Kind::Lit
    std::string label;        // Kind::Null, without the '?' sigil
    std::string fn;           // Kind::Term
    std::vector<Value> args;  // Kind::Term
    BaseType type = BaseType::String;

    static Value make_lit(Literal v);
    static Value make_null(std::string label, BaseType t);
    static Value make_term(std::string fn, std::vector<Value> args, BaseType ret);

    bool is_lit() const { return kind == Kind::Lit; }
    bool is_null() const { return kind == Kind::Null; }
    bool is_term() const { return kind == Kind::Term; }
    bool contains_null() const;

    // "520", "?n1", "!json_extract(?n1,"encut")"
    std::string to_string() const;

    // Syntactic equality (label-exact, no congruence).
    friend bool operator==(const Value&, const Value&);
    bool operator<(const Value& o) const;
};

} // namespace funmig
