#pragma once

#include <string>
#include <vector>

#include "funmig/schema.hpp"
#include "funmig/udf.hpp"

namespace funmig {

// Attribute-mapping expression: an attribute-ending path, a typed
// constant, a UDF application, or a labelled-null placeholder.
struct AttrExpr {
    enum class Kind { Path, Const, Apply, Null };

    Kind kind = Kind::Null;
    Path path;                  // Kind::Path (attribute-ending)
    Literal lit;                // Kind::Const
    std::string fn;             // Kind::Apply
    std::vector<AttrExpr> args; // Kind::Apply
    BaseType null_type = BaseType::String; // Kind::Null

    static AttrExpr make_path(Path p);
    static AttrExpr make_const(Literal v);
    static AttrExpr make_apply(std::string fn, std::vector<AttrExpr> args);
    static AttrExpr make_null(BaseType t);

    bool closed() const; // no Path leaves

    // 'Structure . cell_id . x0', '"VASP"', 'json_extract(Calculations . params, "encut")', 'null'
    std::string to_string() const;

    // Prefixes every path leaf with `prefix` (functorial substitution).
    AttrExpr prepend(const Schema& s, const Path& prefix) const;

    friend bool operator==(const AttrExpr&, const AttrExpr&);
};

// Result type of the expression in `schema`, where path leaves start at
// their own declared entities. Throws EngineError(TypeMismatch) on
// ill-typed expressions.
BaseType type_of_attr_expr(const Schema& schema, const udf::Registry& reg, const AttrExpr& e);

} // namespace funmig
