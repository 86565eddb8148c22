#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "funmig/diag.hpp"
#include "funmig/literal.hpp"

namespace funmig::dsl {

struct PathSyntax {
    Span span;
    std::string start;
    std::vector<std::string> steps; // 'id' steps already dropped
};

// Attribute expression as written: resolution happens in the elaborator.
// NullLabel ('?x') is only legal in instance values.
struct ExprSyntax {
    enum class Kind { Path, Lit, Null, NullLabel, Apply };
    Kind kind = Kind::Null;
    Span span;
    PathSyntax path;
    Literal lit;
    std::string label;
    std::string fn;
    std::vector<ExprSyntax> args;
};

struct FkSyntax {
    Span span;
    std::string name, src, dst;
};

struct AttrSyntax {
    Span span;
    std::string name, src, type_name;
};

struct EquationSyntax {
    Span span;
    std::string label; // may be empty
    PathSyntax lhs, rhs;
};

struct SchemaDecl {
    Span span;
    std::string name;
    std::vector<std::pair<std::string, Span>> entities;
    std::vector<FkSyntax> fks;
    std::vector<AttrSyntax> attrs;
    std::vector<EquationSyntax> equations;
};

struct MappingEntrySyntax {
    Span span;
    // 'entity A -> B' | 'fk f -> path' | 'attr a -> expr';
    // fk/attr keys may be qualified: 'attr Structures . x0 -> ...'.
    enum class Kind { Entity, Fk, Attr } kind = Kind::Entity;
    std::string key_entity; // empty when unqualified
    std::string key;
    std::string entity_target; // Kind::Entity
    PathSyntax path_target;    // Kind::Fk
    ExprSyntax expr_target;    // Kind::Attr
};

struct MappingDecl {
    Span span;
    std::string name, source, target;
    std::vector<MappingEntrySyntax> entries;
};

struct RowAssignSyntax {
    Span span;
    std::string generator;
    // fk target row id, or attribute value (closed expression / ?label)
    enum class Kind { RowId, Expr, NullLabel } kind = Kind::RowId;
    std::string row_id;
    ExprSyntax expr;
    std::string null_label;
};

struct RowSyntax {
    Span span;
    std::string id;
    std::vector<RowAssignSyntax> assigns;
};

struct InstanceEntitySyntax {
    Span span;
    std::string entity;
    std::vector<RowSyntax> rows;
};

struct InstanceDecl {
    Span span;
    std::string name, schema;
    std::vector<InstanceEntitySyntax> entities;
};

struct MergeKeySyntax {
    Span span;
    std::string entity;
    std::vector<PathSyntax> paths;
};

struct MergeDecl {
    Span span;
    std::string name, overlap, left, right;
    std::vector<MergeKeySyntax> keys;
};

struct MigrateDecl {
    Span span;
    std::string name, mapping;
    std::string mode; // "delta" | "sigma"
};

struct FilterCondSyntax {
    Span span;
    std::string attr, op;
    Literal rhs;
};

struct FilterDecl {
    Span span;
    std::string name, schema, entity;
    std::vector<FilterCondSyntax> conds;
};

struct ImportDecl {
    Span span;
    std::string path;
};

using Declaration = std::variant<SchemaDecl, MappingDecl, InstanceDecl, MergeDecl,
                                 MigrateDecl, FilterDecl, ImportDecl>;

struct SourceFile {
    std::string path;
    std::string text;
    std::vector<Declaration> decls;
};

} // namespace funmig::dsl
