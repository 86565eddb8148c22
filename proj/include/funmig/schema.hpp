#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "funmig/diag.hpp"
#include "funmig/literal.hpp"

namespace funmig {

// Foreign key: a generating arrow between two entities.
struct FkDecl {
    std::string name;
    std::string src;
    std::string dst;

    friend bool operator==(const FkDecl&, const FkDecl&) = default;
};

// Attribute: an arrow from an entity into a base type.
struct AttrDecl {
    std::string name;
    std::string src;
    BaseType type = BaseType::String;

    friend bool operator==(const AttrDecl&, const AttrDecl&) = default;
};

// A word of generators starting at `start`. All steps are foreign keys,
// except the final step which may be an attribute. Empty steps = the
// identity path at `start`.
struct Path {
    std::string start;
    std::vector<std::string> steps;

    bool is_identity() const { return steps.empty(); }
    std::string to_string() const; // "Reaction . rev . rev", identity "Reaction . id"

    friend bool operator==(const Path&, const Path&) = default;
    friend auto operator<=>(const Path&, const Path&) = default;
};

struct Equation {
    Path lhs;
    Path rhs;
    std::string label; // optional, may be empty

    std::string to_string() const;

    friend bool operator==(const Equation&, const Equation&) = default;
};

// Codomain of a well-typed path: either an entity or a base type.
struct PathType {
    bool is_attr = false;
    std::string entity;          // codomain entity for fk paths; source entity of final attr otherwise
    BaseType type = BaseType::String; // meaningful when is_attr

    friend bool operator==(const PathType&, const PathType&) = default;
};

// A finitely presented category: entities as objects, fks as generating
// arrows, path equations as relations; attributes map into base types.
// Immutable after elaboration.
struct Schema {
    std::string name;
    std::vector<std::string> entities;
    std::vector<FkDecl> fks;
    std::vector<AttrDecl> attrs;
    std::vector<Equation> equations; // declaration order is significant (chase firing order)

    bool has_entity(const std::string& e) const;
    const FkDecl* find_fk(const std::string& src, const std::string& name) const;
    const AttrDecl* find_attr(const std::string& src, const std::string& name) const;
    std::vector<const FkDecl*> fks_from(const std::string& src) const;
    std::vector<const AttrDecl*> attrs_of(const std::string& src) const;
    // Generators of an entity in declaration order, fks before attrs.
    std::vector<std::string> generator_names(const std::string& entity) const;

    // Structural equality: entity/fk/attr sets (order-insensitive),
    // equation list order-sensitive.
    bool structurally_equal(const Schema& other) const;
};

using SchemaPtr = std::shared_ptr<const Schema>;

// Walks the path through the schema. Throws EngineError(TypeMismatch)
// if a step does not exist or follows an attribute.
PathType type_of_path(const Schema& s, const Path& p);

// nullopt instead of throwing.
std::optional<PathType> try_type_of_path(const Schema& s, const Path& p);

// Entity reached after the first `i` steps (requires all of them fks).
std::string entity_at(const Schema& s, const Path& p, size_t i);

// Concatenation. The codomain of p must be an entity equal to q.start.
Path compose(const Schema& s, const Path& p, const Path& q);

// All Schema invariants as diagnostics; empty result = well-formed.
std::vector<Diagnostic> validate_schema(const Schema& s);

} // namespace funmig
