#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "funmig/attrexpr.hpp"
#include "funmig/prover.hpp"
#include "funmig/schema.hpp"
#include "funmig/udf.hpp"

namespace funmig {

using GenKey = std::pair<std::string, std::string>; // (entity, generator)

// Extra attribute assignment for sigma migration: a target attribute
// populated from an expression over the *source* schema, evaluated on
// each source row whose entity maps into the binding's target entity.
// Covers database-wide implicit constants and extraction functions that
// have no source-side attribute to hang off.
struct TargetBinding {
    std::string target_entity;
    std::string target_attr;
    AttrExpr expr; // paths start in the source schema
};

// A schema mapping: entities to entities, fks to entity-valued paths,
// attrs to attribute expressions. Structure-preserving by validation
// (check_mapping), not by construction.
struct Mapping {
    std::string name;
    SchemaPtr source;
    SchemaPtr target;
    std::map<std::string, std::string> entity_map;
    std::map<GenKey, Path> fk_map;
    std::map<GenKey, AttrExpr> attr_map;
    std::vector<TargetBinding> bindings;

    bool is_identity() const;
};

Mapping identity_mapping(SchemaPtr s);

// Totality and typing of all components; empty result = well-formed.
std::vector<Diagnostic> validate_mapping(const Mapping& f, const udf::Registry& reg);

// Functorial image of an entity-valued path: identity to identity,
// composition to composition of images. Throws TypeMismatch if p is
// ill-typed or attribute-valued, IllFormedMapping if components are missing.
Path translate_path(const Mapping& f, const Path& p);

// Image of an attribute-ending path: the fk prefix translates through
// fk_map, the final attribute substitutes its AttrExpr.
AttrExpr translate_attr_path(const Mapping& f, const Path& p);

// Recursive image of a whole attribute expression.
AttrExpr translate_attr_expr(const Mapping& f, const AttrExpr& e);

struct EquationOutcome {
    Equation source_eq;
    std::string translated_lhs;
    std::string translated_rhs;
    ProofResult proof;
};

struct ValidationReport {
    enum class Overall { Valid, Rejected, Inconclusive };

    Overall verdict = Overall::Valid;
    std::vector<EquationOutcome> entries; // one per source equation, declaration order
    bool strict = true;
    int depth_bound = kDefaultDepthBound;

    // Labels of equations that did not prove, in declaration order.
    std::vector<std::string> unproved_labels() const;
};

std::string overall_name(ValidationReport::Overall v);

// Checks that the mapping preserves every source equation, by proving
// each translated equation in the target schema. Throws
// EngineError(IllFormedMapping) with the first totality/typing failure
// before any proving. Strict mode treats NotProvableWithinBound as
// rejection (fail closed); permissive mode downgrades it to Inconclusive.
ValidationReport check_mapping(const Mapping& f, int depth_bound = kDefaultDepthBound,
                               bool strict = true,
                               const udf::Registry& reg = udf::Registry::builtins());

// Functor composition: apply f then g. Sigma-only target bindings do not
// compose in general; composing two binding-carrying mappings throws
// IllFormedMapping unless one side is an identity.
Mapping compose_mappings(const Mapping& f, const Mapping& g);

} // namespace funmig
