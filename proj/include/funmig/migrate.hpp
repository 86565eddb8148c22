#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funmig/instance.hpp"
#include "funmig/mapping.hpp"

namespace funmig {

struct ChaseConfig {
    int max_fresh_rows = 10000;
    int max_rounds = 1000;
};

// Overlap-based merge specification: an overlap schema, two mappings out
// of it, and per-entity identifying keys for record linkage.
struct MergeSpec {
    std::string name;
    SchemaPtr overlap;
    Mapping left;  // overlap -> S1
    Mapping right; // overlap -> S2
    // overlap entity -> identifying attribute paths on that entity
    std::map<std::string, std::vector<Path>> keys;
};

struct MergeResult {
    SchemaPtr merged_schema;
    Instance instance;
    Mapping left_inclusion;  // S1 -> merged
    Mapping right_inclusion; // S2 -> merged
};

// Pullback along f: rows of source entity X are the rows of J at
// entity_map(X); fks evaluate the fk_map path on J; attrs evaluate their
// AttrExpr. Requires check_mapping(f) Valid and J clean.
Instance delta(const Mapping& f, const Instance& j,
               const udf::Registry& reg = udf::Registry::builtins());

// Chase-based left Kan extension: copies rows forward, creates fresh
// labelled-null rows and values for target structure not covered by f,
// then chases target equations to quotient the result. Free solution:
// structurally identical fresh rows are not merged.
Instance sigma(const Mapping& f, const Instance& i, const ChaseConfig& cfg = {},
               const udf::Registry& reg = udf::Registry::builtins());

// Pushout merge: the union of both schemas with overlap-identified
// entities/generators/equations, inclusion mappings, and the disjoint
// union of the sigma images with overlap rows identified when all
// identifying key values compare equal as non-null literals.
MergeResult merge(const MergeSpec& spec, const Instance& i1, const Instance& i2,
                  const ChaseConfig& cfg = {},
                  const udf::Registry& reg = udf::Registry::builtins());

// Conjunction of attribute comparisons against literals.
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct AttrPredicate {
    std::string attr;
    CmpOp op = CmpOp::Eq;
    Literal rhs;
};

std::string cmp_op_name(CmpOp op);
std::optional<CmpOp> cmp_op_from_name(const std::string& s);

struct FilterSpec {
    std::string name;
    std::string instance_schema; // schema the filter applies to
    std::string entity;
    std::vector<AttrPredicate> conjuncts;
};

// Keeps rows of `entity` satisfying every conjunct, then cascades
// removal through inbound fk references so the result stays
// referentially intact. Null or symbolic key values never satisfy a
// comparison.
Instance filter(const Instance& inst, const std::string& entity,
                const std::vector<AttrPredicate>& conjuncts);

} // namespace funmig
