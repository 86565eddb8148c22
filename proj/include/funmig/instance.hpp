#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "funmig/congruence.hpp"
#include "funmig/schema.hpp"
#include "funmig/udf.hpp"
#include "funmig/value.hpp"

namespace funmig {

// Result of evaluating a path on a row: a row of the codomain entity,
// or a value for attribute-ending paths.
using PathResult = std::variant<std::string, Value>;

struct Violation {
    std::string eq_label;
    std::string entity;
    std::string row;
    std::string lhs;
    std::string rhs;
};

struct ViolationReport {
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
};

// Instance data over a schema. Rows are opaque ids scoped per entity;
// fk assignments are total; attr values may be literals, labelled nulls
// or symbolic terms. A value type: copies are independent.
struct Instance {
    std::string name;
    SchemaPtr schema;

    // entity -> row ids in insertion order
    std::map<std::string, std::vector<std::string>> rows;
    // (entity, row, fk) -> target row
    std::map<std::tuple<std::string, std::string, std::string>, std::string> fk;
    // (entity, row, attr) -> value
    std::map<std::tuple<std::string, std::string, std::string>, Value> attr;

    CongruenceClosure nulls;

    // (entity, row) -> "src:<db>:<entity>:<id>" lineage for migrated rows
    std::map<std::pair<std::string, std::string>, std::string> lineage;

    bool has_row(const std::string& entity, const std::string& id) const;
    const std::string& fk_of(const std::string& entity, const std::string& row,
                             const std::string& fk_name) const;
    const Value& attr_of(const std::string& entity, const std::string& row,
                         const std::string& attr_name) const;
    size_t row_count() const;

    // Exact structural comparison modulo row order: same row sets,
    // same assignments, same null labels.
    bool structurally_equal(const Instance& other) const;
};

// Folds fk assignments over the path's fk steps, then applies the final
// attr step if present. Identity path returns the row itself.
PathResult evaluate_path(const Instance& inst, const std::string& row, const Path& p);

// Evaluates every equation on every row of its start entity. Values
// compare by literal equality (floats within float_tol), rows by
// identity, nulls by their equivalence classes, terms by congruence.
ViolationReport check_instance(const Instance& inst, double float_tol = 0.0);

// Merges the equivalence classes of a and b and propagates congruence.
// On Contradiction the input instance is returned unchanged by virtue of
// value semantics: this throws before mutating `inst`'s copy is returned.
Instance equate_nulls(const Instance& inst, const Value& a, const Value& b);

// Incremental construction with diagnostics instead of exceptions.
// Unassigned attrs default to fresh labelled nulls at finalize;
// unassigned fks are an error at finalize.
class InstanceBuilder {
public:
    InstanceBuilder(SchemaPtr schema, std::string instance_name,
                    const udf::Registry* registry = nullptr);

    InstanceBuilder& add_row(const std::string& entity, const std::string& id);
    InstanceBuilder& set_fk(const std::string& entity, const std::string& row,
                            const std::string& fk_name, const std::string& target_row);
    InstanceBuilder& set_attr(const std::string& entity, const std::string& row,
                              const std::string& attr_name, Value v);
    InstanceBuilder& set_lineage(const std::string& entity, const std::string& row,
                                 const std::string& provenance);

    // Carries over null equivalence classes from a source instance so
    // migrated values keep their equations.
    InstanceBuilder& seed_nulls(const CongruenceClosure& c);

    // Fresh deterministic label "?<entity>_<generator>_<counter>",
    // skipping labels already in use.
    Value fresh_null(const std::string& entity, const std::string& generator, BaseType t);

    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

    // Referential integrity check happens here (DanglingForeignKey).
    // Returns nullopt and extends diagnostics() on failure.
    std::optional<Instance> finalize();

private:
    void note_labels(const Value& v);

    Instance inst_;
    const udf::Registry* registry_;
    std::vector<Diagnostic> diags_;
    std::map<std::string, int> null_counters_;
    std::set<std::string> used_labels_;
};

} // namespace funmig
