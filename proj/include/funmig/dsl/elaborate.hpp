#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "funmig/dsl/ast.hpp"
#include "funmig/instance.hpp"
#include "funmig/mapping.hpp"
#include "funmig/migrate.hpp"

namespace funmig::dsl {

struct ElaboratedSet {
    std::map<std::string, SchemaPtr> schemas;
    std::map<std::string, Mapping> mappings;
    std::map<std::string, Instance> instances;
    std::map<std::string, MergeSpec> merges;
    std::map<std::string, MigrateDecl> migrates;
    std::map<std::string, FilterSpec> filters;

    // Declaration order, for deterministic reporting.
    std::vector<std::pair<std::string, std::string>> order; // (kind, name)
};

struct ElaborationResult {
    ElaboratedSet set;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

// Name resolution, type checking and schema validation over a set of
// parsed files. Mappings are not equation-checked here; that is
// check_mapping's job.
ElaborationResult elaborate(const std::vector<SourceFile>& files,
                            const udf::Registry& registry = udf::Registry::builtins());

// Reads, parses and elaborates a file set, resolving 'import' paths
// relative to the importing file, with cycle detection.
ElaborationResult load_files(const std::vector<std::string>& paths,
                             const udf::Registry& registry = udf::Registry::builtins());

} // namespace funmig::dsl
