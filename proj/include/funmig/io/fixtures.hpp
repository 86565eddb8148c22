#pragma once

#include <map>
#include <string>
#include <vector>

namespace funmig::io {

// A shippable example project: DSL files plus optional CSV bundles.
struct FixtureProject {
    std::string name;
    std::vector<std::string> fql_files;            // absolute paths
    std::map<std::string, std::string> csv_bundles; // bundle name -> dir
};

// The fixture library under <root>/: rxnnet (reaction networks with
// rejected mappings), chem_olog (structure/species ontology),
// oqmd_catalysis (materials-database migration and merge), surface
// (schema only). Throws EngineError(IoError) if the root is missing.
std::map<std::string, FixtureProject> fixtures(const std::string& root);

} // namespace funmig::io
