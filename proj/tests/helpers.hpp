#pragma once

#include <string>
#include <vector>

#include "funmig/dsl/elaborate.hpp"
#include "funmig/instance.hpp"
#include "funmig/mapping.hpp"

#ifndef FUNMIG_FIXTURES_DIR
#define FUNMIG_FIXTURES_DIR "fixtures"
#endif

namespace testutil {

inline std::string fixture_path(const std::string& rel) {
    return std::string(FUNMIG_FIXTURES_DIR) + "/" + rel;
}

inline funmig::dsl::ElaboratedSet load_fixture(const std::vector<std::string>& rels) {
    std::vector<std::string> paths;
    for (const auto& r : rels) paths.push_back(fixture_path(r));
    auto result = funmig::dsl::load_files(paths);
    if (!result.ok()) {
        std::string msg = "fixture load failed:";
        for (const auto& d : result.diagnostics) msg += "\n  " + d.to_string();
        throw std::runtime_error(msg);
    }
    return std::move(result.set);
}

// Reaction-network schema A, built programmatically (independent of the
// DSL fixtures).
inline funmig::SchemaPtr rxn_schema_a() {
    auto s = std::make_shared<funmig::Schema>();
    s->name = "A";
    s->entities = {"Reaction", "Simulation"};
    s->fks = {{"rev", "Reaction", "Reaction"},
              {"sim", "Reaction", "Simulation"},
              {"rds", "Simulation", "Reaction"}};
    s->equations = {
        {{"Reaction", {"rev", "sim"}}, {"Reaction", {"sim"}}, "A1"},
        {{"Simulation", {"rds", "sim"}}, {"Simulation", {}}, "A2"},
        {{"Reaction", {"rev", "rev"}}, {"Reaction", {}}, "A3"},
    };
    return s;
}

// The valid 3-reaction / 2-simulation sample on schema A.
inline funmig::Instance rxn_sample_a() {
    auto s = rxn_schema_a();
    funmig::InstanceBuilder b(s, "sample_a");
    for (const char* id : {"1", "2", "3"}) b.add_row("Reaction", id);
    for (const char* id : {"1", "2"}) b.add_row("Simulation", id);
    b.set_fk("Reaction", "1", "rev", "2");
    b.set_fk("Reaction", "2", "rev", "1");
    b.set_fk("Reaction", "3", "rev", "3");
    b.set_fk("Reaction", "1", "sim", "1");
    b.set_fk("Reaction", "2", "sim", "1");
    b.set_fk("Reaction", "3", "sim", "2");
    b.set_fk("Simulation", "1", "rds", "1");
    b.set_fk("Simulation", "2", "rds", "3");
    auto inst = b.finalize();
    if (!inst) throw std::runtime_error("rxn_sample_a failed to build");
    return *inst;
}

inline funmig::Instance strip_lineage(funmig::Instance i) {
    i.lineage.clear();
    return i;
}

} // namespace testutil
