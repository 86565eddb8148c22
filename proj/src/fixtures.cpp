#include "funmig/io/fixtures.hpp"

#include <filesystem>

#include "funmig/diag.hpp"

namespace funmig::io {

namespace fs = std::filesystem;

std::map<std::string, FixtureProject> fixtures(const std::string& root) {
    if (!fs::is_directory(root))
        throw EngineError(errc::IoError, "fixture root '" + root + "' is not a directory");
    auto file = [&](const std::string& rel) { return (fs::path(root) / rel).string(); };

    std::map<std::string, FixtureProject> out;

    FixtureProject rxnnet;
    rxnnet.name = "rxnnet";
    rxnnet.fql_files = {file("rxnnet/a.fql"), file("rxnnet/b.fql"), file("rxnnet/c.fql"),
                        file("rxnnet/mappings.fql")};
    rxnnet.csv_bundles = {{"valid_a", file("rxnnet/csv/valid_a")},
                          {"migrated_to_b", file("rxnnet/csv/migrated_to_b")},
                          {"migrated_to_c", file("rxnnet/csv/migrated_to_c")}};
    out["rxnnet"] = std::move(rxnnet);

    FixtureProject olog;
    olog.name = "chem_olog";
    olog.fql_files = {file("chem_olog/chem_olog.fql")};
    out["chem_olog"] = std::move(olog);

    FixtureProject oqmd;
    oqmd.name = "oqmd_catalysis";
    oqmd.fql_files = {file("oqmd_catalysis/oqmd_mini.fql"),
                      file("oqmd_catalysis/catalysis_mini.fql"),
                      file("oqmd_catalysis/mapping.fql"),
                      file("oqmd_catalysis/merge_elements.fql"),
                      file("oqmd_catalysis/merge_self.fql")};
    oqmd.csv_bundles = {{"oqmd_mini", file("oqmd_catalysis/csv/oqmd_mini")},
                        {"catalysis_mini", file("oqmd_catalysis/csv/catalysis_mini")}};
    out["oqmd_catalysis"] = std::move(oqmd);

    FixtureProject surface;
    surface.name = "surface";
    surface.fql_files = {file("surface/surface.fql")};
    out["surface"] = std::move(surface);

    return out;
}

} // namespace funmig::io
