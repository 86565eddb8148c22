#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "funmig/dsl/elaborate.hpp"
#include "funmig/dsl/pretty.hpp"
#include "funmig/io/csv.hpp"
#include "funmig/migrate.hpp"

namespace fs = std::filesystem;
using funmig::EngineError;
using funmig::Instance;
using funmig::Mapping;
using funmig::SchemaPtr;
using funmig::ValidationReport;
using ordered_json = nlohmann::ordered_json;

namespace {

// Exit codes are part of the interface:
//   0 ok | 1 syntax/elaboration | 2 schema validation | 3 mapping rejected
//   4 mapping inconclusive | 5 chase budget / contradiction / key conflict
//   6 instance violations
enum ExitCode {
    kOk = 0,
    kSyntax = 1,
    kValidation = 2,
    kRejected = 3,
    kInconclusive = 4,
    kMigrationError = 5,
    kViolations = 6,
};

bool is_structural_code(const std::string& code) {
    using namespace funmig::errc;
    return code == UnknownEntity || code == DuplicateEntity || code == DuplicateGenerator ||
           code == EquationEndpointMismatch || code == TypeMismatch;
}

int default_depth() {
    if (const char* env = std::getenv("FUNMIG_DEPTH")) {
        int d = std::atoi(env);
        if (d > 0) return d;
    }
    return funmig::kDefaultDepthBound;
}

void print_diags(const std::vector<funmig::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << d.to_string() << "\n";
}

ordered_json diags_json(const std::vector<funmig::Diagnostic>& diags) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : diags) {
        ordered_json j;
        j["file"] = d.span.file;
        j["line"] = d.span.line;
        j["col"] = d.span.col;
        j["code"] = d.code;
        j["message"] = d.message;
        arr.push_back(std::move(j));
    }
    return arr;
}

int diags_exit_code(const std::vector<funmig::Diagnostic>& diags) {
    if (diags.empty()) return kOk;
    for (const auto& d : diags)
        if (!is_structural_code(d.code)) return kSyntax;
    return kValidation;
}

struct LoadedSet {
    funmig::dsl::ElaboratedSet set;
    std::vector<funmig::Diagnostic> diagnostics;
};

LoadedSet load(const std::vector<std::string>& files) {
    auto result = funmig::dsl::load_files(files);
    return {std::move(result.set), std::move(result.diagnostics)};
}

ordered_json report_json(const Mapping& f, const ValidationReport& report) {
    ordered_json j;
    j["command"] = "check-mapping";
    j["mapping"] = f.name;
    j["source"] = f.source->name;
    j["target"] = f.target->name;
    j["strict"] = report.strict;
    j["depth_bound"] = report.depth_bound;
    j["verdict"] = funmig::overall_name(report.verdict);
    ordered_json eqs = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json eq;
        eq["label"] = e.source_eq.label;
        eq["source"] = e.source_eq.lhs.to_string() + " = " + e.source_eq.rhs.to_string();
        eq["translated"] = e.translated_lhs + " = " + e.translated_rhs;
        eq["verdict"] = e.proof.provable() ? "Provable" : "NotProvableWithinBound";
        eq["rewrites"] = e.proof.trace.size();
        eqs.push_back(std::move(eq));
    }
    j["equations"] = std::move(eqs);
    return j;
}

void print_mapping_report(const Mapping& f, const ValidationReport& report, bool json) {
    if (json) {
        std::cout << report_json(f, report).dump(2) << "\n";
        return;
    }
    std::cout << "mapping " << f.name << " : " << f.source->name << " -> " << f.target->name
              << "\n";
    for (const auto& e : report.entries) {
        std::string label = e.source_eq.label.empty() ? "<unlabeled>" : e.source_eq.label;
        std::cout << "  " << label << " : " << e.source_eq.lhs.to_string() << " = "
                  << e.source_eq.rhs.to_string() << "\n";
        std::cout << "    translated: " << e.translated_lhs << " = " << e.translated_rhs << "\n";
        if (e.proof.provable())
            std::cout << "    verdict: Provable (" << e.proof.trace.size() << " rewrites)\n";
        else
            std::cout << "    verdict: NotProvableWithinBound\n";
    }
    std::cout << "verdict: " << funmig::overall_name(report.verdict) << "\n";
}

int mapping_exit_code(const ValidationReport& report) {
    switch (report.verdict) {
        case ValidationReport::Overall::Valid: return kOk;
        case ValidationReport::Overall::Rejected: return kRejected;
        case ValidationReport::Overall::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

// Buffered bundle write: nothing touches the output directory until the
// whole migration has succeeded.
void write_files(const std::string& dir, const std::map<std::string, std::string>& files) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw EngineError(funmig::errc::IoError, "cannot create '" + dir + "'");
    for (const auto& [name, content] : files) {
        fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw EngineError(funmig::errc::IoError, "cannot write '" + p.string() + "'");
        out << content;
    }
}

ordered_json bundle_json(const Instance& inst, const std::map<std::string, std::string>& files) {
    ordered_json j;
    ordered_json rows;
    for (const auto& [entity, ids] : inst.rows) rows[entity] = ids.size();
    j["rows"] = std::move(rows);
    ordered_json names = ordered_json::array();
    for (const auto& [name, _] : files) names.push_back(name);
    j["files"] = std::move(names);
    return j;
}

SchemaPtr resolve_schema(const funmig::dsl::ElaboratedSet& set, const std::string& name) {
    if (!name.empty()) {
        auto it = set.schemas.find(name);
        if (it == set.schemas.end())
            throw EngineError(funmig::errc::UnresolvedName, "no schema named '" + name + "'");
        return it->second;
    }
    if (set.schemas.size() != 1)
        throw EngineError(funmig::errc::UnresolvedName,
                          "the file set declares " + std::to_string(set.schemas.size()) +
                              " schemas; pick one with --schema");
    return set.schemas.begin()->second;
}

const Mapping& resolve_mapping(const funmig::dsl::ElaboratedSet& set, const std::string& name) {
    auto it = set.mappings.find(name);
    if (it == set.mappings.end())
        throw EngineError(funmig::errc::UnresolvedName, "no mapping named '" + name + "'");
    return it->second;
}

int cmd_check_schema(const std::vector<std::string>& files, bool json) {
    auto loaded = load(files);
    int code = diags_exit_code(loaded.diagnostics);
    print_diags(loaded.diagnostics);
    if (json) {
        ordered_json j;
        j["command"] = "check-schema";
        j["ok"] = loaded.diagnostics.empty();
        ordered_json schemas = ordered_json::array();
        for (const auto& [name, _] : loaded.set.schemas) schemas.push_back(name);
        j["schemas"] = std::move(schemas);
        j["diagnostics"] = diags_json(loaded.diagnostics);
        std::cout << j.dump(2) << "\n";
    } else if (loaded.diagnostics.empty()) {
        std::cout << "ok: " << loaded.set.schemas.size() << " schema(s)\n";
    }
    return code;
}

int cmd_check_mapping(const std::vector<std::string>& files, const std::string& mapping_name,
                      int depth, bool permissive, bool json) {
    auto loaded = load(files);
    if (!loaded.diagnostics.empty()) {
        print_diags(loaded.diagnostics);
        return kSyntax;
    }
    const Mapping& f = resolve_mapping(loaded.set, mapping_name);
    ValidationReport report = funmig::check_mapping(f, depth, !permissive);
    print_mapping_report(f, report, json);
    return mapping_exit_code(report);
}

int cmd_migrate(const std::vector<std::string>& files, const std::string& mapping_name,
                const std::string& mode, const std::string& data_dir, const std::string& out_dir,
                int depth, const funmig::ChaseConfig& cfg, bool json) {
    auto loaded = load(files);
    if (!loaded.diagnostics.empty()) {
        print_diags(loaded.diagnostics);
        return kSyntax;
    }
    const Mapping& f = resolve_mapping(loaded.set, mapping_name);

    // Fail closed before touching any data.
    ValidationReport report = funmig::check_mapping(f, depth, true);
    if (report.verdict != ValidationReport::Overall::Valid) {
        print_mapping_report(f, report, json);
        return mapping_exit_code(report);
    }

    SchemaPtr data_schema = mode == "sigma" ? f.source : f.target;
    Instance input = funmig::io::load_csv(data_dir, data_schema);
    Instance output = mode == "sigma" ? funmig::sigma(f, input, cfg) : funmig::delta(f, input);

    auto violations = funmig::check_instance(output);
    if (!violations.clean())
        throw EngineError(funmig::errc::Contradiction,
                          "migration output violates target constraints");

    auto rendered = funmig::io::render_csv(output);
    write_files(out_dir, rendered);
    if (json) {
        ordered_json j;
        j["command"] = "migrate";
        j["mapping"] = f.name;
        j["mode"] = mode;
        j.update(bundle_json(output, rendered));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "migrated " << input.row_count() << " row(s) -> " << output.row_count()
                  << " row(s) in " << rendered.size() << " file(s)\n";
    }
    return kOk;
}

int cmd_merge(const std::vector<std::string>& files, const std::string& spec_name,
              const std::string& left_dir, const std::string& right_dir,
              const std::string& out_dir, const funmig::ChaseConfig& cfg, bool json) {
    auto loaded = load(files);
    if (!loaded.diagnostics.empty()) {
        print_diags(loaded.diagnostics);
        return kSyntax;
    }
    auto it = loaded.set.merges.find(spec_name);
    if (it == loaded.set.merges.end())
        throw EngineError(funmig::errc::UnresolvedName, "no merge named '" + spec_name + "'");
    const funmig::MergeSpec& spec = it->second;

    Instance left = funmig::io::load_csv(left_dir, spec.left.target);
    Instance right = funmig::io::load_csv(right_dir, spec.right.target);
    funmig::MergeResult result = funmig::merge(spec, left, right, cfg);

    auto violations = funmig::check_instance(result.instance);
    if (!violations.clean())
        throw EngineError(funmig::errc::Contradiction,
                          "merge output violates merged-schema constraints");

    auto rendered = funmig::io::render_csv(result.instance);
    rendered["schema.fql"] = funmig::dsl::pretty_print(*result.merged_schema);
    write_files(out_dir, rendered);
    if (json) {
        ordered_json j;
        j["command"] = "merge";
        j["spec"] = spec.name;
        j["schema"] = result.merged_schema->name;
        j.update(bundle_json(result.instance, rendered));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "merged into " << result.instance.row_count() << " row(s) across "
                  << result.instance.rows.size() << " entit(ies)\n";
    }
    return kOk;
}

int cmd_check_instance(const std::vector<std::string>& files, const std::string& data_dir,
                       const std::string& schema_name, double tolerance, bool json) {
    auto loaded = load(files);
    if (!loaded.diagnostics.empty()) {
        print_diags(loaded.diagnostics);
        return kSyntax;
    }
    SchemaPtr schema = resolve_schema(loaded.set, schema_name);
    Instance inst = funmig::io::load_csv(data_dir, schema);
    auto report = funmig::check_instance(inst, tolerance);

    if (json) {
        ordered_json j;
        j["command"] = "check-instance";
        j["schema"] = schema->name;
        j["violations"] = ordered_json::array();
        for (const auto& v : report.violations) {
            ordered_json vj;
            vj["equation"] = v.eq_label;
            vj["entity"] = v.entity;
            vj["row"] = v.row;
            vj["lhs"] = v.lhs;
            vj["rhs"] = v.rhs;
            j["violations"].push_back(std::move(vj));
        }
        j["ok"] = report.clean();
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& v : report.violations)
            std::cout << "violation: " << v.eq_label << " at " << v.entity << ":" << v.row
                      << " (lhs=" << v.lhs << ", rhs=" << v.rhs << ")\n";
        std::cout << (report.clean() ? "ok: no violations\n"
                                     : std::to_string(report.violations.size()) +
                                           " violation(s)\n");
    }
    return report.clean() ? kOk : kViolations;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"funmig: schema-checked functorial data migration"};
    app.require_subcommand(1);

    std::vector<std::string> files;
    std::string mapping_name, spec_name, mode, data_dir, out_dir, left_dir, right_dir,
        schema_name;
    bool json = false, permissive = false;
    int depth = default_depth();
    double tolerance = 0.0;
    funmig::ChaseConfig cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("files", files, "DSL files (.fql)")->required()->expected(-1);
        cmd->add_flag("--json", json, "machine-readable report on stdout");
    };

    CLI::App* check_schema = app.add_subcommand("check-schema", "parse, elaborate and validate");
    add_common(check_schema);

    CLI::App* check_mapping =
        app.add_subcommand("check-mapping", "statically validate a schema mapping");
    add_common(check_mapping);
    check_mapping->add_option("--mapping", mapping_name, "mapping to check")->required();
    check_mapping->add_option("--depth", depth, "prover rewrite budget");
    check_mapping->add_flag("--permissive", permissive,
                            "downgrade unproved equations to Inconclusive");

    CLI::App* migrate = app.add_subcommand("migrate", "run a delta or sigma migration");
    add_common(migrate);
    migrate->add_option("--mapping", mapping_name, "mapping to migrate along")->required();
    migrate->add_option("--mode", mode, "delta | sigma")
        ->required()
        ->check(CLI::IsMember({"delta", "sigma"}));
    migrate->add_option("--data", data_dir, "input CSV bundle directory")->required();
    migrate->add_option("--out", out_dir, "output bundle directory")->required();
    migrate->add_option("--depth", depth, "prover rewrite budget");
    migrate->add_option("--max-fresh-rows", cfg.max_fresh_rows, "chase fresh-row budget");
    migrate->add_option("--max-rounds", cfg.max_rounds, "chase round budget");

    CLI::App* merge = app.add_subcommand("merge", "merge two bundles over an overlap");
    add_common(merge);
    merge->add_option("--spec", spec_name, "merge spec to execute")->required();
    merge->add_option("--left-data", left_dir, "left CSV bundle")->required();
    merge->add_option("--right-data", right_dir, "right CSV bundle")->required();
    merge->add_option("--out", out_dir, "output bundle directory")->required();
    merge->add_option("--max-fresh-rows", cfg.max_fresh_rows, "chase fresh-row budget");
    merge->add_option("--max-rounds", cfg.max_rounds, "chase round budget");

    CLI::App* check_instance =
        app.add_subcommand("check-instance", "check a CSV bundle against its constraints");
    add_common(check_instance);
    check_instance->add_option("--data", data_dir, "CSV bundle directory")->required();
    check_instance->add_option("--schema", schema_name,
                               "schema to check against (default: the only one)");
    check_instance->add_option("--tolerance", tolerance, "absolute float tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check_schema->parsed()) return cmd_check_schema(files, json);
        if (check_mapping->parsed())
            return cmd_check_mapping(files, mapping_name, depth, permissive, json);
        if (migrate->parsed())
            return cmd_migrate(files, mapping_name, mode, data_dir, out_dir, depth, cfg, json);
        if (merge->parsed())
            return cmd_merge(files, spec_name, left_dir, right_dir, out_dir, cfg, json);
        if (check_instance->parsed())
            return cmd_check_instance(files, data_dir, schema_name, tolerance, json);
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::string code = e.code();
        using namespace funmig::errc;
        if (code == ChaseBudgetExceeded || code == Contradiction || code == KeyConflict ||
            code == PreconditionFailed)
            return kMigrationError;
        if (code == UnresolvedName || code == IoError || code == SyntaxError ||
            code == HeaderMismatch || code == UnparsableLiteral || code == DuplicateId ||
            code == DanglingForeignKey)
            return kSyntax;
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSyntax;
    }
    return kOk;
}
