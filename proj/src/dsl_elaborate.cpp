#include "funmig/dsl/elaborate.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "funmig/dsl/parser.hpp"

namespace funmig::dsl {

namespace {

namespace fs = std::filesystem;

Path to_path(const PathSyntax& p) { return Path{p.start, p.steps}; }

class Elaborator {
public:
    Elaborator(const std::vector<SourceFile>& files, const udf::Registry& reg)
        : files_(files), reg_(reg) {}

    ElaborationResult run() {
        collect();
        for (const auto* d : schema_decls_) elaborate_schema(*d);
        for (const auto* d : mapping_decls_) elaborate_mapping(*d);
        for (const auto* d : instance_decls_) elaborate_instance(*d);
        for (const auto* d : merge_decls_) elaborate_merge(*d);
        for (const auto* d : migrate_decls_) elaborate_migrate(*d);
        for (const auto* d : filter_decls_) elaborate_filter(*d);
        return {std::move(set_), std::move(diags_)};
    }

private:
    void report(const char* code, std::string msg, Span span) {
        diags_.push_back({code, std::move(msg), std::move(span)});
    }

    void collect() {
        std::set<std::string> names;
        auto claim = [&](const std::string& name, const Span& span) {
            if (!names.insert(name).second) {
                report(errc::DuplicateDeclaration, "name '" + name + "' declared twice", span);
                return false;
            }
            return true;
        };
        for (const auto& file : files_) {
            for (const auto& decl : file.decls) {
                if (const auto* d = std::get_if<SchemaDecl>(&decl)) {
                    if (claim(d->name, d->span)) schema_decls_.push_back(d);
                } else if (const auto* d = std::get_if<MappingDecl>(&decl)) {
                    if (claim(d->name, d->span)) mapping_decls_.push_back(d);
                } else if (const auto* d = std::get_if<InstanceDecl>(&decl)) {
                    if (claim(d->name, d->span)) instance_decls_.push_back(d);
                } else if (const auto* d = std::get_if<MergeDecl>(&decl)) {
                    if (claim(d->name, d->span)) merge_decls_.push_back(d);
                } else if (const auto* d = std::get_if<MigrateDecl>(&decl)) {
                    if (claim(d->name, d->span)) migrate_decls_.push_back(d);
                } else if (const auto* d = std::get_if<FilterDecl>(&decl)) {
                    if (claim(d->name, d->span)) filter_decls_.push_back(d);
                }
            }
        }
    }

    SchemaPtr find_schema(const std::string& name, const Span& span) {
        auto it = set_.schemas.find(name);
        if (it == set_.schemas.end()) {
            report(errc::UnresolvedName, "no schema named '" + name + "'", span);
            return nullptr;
        }
        return it->second;
    }

    void elaborate_schema(const SchemaDecl& d) {
        auto s = std::make_shared<Schema>();
        s->name = d.name;
        for (const auto& [e, _] : d.entities) s->entities.push_back(e);
        for (const auto& f : d.fks) s->fks.push_back({f.name, f.src, f.dst});
        for (const auto& a : d.attrs) {
            auto t = base_type_from_name(a.type_name);
            if (!t) {
                report(errc::TypeMismatch, "unknown base type '" + a.type_name + "'", a.span);
                continue;
            }
            s->attrs.push_back({a.name, a.src, *t});
        }
        for (const auto& eq : d.equations)
            s->equations.push_back({to_path(eq.lhs), to_path(eq.rhs), eq.label});

        for (auto diag : validate_schema(*s)) {
            diag.span = d.span;
            diags_.push_back(std::move(diag));
        }
        set_.schemas[d.name] = std::move(s);
        set_.order.push_back({"schema", d.name});
    }

    // Elaborates an expression against `schema`. `expected` drives literal
    // coercion and null typing; labelled nulls are only allowed when
    // `fresh` semantics are instance-side (checked by the caller).
    std::optional<AttrExpr> elaborate_expr(const Schema& schema, const ExprSyntax& e,
                                           std::optional<BaseType> expected) {
        switch (e.kind) {
            case ExprSyntax::Kind::Path: {
                Path p = to_path(e.path);
                auto t = try_type_of_path(schema, p);
                if (!t) {
                    report(errc::TypeMismatch,
                           "path '" + p.to_string() + "' is not well-typed in schema '" +
                               schema.name + "'",
                           e.span);
                    return std::nullopt;
                }
                return AttrExpr::make_path(std::move(p));
            }
            case ExprSyntax::Kind::Lit: {
                Literal lit = e.lit;
                if (expected && *expected == BaseType::Float &&
                    literal_type(lit) == BaseType::Int)
                    lit = Literal(static_cast<double>(std::get<std::int64_t>(lit)));
                return AttrExpr::make_const(std::move(lit));
            }
            case ExprSyntax::Kind::Null: {
                if (!expected) {
                    report(errc::TypeMismatch, "cannot infer the type of 'null' here", e.span);
                    return std::nullopt;
                }
                return AttrExpr::make_null(*expected);
            }
            case ExprSyntax::Kind::NullLabel:
                report(errc::TypeMismatch, "labelled nulls ('?" + e.label +
                                               "') are only allowed in instance data",
                       e.span);
                return std::nullopt;
            case ExprSyntax::Kind::Apply: {
                if (!reg_.has(e.fn)) {
                    report(errc::UnknownFunction, "no UDF named '" + e.fn + "'", e.span);
                    return std::nullopt;
                }
                const auto& sig = reg_.signature_of(e.fn);
                if (sig.arg_types.size() != e.args.size()) {
                    report(errc::ArityMismatch,
                           "UDF '" + e.fn + "' expects " + std::to_string(sig.arg_types.size()) +
                               " arguments, got " + std::to_string(e.args.size()),
                           e.span);
                    return std::nullopt;
                }
                std::vector<AttrExpr> args;
                for (size_t i = 0; i < e.args.size(); ++i) {
                    auto arg = elaborate_expr(schema, e.args[i], sig.arg_types[i]);
                    if (!arg) return std::nullopt;
                    args.push_back(std::move(*arg));
                }
                return AttrExpr::make_apply(e.fn, std::move(args));
            }
        }
        return std::nullopt;
    }

    void elaborate_mapping(const MappingDecl& d) {
        SchemaPtr source = find_schema(d.source, d.span);
        SchemaPtr target = find_schema(d.target, d.span);
        if (!source || !target) return;

        Mapping f;
        f.name = d.name;
        f.source = source;
        f.target = target;

        for (const auto& entry : d.entries) {
            if (entry.kind != MappingEntrySyntax::Kind::Entity) continue;
            if (!source->has_entity(entry.key)) {
                report(errc::UnresolvedName,
                       "no entity '" + entry.key + "' in schema '" + source->name + "'",
                       entry.span);
                continue;
            }
            if (!target->has_entity(entry.entity_target)) {
                report(errc::UnresolvedName,
                       "no entity '" + entry.entity_target + "' in schema '" + target->name + "'",
                       entry.span);
                continue;
            }
            f.entity_map[entry.key] = entry.entity_target;
        }

        for (const auto& entry : d.entries) {
            if (entry.kind == MappingEntrySyntax::Kind::Fk) {
                std::vector<const FkDecl*> candidates;
                for (const auto& fk : source->fks)
                    if (fk.name == entry.key &&
                        (entry.key_entity.empty() || fk.src == entry.key_entity))
                        candidates.push_back(&fk);
                if (candidates.empty()) {
                    report(errc::UnresolvedName,
                           "no foreign key '" + entry.key + "' in schema '" + source->name + "'",
                           entry.span);
                    continue;
                }
                if (candidates.size() > 1) {
                    report(errc::AmbiguousName,
                           "foreign key '" + entry.key + "' exists on several entities; qualify "
                           "it as '<Entity> . " + entry.key + "'",
                           entry.span);
                    continue;
                }
                Path p = to_path(entry.path_target);
                auto t = try_type_of_path(*target, p);
                if (!t || t->is_attr) {
                    report(errc::TypeMismatch,
                           "fk image '" + p.to_string() +
                               "' is not an entity-valued path in schema '" + target->name + "'",
                           entry.span);
                    continue;
                }
                f.fk_map[{candidates[0]->src, candidates[0]->name}] = std::move(p);
            } else if (entry.kind == MappingEntrySyntax::Kind::Attr) {
                std::vector<const AttrDecl*> src_candidates;
                for (const auto& a : source->attrs)
                    if (a.name == entry.key &&
                        (entry.key_entity.empty() || a.src == entry.key_entity))
                        src_candidates.push_back(&a);
                if (src_candidates.size() > 1) {
                    report(errc::AmbiguousName,
                           "attribute '" + entry.key + "' exists on several entities; qualify it",
                           entry.span);
                    continue;
                }
                if (src_candidates.size() == 1) {
                    auto expr = elaborate_expr(*target, entry.expr_target,
                                               src_candidates[0]->type);
                    if (expr)
                        f.attr_map[{src_candidates[0]->src, src_candidates[0]->name}] =
                            std::move(*expr);
                    continue;
                }
                // Not a source attribute: a target binding for sigma.
                std::vector<const AttrDecl*> tgt_candidates;
                for (const auto& a : target->attrs)
                    if (a.name == entry.key &&
                        (entry.key_entity.empty() || a.src == entry.key_entity))
                        tgt_candidates.push_back(&a);
                if (tgt_candidates.empty()) {
                    report(errc::UnresolvedName,
                           "attribute '" + entry.key + "' is neither a source attribute nor a "
                           "target attribute",
                           entry.span);
                    continue;
                }
                if (tgt_candidates.size() > 1) {
                    report(errc::AmbiguousName,
                           "attribute '" + entry.key + "' exists on several target entities; "
                           "qualify it",
                           entry.span);
                    continue;
                }
                auto expr = elaborate_expr(*source, entry.expr_target, tgt_candidates[0]->type);
                if (expr)
                    f.bindings.push_back(
                        {tgt_candidates[0]->src, tgt_candidates[0]->name, std::move(*expr)});
            }
        }

        for (auto diag : validate_mapping(f, reg_)) {
            diag.span = d.span;
            diags_.push_back(std::move(diag));
        }
        set_.mappings[d.name] = std::move(f);
        set_.order.push_back({"mapping", d.name});
    }

    void elaborate_instance(const InstanceDecl& d) {
        SchemaPtr schema = find_schema(d.schema, d.span);
        if (!schema) return;
        InstanceBuilder builder(schema, d.name, &reg_);

        for (const auto& ent : d.entities) {
            if (!schema->has_entity(ent.entity)) {
                report(errc::UnresolvedName,
                       "no entity '" + ent.entity + "' in schema '" + schema->name + "'",
                       ent.span);
                continue;
            }
            for (const auto& row : ent.rows) builder.add_row(ent.entity, row.id);
        }
        for (const auto& ent : d.entities) {
            if (!schema->has_entity(ent.entity)) continue;
            for (const auto& row : ent.rows) {
                for (const auto& assign : row.assigns) {
                    if (const FkDecl* fk = schema->find_fk(ent.entity, assign.generator)) {
                        if (assign.kind != RowAssignSyntax::Kind::RowId) {
                            report(errc::TypeMismatch,
                                   "fk '" + fk->name + "' needs a row id", assign.span);
                            continue;
                        }
                        builder.set_fk(ent.entity, row.id, fk->name, assign.row_id);
                        continue;
                    }
                    const AttrDecl* a = schema->find_attr(ent.entity, assign.generator);
                    if (!a) {
                        report(errc::UnresolvedName,
                               "no generator '" + assign.generator + "' on entity '" + ent.entity +
                                   "'",
                               assign.span);
                        continue;
                    }
                    auto v = assign_value(builder, ent.entity, *a, assign);
                    if (v) builder.set_attr(ent.entity, row.id, a->name, std::move(*v));
                }
            }
        }
        auto inst = builder.finalize();
        for (auto diag : builder.diagnostics()) {
            diag.span = d.span;
            diags_.push_back(std::move(diag));
        }
        if (inst) {
            set_.instances[d.name] = std::move(*inst);
            set_.order.push_back({"instance", d.name});
        }
    }

    std::optional<Value> assign_value(InstanceBuilder& builder, const std::string& entity,
                                      const AttrDecl& a, const RowAssignSyntax& assign) {
        switch (assign.kind) {
            case RowAssignSyntax::Kind::NullLabel:
                return Value::make_null(assign.null_label, a.type);
            case RowAssignSyntax::Kind::RowId: {
                // A bare token in attribute position is a literal.
                auto lit = parse_literal(assign.row_id, a.type);
                if (a.type == BaseType::String || !lit) {
                    report(errc::TypeMismatch,
                           "attribute '" + a.name + "' expects a " + base_type_name(a.type) +
                               " literal" +
                               (a.type == BaseType::String ? " (quote string values)" : ""),
                           assign.span);
                    return std::nullopt;
                }
                return Value::make_lit(std::move(*lit));
            }
            case RowAssignSyntax::Kind::Expr:
                return eval_instance_expr(builder, entity, a, assign.expr, a.type);
        }
        return std::nullopt;
    }

    std::optional<Value> eval_instance_expr(InstanceBuilder& builder, const std::string& entity,
                                            const AttrDecl& a, const ExprSyntax& e,
                                            BaseType expected) {
        switch (e.kind) {
            case ExprSyntax::Kind::Lit: {
                Literal lit = e.lit;
                if (expected == BaseType::Float && literal_type(lit) == BaseType::Int)
                    lit = Literal(static_cast<double>(std::get<std::int64_t>(lit)));
                if (literal_type(lit) != expected) {
                    report(errc::TypeMismatch,
                           "expected a " + base_type_name(expected) + " literal", e.span);
                    return std::nullopt;
                }
                return Value::make_lit(std::move(lit));
            }
            case ExprSyntax::Kind::NullLabel:
                return Value::make_null(e.label, expected);
            case ExprSyntax::Kind::Null:
                return builder.fresh_null(entity, a.name, expected);
            case ExprSyntax::Kind::Apply: {
                if (!reg_.has(e.fn)) {
                    report(errc::UnknownFunction, "no UDF named '" + e.fn + "'", e.span);
                    return std::nullopt;
                }
                const auto& sig = reg_.signature_of(e.fn);
                if (sig.arg_types.size() != e.args.size()) {
                    report(errc::ArityMismatch,
                           "UDF '" + e.fn + "' expects " + std::to_string(sig.arg_types.size()) +
                               " arguments",
                           e.span);
                    return std::nullopt;
                }
                std::vector<Value> args;
                for (size_t i = 0; i < e.args.size(); ++i) {
                    auto arg =
                        eval_instance_expr(builder, entity, a, e.args[i], sig.arg_types[i]);
                    if (!arg) return std::nullopt;
                    args.push_back(std::move(*arg));
                }
                try {
                    return reg_.apply(e.fn, args);
                } catch (const EngineError& err) {
                    report(errc::EvaluationError, err.what(), e.span);
                    return std::nullopt;
                }
            }
            case ExprSyntax::Kind::Path:
                report(errc::TypeMismatch, "instance values must be closed (no paths)", e.span);
                return std::nullopt;
        }
        return std::nullopt;
    }

    void elaborate_merge(const MergeDecl& d) {
        SchemaPtr overlap = find_schema(d.overlap, d.span);
        auto left_it = set_.mappings.find(d.left);
        auto right_it = set_.mappings.find(d.right);
        if (left_it == set_.mappings.end())
            report(errc::UnresolvedName, "no mapping named '" + d.left + "'", d.span);
        if (right_it == set_.mappings.end())
            report(errc::UnresolvedName, "no mapping named '" + d.right + "'", d.span);
        if (!overlap || left_it == set_.mappings.end() || right_it == set_.mappings.end()) return;

        MergeSpec spec;
        spec.name = d.name;
        spec.overlap = overlap;
        spec.left = left_it->second;
        spec.right = right_it->second;
        if (spec.left.source->name != overlap->name)
            report(errc::SchemaMismatch,
                   "left mapping '" + d.left + "' does not start at overlap '" + d.overlap + "'",
                   d.span);
        if (spec.right.source->name != overlap->name)
            report(errc::SchemaMismatch,
                   "right mapping '" + d.right + "' does not start at overlap '" + d.overlap + "'",
                   d.span);

        for (const auto& k : d.keys) {
            if (!overlap->has_entity(k.entity)) {
                report(errc::UnresolvedName,
                       "no entity '" + k.entity + "' in overlap schema '" + overlap->name + "'",
                       k.span);
                continue;
            }
            for (const auto& ps : k.paths) {
                Path p = to_path(ps);
                auto t = try_type_of_path(*overlap, p);
                if (!t || !t->is_attr || p.start != k.entity) {
                    report(errc::TypeMismatch,
                           "key path '" + p.to_string() + "' must be an attribute path starting "
                           "at '" + k.entity + "'",
                           ps.span);
                    continue;
                }
                spec.keys[k.entity].push_back(std::move(p));
            }
        }
        set_.merges[d.name] = std::move(spec);
        set_.order.push_back({"merge", d.name});
    }

    void elaborate_migrate(const MigrateDecl& d) {
        if (!set_.mappings.count(d.mapping)) {
            report(errc::UnresolvedName, "no mapping named '" + d.mapping + "'", d.span);
            return;
        }
        if (d.mode != "delta" && d.mode != "sigma") {
            report(errc::TypeMismatch, "migrate mode must be 'delta' or 'sigma'", d.span);
            return;
        }
        set_.migrates[d.name] = d;
        set_.order.push_back({"migrate", d.name});
    }

    void elaborate_filter(const FilterDecl& d) {
        SchemaPtr schema = find_schema(d.schema, d.span);
        if (!schema) return;
        if (!schema->has_entity(d.entity)) {
            report(errc::UnresolvedName,
                   "no entity '" + d.entity + "' in schema '" + schema->name + "'", d.span);
            return;
        }
        FilterSpec spec;
        spec.name = d.name;
        spec.instance_schema = d.schema;
        spec.entity = d.entity;
        for (const auto& c : d.conds) {
            const AttrDecl* a = schema->find_attr(d.entity, c.attr);
            if (!a) {
                report(errc::UnknownAttribute,
                       "no attribute '" + c.attr + "' on entity '" + d.entity + "'", c.span);
                continue;
            }
            auto op = cmp_op_from_name(c.op);
            if (!op) {
                report(errc::TypeMismatch, "unknown comparison '" + c.op + "'", c.span);
                continue;
            }
            Literal rhs = c.rhs;
            if (a->type == BaseType::Float && literal_type(rhs) == BaseType::Int)
                rhs = Literal(static_cast<double>(std::get<std::int64_t>(rhs)));
            if (literal_type(rhs) != a->type) {
                report(errc::TypeMismatch,
                       "attribute '" + c.attr + "' compares against a " +
                           base_type_name(a->type) + " literal",
                       c.span);
                continue;
            }
            spec.conjuncts.push_back({c.attr, *op, std::move(rhs)});
        }
        set_.filters[d.name] = std::move(spec);
        set_.order.push_back({"filter", d.name});
    }

    const std::vector<SourceFile>& files_;
    const udf::Registry& reg_;
    ElaboratedSet set_;
    std::vector<Diagnostic> diags_;

    std::vector<const SchemaDecl*> schema_decls_;
    std::vector<const MappingDecl*> mapping_decls_;
    std::vector<const InstanceDecl*> instance_decls_;
    std::vector<const MergeDecl*> merge_decls_;
    std::vector<const MigrateDecl*> migrate_decls_;
    std::vector<const FilterDecl*> filter_decls_;
};

} // namespace

ElaborationResult elaborate(const std::vector<SourceFile>& files, const udf::Registry& registry) {
    Elaborator elab(files, registry);
    return elab.run();
}

ElaborationResult load_files(const std::vector<std::string>& paths,
                             const udf::Registry& registry) {
    std::vector<SourceFile> files;
    std::vector<Diagnostic> diags;
    std::set<std::string> loaded;
    std::vector<std::string> queue = paths;

    // Imports resolve relative to the importing file; cycles load once.
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        fs::path p(queue[qi]);
        std::error_code ec;
        fs::path canonical = fs::weakly_canonical(p, ec);
        std::string key = ec ? queue[qi] : canonical.string();
        if (!loaded.insert(key).second) continue;

        std::ifstream in(p);
        if (!in) {
            diags.push_back({errc::IoError, "cannot read file '" + queue[qi] + "'", {}});
            continue;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        ParseResult parsed = parse(text, queue[qi]);
        diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());

        SourceFile file;
        file.path = queue[qi];
        file.text = std::move(text);
        file.decls = std::move(parsed.decls);
        for (const auto& decl : file.decls) {
            if (const auto* imp = std::get_if<ImportDecl>(&decl)) {
                fs::path dir = p.parent_path();
                queue.push_back((dir / imp->path).string());
            }
        }
        files.push_back(std::move(file));
    }

    if (!diags.empty()) return {{}, std::move(diags)};
    return elaborate(files, registry);
}

} // namespace funmig::dsl
