#include "funmig/mapping.hpp"

#include <algorithm>

namespace funmig {

bool Mapping::is_identity() const {
    if (!source || !target || source->name != target->name) return false;
    if (!bindings.empty()) return false;
    for (const auto& [e, img] : entity_map)
        if (e != img) return false;
    for (const auto& [key, p] : fk_map)
        if (p.steps.size() != 1 || p.steps[0] != key.second) return false;
    for (const auto& [key, e] : attr_map) {
        if (e.kind != AttrExpr::Kind::Path) return false;
        if (e.path.steps.size() != 1 || e.path.steps[0] != key.second) return false;
    }
    return true;
}

Mapping identity_mapping(SchemaPtr s) {
    Mapping f;
    f.name = "id_" + s->name;
    f.source = s;
    f.target = s;
    for (const auto& e : s->entities) f.entity_map[e] = e;
    for (const auto& fk : s->fks) f.fk_map[{fk.src, fk.name}] = Path{fk.src, {fk.name}};
    for (const auto& a : s->attrs)
        f.attr_map[{a.src, a.name}] = AttrExpr::make_path(Path{a.src, {a.name}});
    return f;
}

std::vector<Diagnostic> validate_mapping(const Mapping& f, const udf::Registry& reg) {
    std::vector<Diagnostic> out;
    auto report = [&](const char* code, std::string msg) {
        out.push_back(Diagnostic{code, std::move(msg), {}});
    };
    if (!f.source || !f.target) {
        report(errc::IllFormedMapping, "mapping lacks source or target schema");
        return out;
    }
    const Schema& src = *f.source;
    const Schema& dst = *f.target;

    for (const auto& e : src.entities) {
        auto it = f.entity_map.find(e);
        if (it == f.entity_map.end())
            report(errc::IllFormedMapping, "entity '" + e + "' has no image");
        else if (!dst.has_entity(it->second))
            report(errc::UnknownEntity, "entity image '" + it->second + "' not in target schema");
    }
    for (const auto& fk : src.fks) {
        auto it = f.fk_map.find({fk.src, fk.name});
        if (it == f.fk_map.end()) {
            report(errc::IllFormedMapping, "fk '" + fk.name + "' has no image");
            continue;
        }
        auto t = try_type_of_path(dst, it->second);
        auto se = f.entity_map.find(fk.src);
        auto te = f.entity_map.find(fk.dst);
        if (!t || t->is_attr) {
            report(errc::TypeMismatch,
                   "fk image '" + it->second.to_string() + "' is not an entity-valued target path");
            continue;
        }
        if (se != f.entity_map.end() && it->second.start != se->second)
            report(errc::TypeMismatch, "fk '" + fk.name + "' image starts at '" +
                                           it->second.start + "', expected '" + se->second + "'");
        if (te != f.entity_map.end() && t->entity != te->second)
            report(errc::TypeMismatch, "fk '" + fk.name + "' image ends at '" + t->entity +
                                           "', expected '" + te->second + "'");
    }
    for (const auto& a : src.attrs) {
        auto it = f.attr_map.find({a.src, a.name});
        if (it == f.attr_map.end()) {
            report(errc::IllFormedMapping, "attr '" + a.name + "' has no image");
            continue;
        }
        auto se = f.entity_map.find(a.src);
        if (se == f.entity_map.end()) continue;
        try {
            BaseType t = type_of_attr_expr(dst, reg, it->second);
            if (t != a.type) {
                report(errc::TypeMismatch, "attr '" + a.name + "' image has type " +
                                               base_type_name(t) + ", expected " +
                                               base_type_name(a.type));
                continue;
            }
        } catch (const EngineError& e) {
            report(errc::TypeMismatch, "attr '" + a.name + "' image: " + e.what());
            continue;
        }
        // Every path leaf must start at the image entity.
        std::vector<const AttrExpr*> stack{&it->second};
        while (!stack.empty()) {
            const AttrExpr* e = stack.back();
            stack.pop_back();
            if (e->kind == AttrExpr::Kind::Path && e->path.start != se->second)
                report(errc::TypeMismatch, "attr '" + a.name + "' image path '" +
                                               e->path.to_string() + "' does not start at '" +
                                               se->second + "'");
            for (const auto& arg : e->args) stack.push_back(&arg);
        }
    }
    for (const auto& b : f.bindings) {
        const AttrDecl* target_attr = dst.find_attr(b.target_entity, b.target_attr);
        if (!target_attr) {
            report(errc::UnknownAttribute, "target binding names unknown attribute '" +
                                               b.target_entity + "." + b.target_attr + "'");
            continue;
        }
        // Binding expressions read the *source* schema.
        try {
            BaseType t = type_of_attr_expr(src, reg, b.expr);
            if (t != target_attr->type)
                report(errc::TypeMismatch, "target binding for '" + b.target_attr +
                                               "' has type " + base_type_name(t) + ", expected " +
                                               base_type_name(target_attr->type));
        } catch (const EngineError& e) {
            report(errc::TypeMismatch, "target binding for '" + b.target_attr + "': " + e.what());
        }
    }
    return out;
}

namespace {
const Path& fk_image(const Mapping& f, const std::string& entity, const std::string& fk) {
    auto it = f.fk_map.find({entity, fk});
    if (it == f.fk_map.end())
        throw EngineError(errc::IllFormedMapping,
                          "fk '" + fk + "' at '" + entity + "' has no image");
    return it->second;
}
} // namespace

Path translate_path(const Mapping& f, const Path& p) {
    PathType t = type_of_path(*f.source, p);
    if (t.is_attr)
        throw EngineError(errc::TypeMismatch,
                          "translate_path requires an entity-valued path, got '" + p.to_string() +
                              "'");
    auto e0 = f.entity_map.find(p.start);
    if (e0 == f.entity_map.end())
        throw EngineError(errc::IllFormedMapping, "entity '" + p.start + "' has no image");
    Path out{e0->second, {}};
    std::string cur = p.start;
    for (const auto& step : p.steps) {
        const FkDecl* fk = f.source->find_fk(cur, step);
        out = compose(*f.target, out, fk_image(f, cur, step));
        cur = fk->dst;
    }
    return out;
}

AttrExpr translate_attr_expr(const Mapping& f, const AttrExpr& e) {
    switch (e.kind) {
        case AttrExpr::Kind::Path: return translate_attr_path(f, e.path);
        case AttrExpr::Kind::Const:
        case AttrExpr::Kind::Null: return e;
        case AttrExpr::Kind::Apply: {
            std::vector<AttrExpr> new_args;
            new_args.reserve(e.args.size());
            for (const auto& arg : e.args) new_args.push_back(translate_attr_expr(f, arg));
            return AttrExpr::make_apply(e.fn, std::move(new_args));
        }
    }
    return e;
}

AttrExpr translate_attr_path(const Mapping& f, const Path& p) {
    PathType t = type_of_path(*f.source, p);
    if (!t.is_attr) return AttrExpr::make_path(translate_path(f, p));

    Path prefix{p.start, {p.steps.begin(), p.steps.end() - 1}};
    const std::string& attr_name = p.steps.back();
    Path img_prefix = translate_path(f, prefix);
    auto it = f.attr_map.find({t.entity, attr_name});
    if (it == f.attr_map.end())
        throw EngineError(errc::IllFormedMapping,
                          "attr '" + attr_name + "' at '" + t.entity + "' has no image");
    return it->second.prepend(*f.target, img_prefix);
}

std::vector<std::string> ValidationReport::unproved_labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
        if (!e.proof.provable())
            out.push_back(e.source_eq.label.empty() ? e.source_eq.to_string()
                                                    : e.source_eq.label);
    return out;
}

std::string overall_name(ValidationReport::Overall v) {
    switch (v) {
        case ValidationReport::Overall::Valid: return "Valid";
        case ValidationReport::Overall::Rejected: return "Rejected";
        case ValidationReport::Overall::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

// Structural equality of translated sides, deferring path leaves to the
// prover. Anything not syntactically parallel is unprovable here: the
// engine never claims inequality, only failure to prove.
ProofResult prove_attr_exprs_equal(const Schema& target, const AttrExpr& a, const AttrExpr& b,
                                   const ProverOptions& opts) {
    ProofResult failed; // NotProvableWithinBound
    if (a.kind != b.kind) return failed;
    switch (a.kind) {
        case AttrExpr::Kind::Path:
            return decide_path_equality(target, a.path, b.path, opts);
        case AttrExpr::Kind::Const: {
            ProofResult res;
            res.verdict = a.lit == b.lit ? Verdict::Provable : Verdict::NotProvableWithinBound;
            return res;
        }
        case AttrExpr::Kind::Null:
            return failed; // two fresh nulls are never provably equal
        case AttrExpr::Kind::Apply: {
            if (a.fn != b.fn || a.args.size() != b.args.size()) return failed;
            ProofResult res;
            res.verdict = Verdict::Provable;
            for (size_t i = 0; i < a.args.size(); ++i) {
                ProofResult sub = prove_attr_exprs_equal(target, a.args[i], b.args[i], opts);
                if (!sub.provable()) return failed;
                res.trace.insert(res.trace.end(), sub.trace.begin(), sub.trace.end());
            }
            return res;
        }
    }
    return failed;
}

} // namespace

ValidationReport check_mapping(const Mapping& f, int depth_bound, bool strict,
                               const udf::Registry& reg) {
    auto diags = validate_mapping(f, reg);
    if (!diags.empty())
        throw EngineError(errc::IllFormedMapping, diags.front().message);

    ValidationReport report;
    report.strict = strict;
    report.depth_bound = depth_bound;
    ProverOptions opts;
    opts.depth_bound = depth_bound;

    bool any_unproved = false;
    for (const auto& eq : f.source->equations) {
        EquationOutcome outcome;
        outcome.source_eq = eq;
        PathType lt = type_of_path(*f.source, eq.lhs);
        if (!lt.is_attr) {
            Path tl = translate_path(f, eq.lhs);
            Path tr = translate_path(f, eq.rhs);
            outcome.translated_lhs = tl.to_string();
            outcome.translated_rhs = tr.to_string();
            outcome.proof = decide_path_equality(*f.target, tl, tr, opts);
        } else {
            AttrExpr tl = translate_attr_path(f, eq.lhs);
            AttrExpr tr = translate_attr_path(f, eq.rhs);
            outcome.translated_lhs = tl.to_string();
            outcome.translated_rhs = tr.to_string();
            outcome.proof = prove_attr_exprs_equal(*f.target, tl, tr, opts);
        }
        if (!outcome.proof.provable()) any_unproved = true;
        report.entries.push_back(std::move(outcome));
    }

    if (!any_unproved)
        report.verdict = ValidationReport::Overall::Valid;
    else if (strict)
        report.verdict = ValidationReport::Overall::Rejected;
    else
        report.verdict = ValidationReport::Overall::Inconclusive;
    return report;
}

Mapping compose_mappings(const Mapping& f, const Mapping& g) {
    if (!f.target || !g.source || f.target->name != g.source->name ||
        !f.target->structurally_equal(*g.source))
        throw EngineError(errc::SchemaMismatch, "compose_mappings: f.target is not g.source");
    if (f.is_identity()) {
        Mapping out = g;
        out.name = g.name + "_o_" + f.name;
        return out;
    }
    if (g.is_identity()) {
        Mapping out = f;
        out.name = g.name + "_o_" + f.name;
        return out;
    }
    if (!f.bindings.empty() || !g.bindings.empty())
        throw EngineError(errc::IllFormedMapping,
                          "target attribute bindings do not compose; compose the functor parts "
                          "or keep one side an identity");

    Mapping out;
    out.name = g.name + "_o_" + f.name;
    out.source = f.source;
    out.target = g.target;
    for (const auto& [e, mid] : f.entity_map) {
        auto it = g.entity_map.find(mid);
        if (it == g.entity_map.end())
            throw EngineError(errc::IllFormedMapping, "entity '" + mid + "' has no image in g");
        out.entity_map[e] = it->second;
    }
    for (const auto& [key, p] : f.fk_map) out.fk_map[key] = translate_path(g, p);
    for (const auto& [key, e] : f.attr_map) out.attr_map[key] = translate_attr_expr(g, e);
    return out;
}

} // namespace funmig
