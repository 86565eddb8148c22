#include "funmig/schema.hpp"

#include <algorithm>
#include <set>

namespace funmig {

std::string Path::to_string() const {
    std::string out = start;
    if (steps.empty()) return out + " . id";
    for (const auto& s : steps) out += " . " + s;
    return out;
}

std::string Equation::to_string() const {
    std::string out;
    if (!label.empty()) out += label + " : ";
    return out + lhs.to_string() + " = " + rhs.to_string();
}

bool Schema::has_entity(const std::string& e) const {
    return std::find(entities.begin(), entities.end(), e) != entities.end();
}

const FkDecl* Schema::find_fk(const std::string& src, const std::string& name) const {
    for (const auto& f : fks)
        if (f.src == src && f.name == name) return &f;
    return nullptr;
}

const AttrDecl* Schema::find_attr(const std::string& src, const std::string& name) const {
    for (const auto& a : attrs)
        if (a.src == src && a.name == name) return &a;
    return nullptr;
}

std::vector<const FkDecl*> Schema::fks_from(const std::string& src) const {
    std::vector<const FkDecl*> out;
    for (const auto& f : fks)
        if (f.src == src) out.push_back(&f);
    return out;
}

std::vector<const AttrDecl*> Schema::attrs_of(const std::string& src) const {
    std::vector<const AttrDecl*> out;
    for (const auto& a : attrs)
        if (a.src == src) out.push_back(&a);
    return out;
}

std::vector<std::string> Schema::generator_names(const std::string& entity) const {
    std::vector<std::string> out;
    for (const auto& f : fks)
        if (f.src == entity) out.push_back(f.name);
    for (const auto& a : attrs)
        if (a.src == entity) out.push_back(a.name);
    return out;
}

bool Schema::structurally_equal(const Schema& other) const {
    auto key_fk = [](const FkDecl& f) { return f.src + "\x1f" + f.name + "\x1f" + f.dst; };
    auto key_attr = [](const AttrDecl& a) {
        return a.src + "\x1f" + a.name + "\x1f" + base_type_name(a.type);
    };
    std::set<std::string> e1(entities.begin(), entities.end());
    std::set<std::string> e2(other.entities.begin(), other.entities.end());
    if (e1 != e2) return false;
    std::set<std::string> f1, f2, a1, a2;
    for (const auto& f : fks) f1.insert(key_fk(f));
    for (const auto& f : other.fks) f2.insert(key_fk(f));
    if (f1 != f2) return false;
    for (const auto& a : attrs) a1.insert(key_attr(a));
    for (const auto& a : other.attrs) a2.insert(key_attr(a));
    if (a1 != a2) return false;
    return equations == other.equations && name == other.name;
}

std::optional<PathType> try_type_of_path(const Schema& s, const Path& p) {
    if (!s.has_entity(p.start)) return std::nullopt;
    std::string cur = p.start;
    for (size_t i = 0; i < p.steps.size(); ++i) {
        const auto& step = p.steps[i];
        if (const FkDecl* f = s.find_fk(cur, step)) {
            cur = f->dst;
            continue;
        }
        if (const AttrDecl* a = s.find_attr(cur, step)) {
            if (i + 1 != p.steps.size()) return std::nullopt; // attr mid-path
            return PathType{true, cur, a->type};
        }
        return std::nullopt;
    }
    return PathType{false, cur, BaseType::String};
}

PathType type_of_path(const Schema& s, const Path& p) {
    auto t = try_type_of_path(s, p);
    if (!t)
        throw EngineError(errc::TypeMismatch,
                          "path '" + p.to_string() + "' is not well-typed in schema '" + s.name + "'");
    return *t;
}

std::string entity_at(const Schema& s, const Path& p, size_t i) {
    std::string cur = p.start;
    for (size_t k = 0; k < i && k < p.steps.size(); ++k) {
        const FkDecl* f = s.find_fk(cur, p.steps[k]);
        if (!f)
            throw EngineError(errc::TypeMismatch,
                              "step '" + p.steps[k] + "' is not a foreign key at '" + cur + "'");
        cur = f->dst;
    }
    return cur;
}

Path compose(const Schema& s, const Path& p, const Path& q) {
    PathType pt = type_of_path(s, p);
    if (pt.is_attr)
        throw EngineError(errc::TypeMismatch,
                          "cannot compose after attribute-valued path '" + p.to_string() + "'");
    if (pt.entity != q.start)
        throw EngineError(errc::TypeMismatch, "endpoint mismatch: '" + p.to_string() +
                                                  "' ends at '" + pt.entity + "' but '" +
                                                  q.to_string() + "' starts at '" + q.start + "'");
    type_of_path(s, q);
    Path out{p.start, p.steps};
    out.steps.insert(out.steps.end(), q.steps.begin(), q.steps.end());
    return out;
}

std::vector<Diagnostic> validate_schema(const Schema& s) {
    std::vector<Diagnostic> out;
    auto report = [&](const char* code, std::string msg) {
        out.push_back(Diagnostic{code, std::move(msg), {}});
    };

    std::set<std::string> seen_entities;
    for (const auto& e : s.entities) {
        if (!seen_entities.insert(e).second)
            report(errc::DuplicateEntity, "entity '" + e + "' declared twice");
    }

    std::set<std::pair<std::string, std::string>> gen_names;
    for (const auto& f : s.fks) {
        if (!seen_entities.count(f.src))
            report(errc::UnknownEntity, "fk '" + f.name + "' has undeclared source '" + f.src + "'");
        if (!seen_entities.count(f.dst))
            report(errc::UnknownEntity, "fk '" + f.name + "' has undeclared target '" + f.dst + "'");
        if (!gen_names.insert({f.src, f.name}).second)
            report(errc::DuplicateGenerator,
                   "generator '" + f.name + "' declared twice on '" + f.src + "'");
    }
    for (const auto& a : s.attrs) {
        if (!seen_entities.count(a.src))
            report(errc::UnknownEntity,
                   "attr '" + a.name + "' has undeclared source '" + a.src + "'");
        if (!gen_names.insert({a.src, a.name}).second)
            report(errc::DuplicateGenerator,
                   "generator '" + a.name + "' declared twice on '" + a.src + "'");
    }

    for (const auto& eq : s.equations) {
        std::string label = eq.label.empty() ? eq.to_string() : eq.label;
        auto lt = try_type_of_path(s, eq.lhs);
        auto rt = try_type_of_path(s, eq.rhs);
        if (!lt || !rt) {
            report(errc::TypeMismatch, "equation '" + label + "' has an ill-typed side");
            continue;
        }
        if (eq.lhs.start != eq.rhs.start) {
            report(errc::EquationEndpointMismatch,
                   "equation '" + label + "' sides start at different entities");
            continue;
        }
        bool same_codomain = lt->is_attr == rt->is_attr &&
                             (lt->is_attr ? lt->type == rt->type : lt->entity == rt->entity);
        if (!same_codomain)
            report(errc::EquationEndpointMismatch,
                   "equation '" + label + "' sides have different codomains");
    }
    return out;
}

} // namespace funmig
