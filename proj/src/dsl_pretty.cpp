#include "funmig/dsl/pretty.hpp"

#include <algorithm>

namespace funmig::dsl {

namespace {

std::string print_value(const Value& v);

std::string print_term_arg(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Lit: return quote_literal(v.lit);
        case Value::Kind::Null: return "?" + v.label;
        case Value::Kind::Term: return print_value(v);
    }
    return {};
}

std::string print_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Lit: return quote_literal(v.lit);
        case Value::Kind::Null: return "?" + v.label;
        case Value::Kind::Term: {
            std::string out = v.fn + "(";
            for (size_t i = 0; i < v.args.size(); ++i) {
                if (i) out += ", ";
                out += print_term_arg(v.args[i]);
            }
            return out + ")";
        }
    }
    return {};
}

std::string print_expr(const AttrExpr& e) {
    switch (e.kind) {
        case AttrExpr::Kind::Path: return e.path.to_string();
        case AttrExpr::Kind::Const: return quote_literal(e.lit);
        case AttrExpr::Kind::Null: return "null";
        case AttrExpr::Kind::Apply: {
            std::string out = e.fn + "(";
            for (size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                out += print_expr(e.args[i]);
            }
            return out + ")";
        }
    }
    return {};
}

} // namespace

std::string pretty_print(const Schema& s) {
    std::string out = "schema " + s.name + " {\n";

    std::vector<std::string> entities = s.entities;
    std::sort(entities.begin(), entities.end());
    out += "  entities";
    for (size_t i = 0; i < entities.size(); ++i)
        out += (i ? ", " : " ") + entities[i];
    out += ";\n";

    std::vector<FkDecl> fks = s.fks;
    std::sort(fks.begin(), fks.end(), [](const FkDecl& a, const FkDecl& b) {
        return std::tie(a.src, a.name) < std::tie(b.src, b.name);
    });
    if (!fks.empty()) {
        out += "  fks\n";
        for (const auto& f : fks)
            out += "    " + f.name + " : " + f.src + " -> " + f.dst + ";\n";
    }

    std::vector<AttrDecl> attrs = s.attrs;
    std::sort(attrs.begin(), attrs.end(), [](const AttrDecl& a, const AttrDecl& b) {
        return std::tie(a.src, a.name) < std::tie(b.src, b.name);
    });
    if (!attrs.empty()) {
        out += "  attrs\n";
        for (const auto& a : attrs)
            out += "    " + a.name + " : " + a.src + " -> " + base_type_name(a.type) + ";\n";
    }

    if (!s.equations.empty()) {
        out += "  equations\n";
        for (const auto& eq : s.equations) {
            out += "    ";
            if (!eq.label.empty()) out += eq.label + " : ";
            out += eq.lhs.to_string() + " = " + eq.rhs.to_string() + ";\n";
        }
    }
    out += "}\n";
    return out;
}

std::string pretty_print(const Mapping& f) {
    std::string out =
        "mapping " + f.name + " : " + f.source->name + " -> " + f.target->name + " {\n";
    for (const auto& [e, img] : f.entity_map) out += "  entity " + e + " -> " + img + ";\n";
    for (const auto& [key, p] : f.fk_map)
        out += "  fk " + key.first + " . " + key.second + " -> " + p.to_string() + ";\n";
    for (const auto& [key, e] : f.attr_map)
        out += "  attr " + key.first + " . " + key.second + " -> " + print_expr(e) + ";\n";
    std::vector<TargetBinding> bindings = f.bindings;
    std::sort(bindings.begin(), bindings.end(),
              [](const TargetBinding& a, const TargetBinding& b) {
                  return std::tie(a.target_entity, a.target_attr) <
                         std::tie(b.target_entity, b.target_attr);
              });
    for (const auto& b : bindings)
        out += "  attr " + b.target_entity + " . " + b.target_attr + " -> " + print_expr(b.expr) +
               ";\n";
    out += "}\n";
    return out;
}

std::string pretty_print(const Instance& inst) {
    std::string out = "instance " + inst.name + " : " + inst.schema->name + " {\n";
    for (const auto& [entity, ids] : inst.rows) {
        if (ids.empty()) continue;
        out += "  " + entity + " {\n";
        for (const auto& id : ids) {
            out += "    row " + id + " {";
            for (const FkDecl* f : inst.schema->fks_from(entity)) {
                auto it = inst.fk.find({entity, id, f->name});
                if (it != inst.fk.end()) out += " " + f->name + " = " + it->second + ";";
            }
            for (const AttrDecl* a : inst.schema->attrs_of(entity)) {
                auto it = inst.attr.find({entity, id, a->name});
                if (it != inst.attr.end())
                    out += " " + a->name + " = " + print_value(it->second) + ";";
            }
            out += " }\n";
        }
        out += "  }\n";
    }
    out += "}\n";
    return out;
}

std::string pretty_print(const MergeSpec& m) {
    std::string out = "merge " + m.name + " {\n";
    out += "  overlap " + m.overlap->name + ";\n";
    out += "  left " + m.left.name + ";\n";
    out += "  right " + m.right.name + ";\n";
    for (const auto& [entity, paths] : m.keys) {
        out += "  keys " + entity + " :";
        for (size_t i = 0; i < paths.size(); ++i)
            out += (i ? ", " : " ") + paths[i].to_string();
        out += ";\n";
    }
    out += "}\n";
    return out;
}

} // namespace funmig::dsl
