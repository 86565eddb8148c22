#include "funmig/attrexpr.hpp"

#include "funmig/diag.hpp"

namespace funmig {

AttrExpr AttrExpr::make_path(Path p) {
    AttrExpr e;
    e.kind = Kind::Path;
    e.path = std::move(p);
    return e;
}

AttrExpr AttrExpr::make_const(Literal v) {
    AttrExpr e;
    e.kind = Kind::Const;
    e.lit = std::move(v);
    return e;
}

AttrExpr AttrExpr::make_apply(std::string fn, std::vector<AttrExpr> args) {
    AttrExpr e;
    e.kind = Kind::Apply;
    e.fn = std::move(fn);
    e.args = std::move(args);
    return e;
}

AttrExpr AttrExpr::make_null(BaseType t) {
    AttrExpr e;
    e.kind = Kind::Null;
    e.null_type = t;
    return e;
}

bool AttrExpr::closed() const {
    switch (kind) {
        case Kind::Path: return false;
        case Kind::Const:
        case Kind::Null: return true;
        case Kind::Apply:
            for (const auto& a : args)
                if (!a.closed()) return false;
            return true;
    }
    return true;
}

std::string AttrExpr::to_string() const {
    switch (kind) {
        case Kind::Path: return path.to_string();
        case Kind::Const: return quote_literal(lit);
        case Kind::Null: return "null";
        case Kind::Apply: {
            std::string out = fn + "(";
            for (size_t i = 0; i < args.size(); ++i) {
                if (i) out += ", ";
                out += args[i].to_string();
            }
            return out + ")";
        }
    }
    return {};
}

AttrExpr AttrExpr::prepend(const Schema& s, const Path& prefix) const {
    switch (kind) {
        case Kind::Path: return make_path(compose(s, prefix, path));
        case Kind::Const:
        case Kind::Null: return *this;
        case Kind::Apply: {
            std::vector<AttrExpr> new_args;
            new_args.reserve(args.size());
            for (const auto& a : args) new_args.push_back(a.prepend(s, prefix));
            return make_apply(fn, std::move(new_args));
        }
    }
    return *this;
}

bool operator==(const AttrExpr& a, const AttrExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case AttrExpr::Kind::Path: return a.path == b.path;
        case AttrExpr::Kind::Const: return a.lit == b.lit;
        case AttrExpr::Kind::Null: return a.null_type == b.null_type;
        case AttrExpr::Kind::Apply: return a.fn == b.fn && a.args == b.args;
    }
    return false;
}

BaseType type_of_attr_expr(const Schema& schema, const udf::Registry& reg, const AttrExpr& e) {
    switch (e.kind) {
        case AttrExpr::Kind::Path: {
            PathType t = type_of_path(schema, e.path);
            if (!t.is_attr)
                throw EngineError(errc::TypeMismatch, "path '" + e.path.to_string() +
                                                          "' is entity-valued where an attribute "
                                                          "value is required");
            return t.type;
        }
        case AttrExpr::Kind::Const: return literal_type(e.lit);
        case AttrExpr::Kind::Null: return e.null_type;
        case AttrExpr::Kind::Apply: {
            const udf::UdfSignature& sig = reg.signature_of(e.fn);
            if (sig.arg_types.size() != e.args.size())
                throw EngineError(errc::ArityMismatch,
                                  "UDF '" + e.fn + "' expects " +
                                      std::to_string(sig.arg_types.size()) + " arguments, got " +
                                      std::to_string(e.args.size()));
            for (size_t i = 0; i < e.args.size(); ++i) {
                BaseType at = type_of_attr_expr(schema, reg, e.args[i]);
                if (at != sig.arg_types[i])
                    throw EngineError(errc::TypeMismatch,
                                      "UDF '" + e.fn + "' argument " + std::to_string(i + 1) +
                                          " must be " + base_type_name(sig.arg_types[i]) +
                                          ", got " + base_type_name(at));
            }
            return sig.return_type;
        }
    }
    throw EngineError(errc::TypeMismatch, "malformed attribute expression");
}

} // namespace funmig
