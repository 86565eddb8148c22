#include "funmig/value.hpp"

namespace funmig {

Value Value::make_lit(Literal v) {
    Value out;
    out.kind = Kind::Lit;
    out.type = literal_type(v);
    out.lit = std::move(v);
    return out;
}

Value Value::make_null(std::string label, BaseType t) {
    Value out;
    out.kind = Kind::Null;
    out.label = std::move(label);
    out.type = t;
    return out;
}

Value Value::make_term(std::string fn, std::vector<Value> args, BaseType ret) {
    Value out;
    out.kind = Kind::Term;
    out.fn = std::move(fn);
    out.args = std::move(args);
    out.type = ret;
    return out;
}

bool Value::contains_null() const {
    switch (kind) {
        case Kind::Lit: return false;
        case Kind::Null: return true;
        case Kind::Term:
            for (const auto& a : args)
                if (a.contains_null()) return true;
            return false;
    }
    return false;
}

static void print_value(const Value& v, bool quoted, std::string& out) {
    switch (v.kind) {
        case Value::Kind::Lit:
            out += quoted ? quote_literal(v.lit) : format_literal(v.lit);
            return;
        case Value::Kind::Null:
            out += "?";
            out += v.label;
            return;
        case Value::Kind::Term:
            out += "!";
            out += v.fn;
            out += "(";
            for (size_t i = 0; i < v.args.size(); ++i) {
                if (i) out += ",";
                print_value(v.args[i], true, out); // strings quoted inside terms
            }
            out += ")";
            return;
    }
}

std::string Value::to_string() const {
    std::string out;
    print_value(*this, false, out);
    return out;
}

bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind || a.type != b.type) return false;
    switch (a.kind) {
        case Value::Kind::Lit: return a.lit == b.lit;
        case Value::Kind::Null: return a.label == b.label;
        case Value::Kind::Term: return a.fn == b.fn && a.args == b.args;
    }
    return false;
}

bool Value::operator<(const Value& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (type != o.type) return type < o.type;
    switch (kind) {
        case Kind::Lit: return literal_less(lit, o.lit);
        case Kind::Null: return label < o.label;
        case Kind::Term:
            if (fn != o.fn) return fn < o.fn;
            return args < o.args;
    }
    return false;
}

} // namespace funmig
