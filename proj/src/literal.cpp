#include "funmig/literal.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace funmig {

std::string base_type_name(BaseType t) {
    switch (t) {
        case BaseType::Int: return "Int";
        case BaseType::Float: return "Float";
        case BaseType::String: return "String";
        case BaseType::Bool: return "Bool";
    }
    return "?";
}

std::optional<BaseType> base_type_from_name(const std::string& name) {
    if (name == "Int") return BaseType::Int;
    if (name == "Float") return BaseType::Float;
    if (name == "String") return BaseType::String;
    if (name == "Bool") return BaseType::Bool;
    return std::nullopt;
}

BaseType literal_type(const Literal& v) {
    return static_cast<BaseType>(v.index());
}

static std::string format_double(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_literal(const Literal& v) {
    switch (literal_type(v)) {
        case BaseType::Int: return std::to_string(std::get<std::int64_t>(v));
        case BaseType::Float: return format_double(std::get<double>(v));
        case BaseType::String: return std::get<std::string>(v);
        case BaseType::Bool: return std::get<bool>(v) ? "true" : "false";
    }
    return "";
}

std::string escape_string(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string quote_literal(const Literal& v) {
    if (literal_type(v) == BaseType::String)
        return "\"" + escape_string(std::get<std::string>(v)) + "\"";
    return format_literal(v);
}

std::optional<Literal> parse_literal(const std::string& text, BaseType t) {
    switch (t) {
        case BaseType::Int: {
            std::int64_t out = 0;
            const char* b = text.data();
            const char* e = b + text.size();
            auto [ptr, ec] = std::from_chars(b, e, out);
            if (ec != std::errc() || ptr != e) return std::nullopt;
            return Literal(out);
        }
        case BaseType::Float: {
            double out = 0;
            const char* b = text.data();
            const char* e = b + text.size();
            auto [ptr, ec] = std::from_chars(b, e, out);
            if (ec != std::errc() || ptr != e) return std::nullopt;
            return Literal(out);
        }
        case BaseType::String:
            return Literal(text);
        case BaseType::Bool:
            if (text == "true") return Literal(true);
            if (text == "false") return Literal(false);
            return std::nullopt;
    }
    return std::nullopt;
}

bool literal_equal(const Literal& a, const Literal& b, double float_tol) {
    if (a.index() != b.index()) return false;
    if (float_tol > 0 && literal_type(a) == BaseType::Float)
        return std::fabs(std::get<double>(a) - std::get<double>(b)) <= float_tol;
    return a == b;
}

bool literal_less(const Literal& a, const Literal& b) {
    if (a.index() != b.index()) return a.index() < b.index();
    return a < b;
}

} // namespace funmig
