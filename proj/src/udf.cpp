#include "funmig/udf.hpp"

#include <json.hpp>

#include "funmig/diag.hpp"

namespace funmig::udf {

void Registry::register_fn(UdfSignature sig, Body body) {
    if (fns_.count(sig.name))
        throw EngineError(errc::DuplicateName, "UDF '" + sig.name + "' already registered");
    std::string name = sig.name;
    fns_.emplace(std::move(name), Entry{std::move(sig), std::move(body)});
}

bool Registry::has(const std::string& name) const { return fns_.count(name) > 0; }

const UdfSignature& Registry::signature_of(const std::string& name) const {
    auto it = fns_.find(name);
    if (it == fns_.end())
        throw EngineError(errc::UnknownFunction, "no UDF named '" + name + "'");
    return it->second.sig;
}

Value Registry::apply(const std::string& name, const std::vector<Value>& args) const {
    auto it = fns_.find(name);
    if (it == fns_.end())
        throw EngineError(errc::UnknownFunction, "no UDF named '" + name + "'");
    const Entry& entry = it->second;
    if (args.size() != entry.sig.arg_types.size())
        throw EngineError(errc::ArityMismatch, "UDF '" + name + "' expects " +
                                                   std::to_string(entry.sig.arg_types.size()) +
                                                   " arguments, got " +
                                                   std::to_string(args.size()));
    bool symbolic = false;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i].type != entry.sig.arg_types[i])
            throw EngineError(errc::TypeMismatch,
                              "UDF '" + name + "' argument " + std::to_string(i + 1) + " must be " +
                                  base_type_name(entry.sig.arg_types[i]) + ", got " +
                                  base_type_name(args[i].type));
        if (args[i].contains_null()) symbolic = true;
    }
    if (symbolic) return Value::make_term(name, args, entry.sig.return_type);

    std::vector<Literal> lits;
    lits.reserve(args.size());
    for (const auto& a : args) lits.push_back(a.lit);
    return Value::make_lit(entry.body(lits));
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : fns_) out.push_back(name);
    return out;
}

namespace {

Literal json_extract_body(const std::vector<Literal>& args) {
    const std::string& doc = std::get<std::string>(args[0]);
    const std::string& field = std::get<std::string>(args[1]);
    nlohmann::json parsed = nlohmann::json::parse(doc, nullptr, false);
    if (parsed.is_discarded())
        throw EngineError(errc::EvaluationError, "json_extract: malformed JSON document: " + doc);
    if (!parsed.is_object())
        throw EngineError(errc::EvaluationError, "json_extract: document is not a JSON object");
    if (!parsed.contains(field))
        throw EngineError(errc::EvaluationError, "json_extract: no field '" + field + "' in " + doc);
    const auto& v = parsed[field];
    if (v.is_string()) return Literal(v.get<std::string>());
    if (v.is_number() || v.is_boolean()) return Literal(v.dump());
    throw EngineError(errc::EvaluationError,
                      "json_extract: field '" + field + "' is not a flat string/number value");
}

Literal detect_system_type_body(const std::vector<Literal>& args) {
    int periodic = 0;
    for (const auto& a : args)
        if (std::get<bool>(a)) ++periodic;
    switch (periodic) {
        case 3: return Literal(std::string("bulk"));
        case 2: return Literal(std::string("surface"));
        case 0: return Literal(std::string("molecule"));
        default:
            throw EngineError(errc::EvaluationError,
                              "detect_system_type: undefined for 1 periodic dimension");
    }
}

} // namespace

Registry Registry::builtins() {
    Registry reg;
    reg.register_fn({"dft_code", {}, BaseType::String},
                    [](const std::vector<Literal>&) { return Literal(std::string("VASP")); });
    reg.register_fn({"json_extract", {BaseType::String, BaseType::String}, BaseType::String},
                    json_extract_body);
    reg.register_fn(
        {"detect_system_type", {BaseType::Bool, BaseType::Bool, BaseType::Bool}, BaseType::String},
        detect_system_type_body);
    return reg;
}

UdfSignature scale_signature(const std::string& name) {
    return {name, {BaseType::Float}, BaseType::Float};
}

Registry::Body make_scale(double factor) {
    return [factor](const std::vector<Literal>& args) {
        return Literal(std::get<double>(args[0]) * factor);
    };
}

} // namespace funmig::udf
