#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "funmig/value.hpp"

namespace funmig::udf {

struct UdfSignature {
    std::string name;
    std::vector<BaseType> arg_types;
    BaseType return_type = BaseType::String;
};

// Registry of pure, total, deterministic functions over literals.
// Bodies are built into the engine; the DSL references them by name.
class Registry {
public:
    using Body = std::function<Literal(const std::vector<Literal>&)>;

    // Throws EngineError(DuplicateName) if the name is taken.
    void register_fn(UdfSignature sig, Body body);

    bool has(const std::string& name) const;
    const UdfSignature& signature_of(const std::string& name) const;

    // All-literal args evaluate; any null-containing arg yields a
    // symbolic Term. Throws UnknownFunction / ArityMismatch /
    // TypeMismatch / EvaluationError.
    Value apply(const std::string& name, const std::vector<Value>& args) const;

    std::vector<std::string> names() const;

    // dft_code() -> "VASP"; json_extract(doc, field); detect_system_type(px, py, pz).
    static Registry builtins();

private:
    struct Entry {
        UdfSignature sig;
        Body body;
    };
    std::map<std::string, Entry> fns_;
};

// Unit-scale helper used by tests and custom setups: multiplies a Float
// by a fixed factor.
UdfSignature scale_signature(const std::string& name);
Registry::Body make_scale(double factor);

} // namespace funmig::udf
