#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funmig/value.hpp"

namespace funmig {

// Congruence closure over values: union-find over literals, null labels
// and UDF terms, with congruence propagation through term arguments
// (equal arguments imply equal terms). Copyable value type; equating two
// distinct literals throws EngineError(Contradiction), so callers get
// all-or-nothing semantics by copying first.
class CongruenceClosure {
public:
    // Interns the value (no-op if already known).
    int node_of(const Value& v);

    // Merges the classes of a and b and propagates congruence.
    void equate(const Value& a, const Value& b);

    // Congruence-aware equality. float_tol compares bound float literals
    // within an absolute tolerance (0 = exact).
    bool equal(const Value& a, const Value& b, double float_tol = 0.0);

    // The literal this value's class is bound to, if any.
    std::optional<Literal> literal_of(const Value& v);

    // True when the closure knows nothing (no equations recorded).
    bool trivial() const { return unions_ == 0; }

    // Labels of all interned nulls, in first-intern order.
    std::vector<std::string> null_labels() const;

    // Representative label of a null's class among nulls only
    // (first-interned wins). Used for canonical serialization.
    std::string null_class_rep(const std::string& label);

private:
    struct Node {
        Value::Kind kind = Value::Kind::Lit;
        Literal lit;
        std::string label;
        std::string fn;
        std::vector<int> args; // node ids (as interned, not canonical)
        BaseType type = BaseType::String;
    };

    int find(int x);
    void merge(int a, int b, std::vector<std::pair<int, int>>& pending);
    std::string signature(int node);

    std::vector<Node> nodes_;
    std::vector<int> parent_;
    std::vector<int> lit_node_of_class_;      // -1 if unbound
    std::vector<std::vector<int>> uses_;      // terms mentioning this class
    std::map<std::string, int> intern_;       // syntactic key -> node
    std::map<std::string, int> sig_table_;    // canonical term signature -> node
    long unions_ = 0;
};

} // namespace funmig
