#include "funmig/congruence.hpp"

#include "funmig/diag.hpp"

namespace funmig {

namespace {
std::string intern_key(const Value& v, const std::vector<int>& arg_ids) {
    switch (v.kind) {
        case Value::Kind::Lit:
            return "L" + base_type_name(v.type) + ":" + format_literal(v.lit);
        case Value::Kind::Null:
            return "N" + v.label;
        case Value::Kind::Term: {
            std::string key = "T" + v.fn + "(";
            for (size_t i = 0; i < arg_ids.size(); ++i) {
                if (i) key += ",";
                key += std::to_string(arg_ids[i]);
            }
            return key + ")";
        }
    }
    return {};
}
} // namespace

int CongruenceClosure::find(int x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

std::string CongruenceClosure::signature(int node) {
    const Node& n = nodes_[node];
    std::string sig = n.fn + "(";
    for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) sig += ",";
        sig += std::to_string(find(n.args[i]));
    }
    return sig + ")";
}

int CongruenceClosure::node_of(const Value& v) {
    std::vector<int> arg_ids;
    if (v.kind == Value::Kind::Term) {
        arg_ids.reserve(v.args.size());
        for (const auto& a : v.args) arg_ids.push_back(node_of(a));
    }
    std::string key = intern_key(v, arg_ids);
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;

    int id = static_cast<int>(nodes_.size());
    Node n;
    n.kind = v.kind;
    n.lit = v.lit;
    n.label = v.label;
    n.fn = v.fn;
    n.args = arg_ids;
    n.type = v.type;
    nodes_.push_back(std::move(n));
    parent_.push_back(id);
    lit_node_of_class_.push_back(v.kind == Value::Kind::Lit ? id : -1);
    uses_.emplace_back();
    intern_[key] = id;

    if (v.kind == Value::Kind::Term) {
        for (int a : arg_ids) uses_[find(a)].push_back(id);
        std::string sig = signature(id);
        auto hit = sig_table_.find(sig);
        if (hit == sig_table_.end()) {
            sig_table_[sig] = id;
        } else if (find(hit->second) != id) {
            // Congruent to an existing term: same class from the start.
            std::vector<std::pair<int, int>> pending{{hit->second, id}};
            while (!pending.empty()) {
                auto [a, b] = pending.back();
                pending.pop_back();
                merge(a, b, pending);
            }
        }
    }
    return id;
}

void CongruenceClosure::merge(int a, int b, std::vector<std::pair<int, int>>& pending) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // First-interned node becomes the representative (deterministic).
    if (b < a) std::swap(a, b);

    int la = lit_node_of_class_[a];
    int lb = lit_node_of_class_[b];
    if (la >= 0 && lb >= 0 && !(nodes_[la].lit == nodes_[lb].lit))
        throw EngineError(errc::Contradiction,
                          "cannot equate distinct literals " + format_literal(nodes_[la].lit) +
                              " and " + format_literal(nodes_[lb].lit));

    parent_[b] = a;
    if (la < 0) lit_node_of_class_[a] = lb;
    ++unions_;

    std::vector<int> moved = std::move(uses_[b]);
    uses_[b].clear();
    for (int t : moved) uses_[a].push_back(t);

    // Re-canonicalize every term that mentions the merged class.
    for (int t : uses_[a]) {
        std::string sig = signature(t);
        auto hit = sig_table_.find(sig);
        if (hit == sig_table_.end()) {
            sig_table_[sig] = t;
        } else if (find(hit->second) != find(t)) {
            pending.push_back({hit->second, t});
        }
    }
}

void CongruenceClosure::equate(const Value& a, const Value& b) {
    int na = node_of(a);
    int nb = node_of(b);
    std::vector<std::pair<int, int>> pending{{na, nb}};
    while (!pending.empty()) {
        auto [x, y] = pending.back();
        pending.pop_back();
        merge(x, y, pending);
    }
}

bool CongruenceClosure::equal(const Value& a, const Value& b, double float_tol) {
    int na = node_of(a);
    int nb = node_of(b);
    if (find(na) == find(nb)) return true;
    if (float_tol > 0) {
        int la = lit_node_of_class_[find(na)];
        int lb = lit_node_of_class_[find(nb)];
        if (la >= 0 && lb >= 0) return literal_equal(nodes_[la].lit, nodes_[lb].lit, float_tol);
    }
    return false;
}

std::optional<Literal> CongruenceClosure::literal_of(const Value& v) {
    int n = find(node_of(v));
    int l = lit_node_of_class_[n];
    if (l < 0) return std::nullopt;
    return nodes_[l].lit;
}

std::vector<std::string> CongruenceClosure::null_labels() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (n.kind == Value::Kind::Null) out.push_back(n.label);
    return out;
}

std::string CongruenceClosure::null_class_rep(const std::string& label) {
    int n = node_of(Value::make_null(label, BaseType::String));
    int rep = find(n);
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == Value::Kind::Null && find(static_cast<int>(i)) == rep)
            return nodes_[i].label;
    }
    return label;
}

} // namespace funmig
