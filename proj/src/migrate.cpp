#include "funmig/migrate.hpp"

#include <algorithm>
#include <set>

namespace funmig {

namespace {

// Evaluates an attribute expression on an instance row. fresh_null
// supplies labelled nulls for NullExpr leaves.
template <typename FreshFn>
Value eval_attr_expr(const Instance& inst, const std::string& entity, const std::string& row,
                     const AttrExpr& e, const udf::Registry& reg, FreshFn&& fresh_null) {
    switch (e.kind) {
        case AttrExpr::Kind::Const: return Value::make_lit(e.lit);
        case AttrExpr::Kind::Null: return fresh_null(e.null_type);
        case AttrExpr::Kind::Path: {
            PathResult r = evaluate_path(inst, row, e.path);
            if (!std::holds_alternative<Value>(r))
                throw EngineError(errc::TypeMismatch, "attribute expression path '" +
                                                          e.path.to_string() +
                                                          "' is entity-valued");
            return std::get<Value>(r);
        }
        case AttrExpr::Kind::Apply: {
            std::vector<Value> args;
            args.reserve(e.args.size());
            for (const auto& a : e.args)
                args.push_back(eval_attr_expr(inst, entity, row, a, reg, fresh_null));
            return reg.apply(e.fn, args);
        }
    }
    throw EngineError(errc::TypeMismatch, "malformed attribute expression");
}

void require_valid_mapping(const Mapping& f, const udf::Registry& reg, const char* op) {
    ValidationReport report = check_mapping(f, kDefaultDepthBound, true, reg);
    if (report.verdict != ValidationReport::Overall::Valid) {
        std::string labels;
        for (const auto& l : report.unproved_labels()) {
            if (!labels.empty()) labels += ", ";
            labels += l;
        }
        throw EngineError(errc::PreconditionFailed,
                          std::string(op) + ": mapping '" + f.name +
                              "' is not Valid (unproved: " + labels + ")");
    }
}

void require_clean_instance(const Instance& i, const char* op) {
    ViolationReport v = check_instance(i);
    if (!v.clean())
        throw EngineError(errc::PreconditionFailed,
                          std::string(op) + ": instance '" + i.name + "' violates " +
                              std::to_string(v.violations.size()) + " equation instance(s)");
}

// Mutable chase workspace over a target schema: partial instance with a
// union-find over rows and a congruence closure over attribute values.
class ChaseState {
public:
    ChaseState(const Schema& target, const udf::Registry& reg, const ChaseConfig& cfg,
               std::string out_name)
        : target_(target), reg_(reg), cfg_(cfg), out_name_(std::move(out_name)) {}

    int add_row(const std::string& entity, const std::string& id, const std::string& lineage) {
        auto key = std::make_pair(entity, id);
        auto it = row_lookup_.find(key);
        if (it != row_lookup_.end()) return it->second;
        int h = static_cast<int>(row_entity_.size());
        row_entity_.push_back(entity);
        row_id_.push_back(id);
        row_parent_.push_back(h);
        row_lookup_[key] = h;
        rows_by_entity_[entity].push_back(h);
        if (!lineage.empty()) lineage_[h] = lineage;
        return h;
    }

    int fresh_row(const std::string& entity) {
        ++fresh_rows_;
        if (fresh_rows_ > cfg_.max_fresh_rows)
            throw EngineError(errc::ChaseBudgetExceeded,
                              "fresh row budget exhausted (max_fresh_rows=" +
                                  std::to_string(cfg_.max_fresh_rows) + ")");
        int n = ++fresh_counter_[entity];
        std::string id = "?" + entity + "_" + std::to_string(n);
        while (row_lookup_.count({entity, id})) {
            n = ++fresh_counter_[entity];
            id = "?" + entity + "_" + std::to_string(n);
        }
        changed_ = true;
        return add_row(entity, id, "fresh:" + entity + ":" + std::to_string(n));
    }

    int find(int h) {
        while (row_parent_[h] != h) {
            row_parent_[h] = row_parent_[row_parent_[h]];
            h = row_parent_[h];
        }
        return h;
    }

    void set_fk(int row, const std::string& fk_name, int target_row) {
        row = find(row);
        target_row = find(target_row);
        auto key = std::make_pair(row, fk_name);
        auto it = fk_.find(key);
        if (it == fk_.end()) {
            fk_[key] = target_row;
            changed_ = true;
        } else if (find(it->second) != target_row) {
            union_rows(it->second, target_row);
        }
    }

    void set_attr(int row, const std::string& attr_name, const Value& v) {
        row = find(row);
        auto key = std::make_pair(row, attr_name);
        auto it = attr_.find(key);
        if (it == attr_.end()) {
            attr_[key] = v;
            values_.node_of(v);
            note_labels(v);
            changed_ = true;
        } else if (!values_.equal(it->second, v)) {
            values_.equate(it->second, v);
            changed_ = true;
        }
    }

    void union_rows(int a, int b) {
        std::vector<std::pair<int, int>> pending{{a, b}};
        while (!pending.empty()) {
            auto [x, y] = pending.back();
            pending.pop_back();
            x = find(x);
            y = find(y);
            if (x == y) continue;
            if (row_entity_[x] != row_entity_[y])
                throw EngineError(errc::Contradiction,
                                  "chase attempted to identify rows of different entities");
            if (y < x) std::swap(x, y); // earliest-created row represents the class
            row_parent_[y] = x;
            changed_ = true;
            // Move y's fk entries into x, unifying on conflict.
            std::vector<std::pair<std::string, int>> moved_fks;
            std::vector<std::pair<std::string, Value>> moved_attrs;
            for (auto it = fk_.begin(); it != fk_.end();) {
                if (it->first.first == y) {
                    moved_fks.emplace_back(it->first.second, it->second);
                    it = fk_.erase(it);
                } else {
                    ++it;
                }
            }
            for (auto it = attr_.begin(); it != attr_.end();) {
                if (it->first.first == y) {
                    moved_attrs.emplace_back(it->first.second, it->second);
                    it = attr_.erase(it);
                } else {
                    ++it;
                }
            }
            for (auto& [name, tgt] : moved_fks) {
                auto key = std::make_pair(x, name);
                auto it = fk_.find(key);
                if (it == fk_.end()) fk_[key] = tgt;
                else if (find(it->second) != find(tgt)) pending.push_back({it->second, tgt});
            }
            for (auto& [name, v] : moved_attrs) {
                auto key = std::make_pair(x, name);
                auto it = attr_.find(key);
                if (it == attr_.end()) attr_[key] = v;
                else if (!values_.equal(it->second, v)) values_.equate(it->second, v);
            }
        }
    }

    // Walks the fk prefix of a path, creating fresh rows for undefined
    // steps. Returns the final row handle (entity-valued paths).
    int walk_row(int row, const Path& p) {
        std::string cur_entity = p.start;
        int h = find(row);
        for (const auto& step : p.steps) {
            const FkDecl* f = target_.find_fk(cur_entity, step);
            if (!f)
                throw EngineError(errc::UnknownGenerator,
                                  "no fk '" + step + "' at '" + cur_entity + "'");
            h = find(h);
            auto it = fk_.find({h, step});
            int next;
            if (it == fk_.end()) {
                next = fresh_row(f->dst);
                fk_[{h, step}] = next;
            } else {
                next = find(it->second);
            }
            h = next;
            cur_entity = f->dst;
        }
        return find(h);
    }

    // Attribute-ending path: walks the prefix, then reads (or creates a
    // fresh null for) the final attribute.
    Value walk_value(int row, const Path& p) {
        Path prefix{p.start, {p.steps.begin(), p.steps.end() - 1}};
        const std::string& attr_name = p.steps.back();
        int h = walk_row(row, prefix);
        const std::string& entity = row_entity_[h];
        const AttrDecl* a = target_.find_attr(entity, attr_name);
        if (!a)
            throw EngineError(errc::UnknownGenerator,
                              "no attr '" + attr_name + "' at '" + entity + "'");
        auto it = attr_.find({h, attr_name});
        if (it != attr_.end()) return it->second;
        Value v = fresh_null_value(entity, attr_name, a->type);
        attr_[{h, attr_name}] = v;
        values_.node_of(v);
        changed_ = true;
        return v;
    }

    Value fresh_null_value(const std::string& entity, const std::string& attr, BaseType t) {
        std::string base = entity + "_" + attr + "_";
        int& n = fresh_null_counter_[entity + "\x1f" + attr];
        std::string label;
        do {
            ++n;
            label = base + std::to_string(n);
        } while (used_labels_.count(label));
        used_labels_.insert(label);
        return Value::make_null(label, t);
    }

    void note_labels(const Value& v) {
        if (v.kind == Value::Kind::Null) used_labels_.insert(v.label);
        for (const auto& a : v.args) note_labels(a);
    }

    void assert_path_lands_at(int row, const Path& p, int expected) {
        int got = walk_row(row, p);
        union_rows(got, expected);
    }

    void assert_path_has_value(int row, const Path& p, const Value& v) {
        Path prefix{p.start, {p.steps.begin(), p.steps.end() - 1}};
        const std::string& attr_name = p.steps.back();
        int h = walk_row(row, prefix);
        set_attr(h, attr_name, v);
    }

    // One pass of: totalize fks with fresh rows, then fire every
    // equation on every row. Returns true if anything changed.
    bool chase_round() {
        changed_ = false;
        // Completion: every row needs every fk of its entity. Rows created
        // during this pass wait for the next round, otherwise a cyclic fk
        // graph would free-complete forever before any equation fires.
        for (const auto& [entity, handles] : rows_by_entity_) {
            auto fks = target_.fks_from(entity);
            size_t count = handles.size();
            for (size_t i = 0; i < count; ++i) {
                int h = handles[i];
                if (find(h) != h) continue;
                for (const FkDecl* f : fks) {
                    if (!fk_.count({h, f->name})) {
                        int fresh = fresh_row(f->dst);
                        fk_[{h, f->name}] = fresh;
                        changed_ = true;
                    }
                }
            }
        }
        // Equations, declaration order; rows in insertion order.
        for (const auto& eq : target_.equations) {
            auto it = rows_by_entity_.find(eq.lhs.start);
            if (it == rows_by_entity_.end()) continue;
            PathType lt = type_of_path(target_, eq.lhs);
            size_t count = it->second.size();
            for (size_t i = 0; i < count; ++i) {
                int h = it->second[i];
                if (find(h) != h) continue;
                if (!lt.is_attr) {
                    int l = walk_row(h, eq.lhs);
                    int r = walk_row(h, eq.rhs);
                    if (l != r) union_rows(l, r);
                } else {
                    Value lv = walk_value(h, eq.lhs);
                    Value rv = walk_value(h, eq.rhs);
                    if (!values_.equal(lv, rv)) {
                        values_.equate(lv, rv);
                        changed_ = true;
                    }
                }
            }
        }
        return changed_;
    }

    void run_chase() {
        int rounds = 0;
        while (chase_round()) {
            if (++rounds > cfg_.max_rounds)
                throw EngineError(errc::ChaseBudgetExceeded,
                                  "chase did not settle within max_rounds=" +
                                      std::to_string(cfg_.max_rounds) +
                                      " (fresh rows: " + std::to_string(fresh_rows_) + ")");
        }
    }

    Instance finalize(SchemaPtr target_ptr) {
        Instance out;
        out.name = out_name_;
        out.schema = std::move(target_ptr);
        out.nulls = values_;
        for (const auto& e : target_.entities) out.rows[e];
        for (const auto& [entity, handles] : rows_by_entity_) {
            for (int h : handles) {
                if (find(h) != h) continue;
                out.rows[entity].push_back(row_id_[h]);
                auto lin = lineage_.find(h);
                if (lin != lineage_.end()) out.lineage[{entity, row_id_[h]}] = lin->second;
            }
        }
        for (const auto& [key, tgt] : fk_) {
            int h = key.first;
            if (find(h) != h) continue;
            out.fk[{row_entity_[h], row_id_[h], key.second}] = row_id_[find(tgt)];
        }
        for (const auto& [key, v] : attr_) {
            int h = key.first;
            if (find(h) != h) continue;
            out.attr[{row_entity_[h], row_id_[h], key.second}] = v;
        }
        // Any attribute still unassigned becomes a fresh labelled null.
        for (const auto& [entity, ids] : out.rows) {
            auto attrs = target_.attrs_of(entity);
            for (const auto& id : ids) {
                for (const AttrDecl* a : attrs) {
                    if (!out.attr.count({entity, id, a->name})) {
                        Value v = fresh_null_value(entity, a->name, a->type);
                        out.attr[{entity, id, a->name}] = v;
                        out.nulls.node_of(v);
                    }
                }
            }
        }
        return out;
    }

    int find_existing(const std::string& entity, const std::string& id) {
        auto it = row_lookup_.find({entity, id});
        if (it == row_lookup_.end())
            throw EngineError(errc::UnknownRow, "no chase row " + entity + ":" + id);
        return find(it->second);
    }

    CongruenceClosure& values() { return values_; }
    void seed_labels(const std::vector<std::string>& labels) {
        used_labels_.insert(labels.begin(), labels.end());
    }

private:
    const Schema& target_;
    const udf::Registry& reg_;
    ChaseConfig cfg_;
    std::string out_name_;

    std::vector<std::string> row_entity_;
    std::vector<std::string> row_id_;
    std::vector<int> row_parent_;
    std::map<std::pair<std::string, std::string>, int> row_lookup_;
    std::map<std::string, std::vector<int>> rows_by_entity_;
    std::map<std::pair<int, std::string>, int> fk_;
    std::map<std::pair<int, std::string>, Value> attr_;
    CongruenceClosure values_;
    std::map<int, std::string> lineage_;
    std::set<std::string> used_labels_;
    std::map<std::string, int> fresh_counter_;
    std::map<std::string, int> fresh_null_counter_;
    int fresh_rows_ = 0;
    bool changed_ = false;
};

} // namespace

Instance delta(const Mapping& f, const Instance& j, const udf::Registry& reg) {
    require_valid_mapping(f, reg, "delta");
    require_clean_instance(j, "delta");
    if (j.schema->name != f.target->name)
        throw EngineError(errc::SchemaMismatch,
                          "delta: instance '" + j.name + "' is not on the mapping's target schema");

    InstanceBuilder builder(f.source, "delta_" + f.name + "_" + j.name, &reg);
    builder.seed_nulls(j.nulls);

    for (const auto& src_entity : f.source->entities) {
        const std::string& img = f.entity_map.at(src_entity);
        auto it = j.rows.find(img);
        if (it == j.rows.end()) continue;
        for (const auto& id : it->second) {
            builder.add_row(src_entity, id);
            builder.set_lineage(src_entity, id, "src:" + j.name + ":" + img + ":" + id);
        }
    }
    for (const auto& src_entity : f.source->entities) {
        const std::string& img = f.entity_map.at(src_entity);
        auto it = j.rows.find(img);
        if (it == j.rows.end()) continue;
        for (const auto& id : it->second) {
            for (const FkDecl* fk : f.source->fks_from(src_entity)) {
                const Path& p = f.fk_map.at({src_entity, fk->name});
                PathResult r = evaluate_path(j, id, p);
                builder.set_fk(src_entity, id, fk->name, std::get<std::string>(r));
            }
            for (const AttrDecl* a : f.source->attrs_of(src_entity)) {
                const AttrExpr& e = f.attr_map.at({src_entity, a->name});
                auto fresh = [&](BaseType t) { return builder.fresh_null(src_entity, a->name, t); };
                builder.set_attr(src_entity, id, a->name,
                                 eval_attr_expr(j, img, id, e, reg, fresh));
            }
        }
    }
    auto out = builder.finalize();
    if (!out)
        throw EngineError(errc::PreconditionFailed,
                          "delta: internal construction failure: " +
                              builder.diagnostics().front().to_string());
    return *out;
}

namespace {

// Copies source rows into the chase, asserting the functorial images of
// every fk and attr assignment plus the mapping's target bindings.
void seed_sigma(ChaseState& chase, const Mapping& f, const Instance& inst,
                const udf::Registry& reg) {
    chase.seed_labels(inst.nulls.null_labels());

    // Target entities fed by more than one source entity get qualified ids.
    std::map<std::string, int> preimages;
    for (const auto& [e, img] : f.entity_map) preimages[img]++;
    auto image_id = [&](const std::string& src_entity, const std::string& id) {
        const std::string& img = f.entity_map.at(src_entity);
        return preimages[img] > 1 ? src_entity + ":" + id : id;
    };

    for (const auto& [src_entity, ids] : inst.rows) {
        const std::string& img = f.entity_map.at(src_entity);
        for (const auto& id : ids)
            chase.add_row(img, image_id(src_entity, id),
                          "src:" + inst.name + ":" + src_entity + ":" + id);
    }
    for (const auto& [src_entity, ids] : inst.rows) {
        const std::string& img = f.entity_map.at(src_entity);
        for (const auto& id : ids) {
            int h = chase.find_existing(img, image_id(src_entity, id));
            for (const FkDecl* fk : inst.schema->fks_from(src_entity)) {
                const std::string& tgt = inst.fk_of(src_entity, id, fk->name);
                int ht = chase.find_existing(f.entity_map.at(fk->dst), image_id(fk->dst, tgt));
                chase.assert_path_lands_at(h, f.fk_map.at({src_entity, fk->name}), ht);
            }
            for (const AttrDecl* a : inst.schema->attrs_of(src_entity)) {
                const Value& v = inst.attr_of(src_entity, id, a->name);
                const AttrExpr& e = f.attr_map.at({src_entity, a->name});
                switch (e.kind) {
                    case AttrExpr::Kind::Path:
                        chase.assert_path_has_value(h, e.path, v);
                        break;
                    case AttrExpr::Kind::Const:
                        chase.values().equate(Value::make_lit(e.lit), v);
                        break;
                    case AttrExpr::Kind::Null:
                        break; // value has no target-side home; dropped
                    case AttrExpr::Kind::Apply: {
                        // Assert expr(image) = v symbolically via the
                        // value congruence when paths resolve.
                        // Conservative: only closed expressions assert.
                        if (e.closed()) {
                            auto fresh = [&](BaseType t) {
                                return chase.fresh_null_value(img, a->name, t);
                            };
                            Value ev = eval_attr_expr(inst, src_entity, id, e, reg, fresh);
                            chase.values().equate(ev, v);
                        }
                        break;
                    }
                }
            }
        }
    }

    // Target bindings: expressions over the source row, landing on the
    // image row's attribute.
    for (const auto& b : f.bindings) {
        for (const auto& [src_entity, ids] : inst.rows) {
            if (f.entity_map.at(src_entity) != b.target_entity) continue;
            // Path leaves must be rooted at this source entity.
            bool applicable = true;
            std::vector<const AttrExpr*> stack{&b.expr};
            while (!stack.empty()) {
                const AttrExpr* e = stack.back();
                stack.pop_back();
                if (e->kind == AttrExpr::Kind::Path && e->path.start != src_entity)
                    applicable = false;
                for (const auto& arg : e->args) stack.push_back(&arg);
            }
            if (!applicable) continue;
            for (const auto& id : ids) {
                int h = chase.find_existing(b.target_entity, image_id(src_entity, id));
                auto fresh = [&](BaseType t) {
                    return chase.fresh_null_value(b.target_entity, b.target_attr, t);
                };
                Value v = eval_attr_expr(inst, src_entity, id, b.expr, reg, fresh);
                chase.set_attr(h, b.target_attr, v);
            }
        }
    }
}

} // namespace

Instance sigma(const Mapping& f, const Instance& i, const ChaseConfig& cfg,
               const udf::Registry& reg) {
    require_valid_mapping(f, reg, "sigma");
    require_clean_instance(i, "sigma");
    if (i.schema->name != f.source->name)
        throw EngineError(errc::SchemaMismatch,
                          "sigma: instance '" + i.name + "' is not on the mapping's source schema");

    ChaseState chase(*f.target, reg, cfg, "sigma_" + f.name + "_" + i.name);
    seed_sigma(chase, f, i, reg);
    chase.run_chase();
    return chase.finalize(f.target);
}

namespace {

// Naming tables for the pushout schema: equivalence classes of tagged
// entities/generators with deterministic merged names.
class PushoutNames {
public:
    int add(const std::string& key) {
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(keys_.size());
        keys_.push_back(key);
        parent_.push_back(id);
        index_[key] = id;
        return id;
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(const std::string& a, const std::string& b) {
        int x = find(add(a));
        int y = find(add(b));
        if (x == y) return;
        if (y < x) std::swap(x, y);
        parent_[y] = x;
    }

    int class_of(const std::string& key) { return find(add(key)); }

    const std::string& key_of(int id) const { return keys_[id]; }
    size_t size() const { return keys_.size(); }

private:
    std::vector<std::string> keys_;
    std::vector<int> parent_;
    std::map<std::string, int> index_;
};

std::string tag(int side, const std::string& a) { return std::to_string(side) + ":" + a; }
std::string tag(int side, const std::string& a, const std::string& b) {
    return std::to_string(side) + ":" + a + ":" + b;
}

std::string unique_name(std::string base, std::set<std::string>& taken) {
    std::string name = base;
    int n = 1;
    while (taken.count(name)) name = base + "_" + std::to_string(++n);
    taken.insert(name);
    return name;
}

} // namespace

std::string cmp_op_name(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

std::optional<CmpOp> cmp_op_from_name(const std::string& s) {
    if (s == "==") return CmpOp::Eq;
    if (s == "!=") return CmpOp::Ne;
    if (s == "<") return CmpOp::Lt;
    if (s == "<=") return CmpOp::Le;
    if (s == ">") return CmpOp::Gt;
    if (s == ">=") return CmpOp::Ge;
    return std::nullopt;
}

MergeResult merge(const MergeSpec& spec, const Instance& i1, const Instance& i2,
                  const ChaseConfig& cfg, const udf::Registry& reg) {
    require_valid_mapping(spec.left, reg, "merge");
    require_valid_mapping(spec.right, reg, "merge");
    require_clean_instance(i1, "merge");
    require_clean_instance(i2, "merge");
    if (i1.schema->name != spec.left.target->name)
        throw EngineError(errc::SchemaMismatch, "merge: left instance is not on the left schema");
    if (i2.schema->name != spec.right.target->name)
        throw EngineError(errc::SchemaMismatch, "merge: right instance is not on the right schema");

    const Schema& s1 = *spec.left.target;
    const Schema& s2 = *spec.right.target;
    const Schema& ov = *spec.overlap;
    const Schema* sides[2] = {&s1, &s2};

    for (const auto& [entity, paths] : spec.keys) {
        if (!ov.has_entity(entity))
            throw EngineError(errc::UnknownEntity, "merge keys name unknown overlap entity '" +
                                                       entity + "'");
        for (const auto& p : paths) {
            if (p.start != entity)
                throw EngineError(errc::TypeMismatch,
                                  "key path '" + p.to_string() + "' does not start at '" + entity +
                                      "'");
            if (!type_of_path(ov, p).is_attr)
                throw EngineError(errc::TypeMismatch,
                                  "key path '" + p.to_string() + "' must be attribute-valued");
        }
    }

    // Identify entities along the two legs.
    PushoutNames ents;
    for (const auto& e : s1.entities) ents.add(tag(0, e));
    for (const auto& e : s2.entities) ents.add(tag(1, e));
    for (const auto& o : ov.entities)
        ents.unite(tag(0, spec.left.entity_map.at(o)), tag(1, spec.right.entity_map.at(o)));

    // Identify generators whose images are both single steps; longer
    // images become path equations in the merged schema.
    PushoutNames gens;
    for (const auto& f : s1.fks) gens.add(tag(0, f.src, f.name));
    for (const auto& a : s1.attrs) gens.add(tag(0, a.src, a.name));
    for (const auto& f : s2.fks) gens.add(tag(1, f.src, f.name));
    for (const auto& a : s2.attrs) gens.add(tag(1, a.src, a.name));

    std::vector<std::pair<Path, Path>> fk_equations;   // (left path, right path) in side coords
    std::vector<std::pair<Path, Path>> attr_equations;
    for (const auto& f : ov.fks) {
        const Path& lp = spec.left.fk_map.at({f.src, f.name});
        const Path& rp = spec.right.fk_map.at({f.src, f.name});
        if (lp.steps.size() == 1 && rp.steps.size() == 1)
            gens.unite(tag(0, lp.start, lp.steps[0]), tag(1, rp.start, rp.steps[0]));
        else
            fk_equations.push_back({lp, rp});
    }
    for (const auto& a : ov.attrs) {
        const AttrExpr& le = spec.left.attr_map.at({a.src, a.name});
        const AttrExpr& re = spec.right.attr_map.at({a.src, a.name});
        if (le.kind != AttrExpr::Kind::Path || re.kind != AttrExpr::Kind::Path)
            throw EngineError(errc::IllFormedMapping,
                              "merge: overlap attribute '" + a.name +
                                  "' must map to attribute paths on both sides");
        if (le.path.steps.size() == 1 && re.path.steps.size() == 1)
            gens.unite(tag(0, le.path.start, le.path.steps[0]),
                       tag(1, re.path.start, re.path.steps[0]));
        else
            attr_equations.push_back({le.path, re.path});
    }

    // Merged entity names: side-1 declaration order, then new side-2 classes.
    std::map<int, std::string> ent_name;
    std::set<std::string> ent_taken;
    std::vector<int> ent_order;
    auto name_entity_class = [&](int side, const std::string& e) {
        int cls = ents.class_of(tag(side, e));
        if (ent_name.count(cls)) return;
        ent_name[cls] = unique_name(e, ent_taken);
        ent_order.push_back(cls);
    };
    for (const auto& e : s1.entities) name_entity_class(0, e);
    for (const auto& e : s2.entities) name_entity_class(1, e);

    auto merged_entity = [&](int side, const std::string& e) {
        return ent_name.at(ents.class_of(tag(side, e)));
    };

    // Merged generator names, unique per merged source entity.
    std::map<int, std::string> gen_name;
    std::map<std::string, std::set<std::string>> gen_taken; // merged entity -> names
    auto name_gen_class = [&](int side, const std::string& src, const std::string& g) {
        int cls = gens.class_of(tag(side, src, g));
        if (gen_name.count(cls)) return;
        gen_name[cls] = unique_name(g, gen_taken[merged_entity(side, src)]);
    };
    for (const auto& f : s1.fks) name_gen_class(0, f.src, f.name);
    for (const auto& a : s1.attrs) name_gen_class(0, a.src, a.name);
    for (const auto& f : s2.fks) name_gen_class(1, f.src, f.name);
    for (const auto& a : s2.attrs) name_gen_class(1, a.src, a.name);

    auto merged_gen = [&](int side, const std::string& src, const std::string& g) {
        return gen_name.at(gens.class_of(tag(side, src, g)));
    };

    auto rename_path = [&](int side, const Path& p) {
        const Schema& s = *sides[side];
        Path out{merged_entity(side, p.start), {}};
        std::string cur = p.start;
        for (const auto& step : p.steps) {
            out.steps.push_back(merged_gen(side, cur, step));
            if (const FkDecl* f = s.find_fk(cur, step)) cur = f->dst;
        }
        return out;
    };

    // Assemble the merged presentation.
    auto merged = std::make_shared<Schema>();
    merged->name = spec.name;
    for (int cls : ent_order) merged->entities.push_back(ent_name.at(cls));

    std::set<std::string> emitted_gens;
    auto emit_fk = [&](int side, const FkDecl& f) {
        std::string src = merged_entity(side, f.src);
        std::string name = merged_gen(side, f.src, f.name);
        if (!emitted_gens.insert(src + "." + name).second) return;
        merged->fks.push_back({name, src, merged_entity(side, f.dst)});
    };
    auto emit_attr = [&](int side, const AttrDecl& a) {
        std::string src = merged_entity(side, a.src);
        std::string name = merged_gen(side, a.src, a.name);
        if (!emitted_gens.insert(src + "." + name).second) return;
        merged->attrs.push_back({name, src, a.type});
    };
    for (const auto& f : s1.fks) emit_fk(0, f);
    for (const auto& a : s1.attrs) emit_attr(0, a);
    for (const auto& f : s2.fks) emit_fk(1, f);
    for (const auto& a : s2.attrs) emit_attr(1, a);

    std::set<std::string> emitted_eqs;
    std::set<std::string> eq_labels;
    auto emit_eq = [&](const std::string& base_label, const Path& lhs, const Path& rhs) {
        std::string sig = lhs.to_string() + "=" + rhs.to_string();
        std::string rsig = rhs.to_string() + "=" + lhs.to_string();
        if (emitted_eqs.count(sig) || emitted_eqs.count(rsig)) return;
        emitted_eqs.insert(sig);
        merged->equations.push_back({lhs, rhs, unique_name(base_label, eq_labels)});
    };
    for (const auto& eq : s1.equations)
        emit_eq(eq.label.empty() ? "eq" : eq.label, rename_path(0, eq.lhs), rename_path(0, eq.rhs));
    for (const auto& eq : s2.equations)
        emit_eq(eq.label.empty() ? "eq" : eq.label, rename_path(1, eq.lhs), rename_path(1, eq.rhs));
    for (const auto& [lp, rp] : fk_equations) emit_eq("overlap", rename_path(0, lp), rename_path(1, rp));
    for (const auto& [lp, rp] : attr_equations)
        emit_eq("overlap", rename_path(0, lp), rename_path(1, rp));

    auto diags = validate_schema(*merged);
    if (!diags.empty())
        throw EngineError(errc::SchemaMismatch,
                          "merge produced an ill-formed schema: " + diags.front().message);

    // Inclusion mappings.
    auto make_inclusion = [&](int side, const Schema& s, const std::string& mapping_name) {
        Mapping inc;
        inc.name = mapping_name;
        inc.source = side == 0 ? spec.left.target : spec.right.target;
        inc.target = merged;
        for (const auto& e : s.entities) inc.entity_map[e] = merged_entity(side, e);
        for (const auto& f : s.fks)
            inc.fk_map[{f.src, f.name}] =
                Path{merged_entity(side, f.src), {merged_gen(side, f.src, f.name)}};
        for (const auto& a : s.attrs)
            inc.attr_map[{a.src, a.name}] = AttrExpr::make_path(
                Path{merged_entity(side, a.src), {merged_gen(side, a.src, a.name)}});
        return inc;
    };
    Mapping inc1 = make_inclusion(0, s1, spec.name + "_left");
    Mapping inc2 = make_inclusion(1, s2, spec.name + "_right");

    // Entities fed by both sides get side-qualified row ids.
    std::set<std::string> shared_entities;
    {
        std::map<int, std::pair<bool, bool>> feeds;
        for (const auto& e : s1.entities) feeds[ents.class_of(tag(0, e))].first = true;
        for (const auto& e : s2.entities) feeds[ents.class_of(tag(1, e))].second = true;
        for (const auto& [cls, fd] : feeds)
            if (fd.first && fd.second) shared_entities.insert(ent_name.at(cls));
    }

    ChaseState chase(*merged, reg, cfg, "merge_" + spec.name);
    chase.seed_labels(i1.nulls.null_labels());
    chase.seed_labels(i2.nulls.null_labels());

    auto copy_side = [&](int side, const Instance& inst, const char* prefix) {
        const Schema& s = *sides[side];
        auto row_id = [&](const std::string& entity, const std::string& id) {
            return shared_entities.count(merged_entity(side, entity)) ? prefix + id : id;
        };
        for (const auto& [entity, ids] : inst.rows)
            for (const auto& id : ids)
                chase.add_row(merged_entity(side, entity), row_id(entity, id),
                              "src:" + inst.name + ":" + entity + ":" + id);
        for (const auto& [entity, ids] : inst.rows) {
            for (const auto& id : ids) {
                int h = chase.find_existing(merged_entity(side, entity), row_id(entity, id));
                for (const FkDecl* f : s.fks_from(entity)) {
                    const std::string& tgt = inst.fk_of(entity, id, f->name);
                    int ht = chase.find_existing(merged_entity(side, f->dst), row_id(f->dst, tgt));
                    chase.set_fk(h, merged_gen(side, entity, f->name), ht);
                }
                for (const AttrDecl* a : s.attrs_of(entity))
                    chase.set_attr(h, merged_gen(side, entity, a->name),
                                   inst.attr_of(entity, id, a->name));
            }
        }
    };
    copy_side(0, i1, "L:");
    copy_side(1, i2, "R:");

    // Record linkage: rows of overlap entities are identified when every
    // identifying key evaluates to equal non-null literals on both sides.
    CongruenceClosure nulls1 = i1.nulls;
    CongruenceClosure nulls2 = i2.nulls;
    for (const auto& [o_entity, key_paths] : spec.keys) {
        if (key_paths.empty()) continue;
        const std::string& e1 = spec.left.entity_map.at(o_entity);
        const std::string& e2 = spec.right.entity_map.at(o_entity);
        const std::string& me = merged_entity(0, e1);

        auto key_tuple = [&](const Mapping& leg, const Instance& inst, CongruenceClosure& nulls,
                             const std::string& entity,
                             const std::string& id) -> std::optional<std::string> {
            std::string tuple;
            for (const auto& kp : key_paths) {
                AttrExpr img = translate_attr_path(leg, kp);
                auto fresh = [&](BaseType t) { return Value::make_null("", t); };
                Value v = eval_attr_expr(inst, entity, id, img, reg, fresh);
                std::optional<Literal> lit =
                    v.is_lit() ? std::optional<Literal>(v.lit) : nulls.literal_of(v);
                if (!lit) return std::nullopt; // null keys never link
                tuple += base_type_name(literal_type(*lit)) + ":" + format_literal(*lit) + "\x1f";
            }
            return tuple;
        };

        std::map<std::string, std::string> left_by_key; // tuple -> merged row id
        auto it1 = i1.rows.find(e1);
        if (it1 != i1.rows.end()) {
            for (const auto& id : it1->second) {
                auto tuple = key_tuple(spec.left, i1, nulls1, e1, id);
                if (!tuple) continue;
                std::string mid = shared_entities.count(me) ? "L:" + id : id;
                left_by_key.emplace(*tuple, mid); // first occurrence wins
            }
        }
        auto it2 = i2.rows.find(e2);
        if (it2 != i2.rows.end()) {
            for (const auto& id : it2->second) {
                auto tuple = key_tuple(spec.right, i2, nulls2, e2, id);
                if (!tuple) continue;
                auto hit = left_by_key.find(*tuple);
                if (hit == left_by_key.end()) continue;
                std::string mid = shared_entities.count(me) ? "R:" + id : id;
                try {
                    chase.union_rows(chase.find_existing(me, hit->second),
                                     chase.find_existing(me, mid));
                } catch (const EngineError& err) {
                    if (err.code() == errc::Contradiction)
                        throw EngineError(errc::KeyConflict,
                                          "linked rows " + me + ":" + hit->second + " and " + me +
                                              ":" + mid +
                                              " disagree on a non-key attribute: " + err.what());
                    throw;
                }
            }
        }
    }

    try {
        chase.run_chase();
    } catch (const EngineError& err) {
        if (err.code() == errc::Contradiction)
            throw EngineError(errc::KeyConflict,
                              std::string("record linkage forced conflicting literals: ") +
                                  err.what());
        throw;
    }

    MergeResult result{merged, chase.finalize(merged), std::move(inc1), std::move(inc2)};
    return result;
}

Instance filter(const Instance& inst, const std::string& entity,
                const std::vector<AttrPredicate>& conjuncts) {
    const Schema& s = *inst.schema;
    if (!s.has_entity(entity))
        throw EngineError(errc::UnknownEntity, "no entity '" + entity + "'");
    for (const auto& c : conjuncts)
        if (!s.find_attr(entity, c.attr))
            throw EngineError(errc::UnknownAttribute,
                              "no attribute '" + c.attr + "' on '" + entity + "'");

    CongruenceClosure nulls = inst.nulls;
    auto matches = [&](const std::string& id) {
        for (const auto& c : conjuncts) {
            const Value& v = inst.attr_of(entity, id, c.attr);
            auto lit = nulls.literal_of(v);
            if (!lit) return false; // unknowns never satisfy a comparison
            if (lit->index() != c.rhs.index()) return false;
            bool ok = false;
            switch (c.op) {
                case CmpOp::Eq: ok = *lit == c.rhs; break;
                case CmpOp::Ne: ok = !(*lit == c.rhs); break;
                case CmpOp::Lt: ok = literal_less(*lit, c.rhs); break;
                case CmpOp::Le: ok = !literal_less(c.rhs, *lit); break;
                case CmpOp::Gt: ok = literal_less(c.rhs, *lit); break;
                case CmpOp::Ge: ok = !literal_less(*lit, c.rhs); break;
            }
            if (!ok) return false;
        }
        return true;
    };

    std::set<std::pair<std::string, std::string>> removed;
    for (const auto& id : inst.rows.at(entity))
        if (!matches(id)) removed.insert({entity, id});

    // Cascade: any row whose fk reaches a removed row goes too.
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [key, tgt] : inst.fk) {
            const auto& [src_entity, src_row, fk_name] = key;
            if (removed.count({src_entity, src_row})) continue;
            const FkDecl* f = s.find_fk(src_entity, fk_name);
            if (removed.count({f->dst, tgt})) {
                removed.insert({src_entity, src_row});
                grew = true;
            }
        }
    }

    Instance out = inst;
    out.rows.clear();
    out.fk.clear();
    out.attr.clear();
    out.lineage.clear();
    for (const auto& [e, ids] : inst.rows) {
        auto& kept = out.rows[e];
        for (const auto& id : ids)
            if (!removed.count({e, id})) kept.push_back(id);
    }
    for (const auto& [key, tgt] : inst.fk)
        if (!removed.count({std::get<0>(key), std::get<1>(key)})) out.fk[key] = tgt;
    for (const auto& [key, v] : inst.attr)
        if (!removed.count({std::get<0>(key), std::get<1>(key)})) out.attr[key] = v;
    for (const auto& [key, lin] : inst.lineage)
        if (!removed.count(key)) out.lineage[key] = lin;
    return out;
}

} // namespace funmig
