#include "funmig/instance.hpp"

#include <algorithm>
#include <set>

namespace funmig {

bool Instance::has_row(const std::string& entity, const std::string& id) const {
    auto it = rows.find(entity);
    if (it == rows.end()) return false;
    return std::find(it->second.begin(), it->second.end(), id) != it->second.end();
}

const std::string& Instance::fk_of(const std::string& entity, const std::string& row,
                                   const std::string& fk_name) const {
    auto it = fk.find({entity, row, fk_name});
    if (it == fk.end())
        throw EngineError(errc::DanglingForeignKey,
                          "fk '" + fk_name + "' unassigned on " + entity + ":" + row);
    return it->second;
}

const Value& Instance::attr_of(const std::string& entity, const std::string& row,
                               const std::string& attr_name) const {
    auto it = attr.find({entity, row, attr_name});
    if (it == attr.end())
        throw EngineError(errc::UnknownAttribute,
                          "attr '" + attr_name + "' unassigned on " + entity + ":" + row);
    return it->second;
}

size_t Instance::row_count() const {
    size_t n = 0;
    for (const auto& [_, ids] : rows) n += ids.size();
    return n;
}

bool Instance::structurally_equal(const Instance& other) const {
    if (!schema || !other.schema || !schema->structurally_equal(*other.schema)) return false;
    if (rows.size() != other.rows.size()) return false;
    for (const auto& [entity, ids] : rows) {
        auto it = other.rows.find(entity);
        if (it == other.rows.end()) return false;
        std::set<std::string> a(ids.begin(), ids.end());
        std::set<std::string> b(it->second.begin(), it->second.end());
        if (a != b) return false;
    }
    if (fk != other.fk || attr != other.attr) return false;
    return lineage == other.lineage;
}

PathResult evaluate_path(const Instance& inst, const std::string& row, const Path& p) {
    const Schema& s = *inst.schema;
    if (!inst.has_row(p.start, row))
        throw EngineError(errc::UnknownRow, "no row '" + row + "' in entity '" + p.start + "'");
    std::string cur_entity = p.start;
    std::string cur_row = row;
    for (size_t i = 0; i < p.steps.size(); ++i) {
        const std::string& step = p.steps[i];
        if (const FkDecl* f = s.find_fk(cur_entity, step)) {
            cur_row = inst.fk_of(cur_entity, cur_row, step);
            cur_entity = f->dst;
            continue;
        }
        if (s.find_attr(cur_entity, step)) {
            if (i + 1 != p.steps.size())
                throw EngineError(errc::TypeMismatch,
                                  "attribute step mid-path in '" + p.to_string() + "'");
            return inst.attr_of(cur_entity, cur_row, step);
        }
        throw EngineError(errc::UnknownGenerator,
                          "no generator '" + step + "' at entity '" + cur_entity + "'");
    }
    return cur_row;
}

ViolationReport check_instance(const Instance& inst, double float_tol) {
    ViolationReport report;
    const Schema& s = *inst.schema;
    // A scratch copy: equality queries intern values into the closure.
    CongruenceClosure nulls = inst.nulls;

    for (const auto& eq : s.equations) {
        auto rows_it = inst.rows.find(eq.lhs.start);
        if (rows_it == inst.rows.end()) continue;
        for (const auto& row : rows_it->second) {
            PathResult l = evaluate_path(inst, row, eq.lhs);
            PathResult r = evaluate_path(inst, row, eq.rhs);
            bool ok;
            std::string ls, rs;
            if (std::holds_alternative<std::string>(l)) {
                ls = std::get<std::string>(l);
                rs = std::get<std::string>(r);
                ok = ls == rs;
            } else {
                const Value& lv = std::get<Value>(l);
                const Value& rv = std::get<Value>(r);
                ls = lv.to_string();
                rs = rv.to_string();
                ok = nulls.equal(lv, rv, float_tol);
            }
            if (!ok)
                report.violations.push_back(
                    Violation{eq.label.empty() ? eq.to_string() : eq.label, eq.lhs.start, row, ls, rs});
        }
    }
    return report;
}

Instance equate_nulls(const Instance& inst, const Value& a, const Value& b) {
    if (a.type != b.type)
        throw EngineError(errc::TypeMismatch, "cannot equate values of types " +
                                                  base_type_name(a.type) + " and " +
                                                  base_type_name(b.type));
    Instance out = inst;
    out.nulls.equate(a, b); // throws Contradiction before `out` escapes
    return out;
}

InstanceBuilder::InstanceBuilder(SchemaPtr schema, std::string instance_name,
                                 const udf::Registry* registry)
    : registry_(registry) {
    inst_.schema = std::move(schema);
    inst_.name = std::move(instance_name);
}

InstanceBuilder& InstanceBuilder::add_row(const std::string& entity, const std::string& id) {
    if (!inst_.schema->has_entity(entity)) {
        diags_.push_back({errc::UnknownEntity, "no entity '" + entity + "'", {}});
        return *this;
    }
    auto& ids = inst_.rows[entity];
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
        diags_.push_back({errc::DuplicateId, "row '" + id + "' already exists in '" + entity + "'", {}});
        return *this;
    }
    ids.push_back(id);
    return *this;
}

InstanceBuilder& InstanceBuilder::set_fk(const std::string& entity, const std::string& row,
                                         const std::string& fk_name,
                                         const std::string& target_row) {
    const FkDecl* f = inst_.schema->find_fk(entity, fk_name);
    if (!f) {
        diags_.push_back({errc::UnknownGenerator, "no fk '" + fk_name + "' on '" + entity + "'", {}});
        return *this;
    }
    if (!inst_.has_row(entity, row)) {
        diags_.push_back({errc::UnknownRow, "no row '" + row + "' in '" + entity + "'", {}});
        return *this;
    }
    inst_.fk[{entity, row, fk_name}] = target_row;
    return *this;
}

InstanceBuilder& InstanceBuilder::set_attr(const std::string& entity, const std::string& row,
                                           const std::string& attr_name, Value v) {
    const AttrDecl* a = inst_.schema->find_attr(entity, attr_name);
    if (!a) {
        diags_.push_back(
            {errc::UnknownGenerator, "no attr '" + attr_name + "' on '" + entity + "'", {}});
        return *this;
    }
    if (v.type != a->type) {
        diags_.push_back({errc::TypeMismatch, "attr '" + attr_name + "' expects " +
                                                  base_type_name(a->type) + ", got " +
                                                  base_type_name(v.type),
                          {}});
        return *this;
    }
    if (!inst_.has_row(entity, row)) {
        diags_.push_back({errc::UnknownRow, "no row '" + row + "' in '" + entity + "'", {}});
        return *this;
    }
    note_labels(v);
    inst_.attr[{entity, row, attr_name}] = std::move(v);
    return *this;
}

void InstanceBuilder::note_labels(const Value& v) {
    if (v.kind == Value::Kind::Null) used_labels_.insert(v.label);
    for (const auto& a : v.args) note_labels(a);
}

InstanceBuilder& InstanceBuilder::seed_nulls(const CongruenceClosure& c) {
    inst_.nulls = c;
    for (const auto& label : inst_.nulls.null_labels()) used_labels_.insert(label);
    return *this;
}

InstanceBuilder& InstanceBuilder::set_lineage(const std::string& entity, const std::string& row,
                                              const std::string& provenance) {
    inst_.lineage[{entity, row}] = provenance;
    return *this;
}

Value InstanceBuilder::fresh_null(const std::string& entity, const std::string& generator,
                                  BaseType t) {
    int& counter = null_counters_[entity + "_" + generator];
    std::string label;
    do {
        ++counter;
        label = entity + "_" + generator + "_" + std::to_string(counter);
    } while (used_labels_.count(label));
    used_labels_.insert(label);
    return Value::make_null(label, t);
}

std::optional<Instance> InstanceBuilder::finalize() {
    size_t before = diags_.size();
    for (const auto& [entity, ids] : inst_.rows) {
        auto entity_fks = inst_.schema->fks_from(entity);
        auto entity_attrs = inst_.schema->attrs_of(entity);
        for (const auto& id : ids) {
            for (const FkDecl* f : entity_fks) {
                auto it = inst_.fk.find({entity, id, f->name});
                if (it == inst_.fk.end()) {
                    diags_.push_back({errc::DanglingForeignKey,
                                      "fk '" + f->name + "' unassigned on row " + entity + ":" + id,
                                      {}});
                } else if (!inst_.has_row(f->dst, it->second)) {
                    diags_.push_back({errc::DanglingForeignKey,
                                      "fk '" + f->name + "' on row " + entity + ":" + id +
                                          " points to missing row " + f->dst + ":" + it->second,
                                      {}});
                }
            }
            for (const AttrDecl* a : entity_attrs) {
                if (!inst_.attr.count({entity, id, a->name}))
                    inst_.attr[{entity, id, a->name}] = fresh_null(entity, a->name, a->type);
            }
        }
    }
    if (diags_.size() != before) return std::nullopt;
    return inst_;
}

} // namespace funmig
