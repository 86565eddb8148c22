#include "funmig/io/csv.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

namespace funmig::io {

namespace fs = std::filesystem;

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& file) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    size_t i = 0;

    auto end_field = [&]() {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&]() {
        end_field();
        rows.push_back(row);
        row.clear();
    };

    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    throw EngineError(errc::UnparsableLiteral,
                                      file + ": stray quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                ++i;
                break;
            case ',':
                end_field();
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_row();
                ++i;
                break;
            default:
                field += c;
                field_started = true;
                ++i;
        }
    }
    if (in_quotes)
        throw EngineError(errc::UnparsableLiteral, file + ": unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

namespace {

std::string cell_context(const std::string& file, size_t row, size_t col) {
    return file + ":row " + std::to_string(row + 1) + ":col " + std::to_string(col + 1);
}

// Cell grammar for attribute columns:
//   ?label                a labelled null
//   !fn(arg, ...)         a symbolic term
//   backslash + text      literal text whose first char would read as ? ! or backslash
//   <text>                a literal of the column's type
struct CellParser {
    const std::string& text;
    const udf::Registry& reg;
    const std::string& context;
    size_t pos = 0;

    char peek() const { return text[pos]; }
    bool eof() const { return pos >= text.size(); }

    [[noreturn]] void fail(const std::string& msg) {
        throw EngineError(errc::UnparsableLiteral, context + ": " + msg + " in '" + text + "'");
    }

    std::string ident() {
        std::string out;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            out += text[pos++];
        if (out.empty()) fail("expected an identifier");
        return out;
    }

    Value term() {
        if (peek() != '!') fail("expected '!'");
        ++pos;
        std::string fn = ident();
        if (!reg.has(fn)) fail("unknown UDF '" + fn + "'");
        const auto& sig = reg.signature_of(fn);
        if (eof() || peek() != '(') fail("expected '('");
        ++pos;
        std::vector<Value> args;
        if (!eof() && peek() != ')') {
            for (;;) {
                if (args.size() >= sig.arg_types.size()) fail("too many arguments to " + fn);
                args.push_back(arg(sig.arg_types[args.size()]));
                if (!eof() && peek() == ',') {
                    ++pos;
                    continue;
                }
                break;
            }
        }
        if (eof() || peek() != ')') fail("expected ')'");
        ++pos;
        if (args.size() != sig.arg_types.size()) fail("too few arguments to " + fn);
        return reg.apply(fn, args);
    }

    Value arg(BaseType expected) {
        if (eof()) fail("unexpected end of term");
        char c = peek();
        if (c == '!') return term();
        if (c == '?') {
            ++pos;
            return Value::make_null(ident(), expected);
        }
        if (c == '"') {
            ++pos;
            std::string out;
            while (!eof() && peek() != '"') {
                if (peek() == '\\' && pos + 1 < text.size()) {
                    ++pos;
                    char esc = text[pos++];
                    out += esc == 'n' ? '\n' : esc == 't' ? '\t' : esc;
                } else {
                    out += text[pos++];
                }
            }
            if (eof()) fail("unterminated string");
            ++pos;
            if (expected != BaseType::String) fail("unexpected string argument");
            return Value::make_lit(Literal(out));
        }
        std::string raw;
        while (!eof() && peek() != ',' && peek() != ')') raw += text[pos++];
        auto lit = parse_literal(raw, expected);
        if (!lit) fail("cannot parse '" + raw + "' as " + base_type_name(expected));
        return Value::make_lit(std::move(*lit));
    }
};

Value parse_attr_cell(const std::string& cell, BaseType type, const udf::Registry& reg,
                      const std::string& context) {
    if (!cell.empty() && cell[0] == '?') return Value::make_null(cell.substr(1), type);
    if (!cell.empty() && cell[0] == '!') {
        CellParser p{cell, reg, context};
        Value v = p.term();
        if (p.pos != cell.size())
            throw EngineError(errc::UnparsableLiteral,
                              context + ": trailing characters after term in '" + cell + "'");
        if (v.type != type)
            throw EngineError(errc::UnparsableLiteral,
                              context + ": term has type " + base_type_name(v.type) +
                                  ", column expects " + base_type_name(type));
        return v;
    }
    std::string raw = cell;
    if (!raw.empty() && raw[0] == '\\') raw = raw.substr(1);
    auto lit = parse_literal(raw, type);
    if (!lit)
        throw EngineError(errc::UnparsableLiteral,
                          context + ": cannot parse '" + cell + "' as " + base_type_name(type));
    return Value::make_lit(std::move(*lit));
}

std::string render_string_cell(const std::string& s) {
    if (!s.empty() && (s[0] == '?' || s[0] == '!' || s[0] == '\\')) return "\\" + s;
    return s;
}

std::string render_value_cell(const Value& v, CongruenceClosure& nulls) {
    switch (v.kind) {
        case Value::Kind::Lit:
            if (v.type == BaseType::String)
                return render_string_cell(std::get<std::string>(v.lit));
            return format_literal(v.lit);
        case Value::Kind::Null:
            return "?" + nulls.null_class_rep(v.label);
        case Value::Kind::Term: {
            std::string out = "!" + v.fn + "(";
            for (size_t i = 0; i < v.args.size(); ++i) {
                if (i) out += ",";
                const Value& a = v.args[i];
                if (a.kind == Value::Kind::Lit)
                    out += quote_literal(a.lit); // strings quoted inside terms
                else
                    out += render_value_cell(a, nulls);
            }
            return out + ")";
        }
    }
    return {};
}

} // namespace

Instance load_csv(const std::string& dir, SchemaPtr schema, const udf::Registry& reg,
                  const std::string& instance_name) {
    std::string name = instance_name;
    if (name.empty()) name = fs::path(dir).filename().string();
    InstanceBuilder builder(schema, name, &reg);

    struct PendingFk {
        std::string entity, row, fk, target;
    };
    std::vector<PendingFk> pending_fks;
    struct PendingLineage {
        std::string entity, row, lineage;
    };
    std::vector<PendingLineage> pending_lineage;

    for (const auto& entity : schema->entities) {
        fs::path file = fs::path(dir) / (entity + ".csv");
        std::ifstream in(file);
        if (!in)
            throw EngineError(errc::IoError, "missing bundle file '" + file.string() + "'");
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        auto rows = parse_csv(text, file.string());
        if (rows.empty())
            throw EngineError(errc::HeaderMismatch, file.string() + ": missing header row");

        std::vector<std::string> expected_header{"id"};
        for (const auto& g : schema->generator_names(entity)) expected_header.push_back(g);
        if (rows[0] != expected_header) {
            std::string want;
            for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
            std::string got;
            for (const auto& h : rows[0]) got += (got.empty() ? "" : ",") + h;
            throw EngineError(errc::HeaderMismatch,
                              file.string() + ": header is '" + got + "', expected '" + want + "'");
        }

        auto entity_fks = schema->fks_from(entity);
        auto entity_attrs = schema->attrs_of(entity);
        for (size_t r = 1; r < rows.size(); ++r) {
            const auto& cells = rows[r];
            if (cells.size() != expected_header.size())
                throw EngineError(errc::UnparsableLiteral,
                                  cell_context(file.string(), r, cells.size()) + ": row has " +
                                      std::to_string(cells.size()) + " cells, expected " +
                                      std::to_string(expected_header.size()));
            const std::string& id = cells[0];
            if (id.empty())
                throw EngineError(errc::UnparsableLiteral,
                                  cell_context(file.string(), r, 0) + ": empty row id");
            size_t before = builder.diagnostics().size();
            builder.add_row(entity, id);
            if (builder.diagnostics().size() != before)
                throw EngineError(errc::DuplicateId, file.string() + ": duplicate row id '" + id +
                                                         "' at row " + std::to_string(r + 1));
            size_t col = 1;
            for (const FkDecl* f : entity_fks)
                pending_fks.push_back({entity, id, f->name, cells[col++]});
            for (const AttrDecl* a : entity_attrs) {
                Value v = parse_attr_cell(cells[col], a->type, reg,
                                          cell_context(file.string(), r, col));
                builder.set_attr(entity, id, a->name, std::move(v));
                ++col;
            }
        }

        fs::path prov = fs::path(dir) / (entity + ".provenance.csv");
        std::ifstream pin(prov);
        if (pin) {
            std::string ptext((std::istreambuf_iterator<char>(pin)),
                              std::istreambuf_iterator<char>());
            auto prows = parse_csv(ptext, prov.string());
            for (size_t r = 1; r < prows.size(); ++r) {
                if (prows[r].size() != 2)
                    throw EngineError(errc::HeaderMismatch,
                                      prov.string() + ": provenance rows need 'id,lineage'");
                pending_lineage.push_back({entity, prows[r][0], prows[r][1]});
            }
        }
    }

    for (const auto& p : pending_fks) builder.set_fk(p.entity, p.row, p.fk, p.target);
    for (const auto& p : pending_lineage) builder.set_lineage(p.entity, p.row, p.lineage);

    auto inst = builder.finalize();
    if (!inst) {
        const auto& d = builder.diagnostics().front();
        throw EngineError(d.code, dir + ": " + d.message);
    }
    return *inst;
}

std::map<std::string, std::string> render_csv(const Instance& inst) {
    std::map<std::string, std::string> files;
    CongruenceClosure nulls = inst.nulls;

    for (const auto& entity : inst.schema->entities) {
        std::string out = "id";
        for (const auto& g : inst.schema->generator_names(entity)) out += "," + csv_escape(g);
        out += "\n";

        std::vector<std::string> ids;
        auto it = inst.rows.find(entity);
        if (it != inst.rows.end()) ids = it->second;
        std::sort(ids.begin(), ids.end());

        auto entity_fks = inst.schema->fks_from(entity);
        auto entity_attrs = inst.schema->attrs_of(entity);
        std::string prov;
        for (const auto& id : ids) {
            out += csv_escape(id);
            for (const FkDecl* f : entity_fks)
                out += "," + csv_escape(inst.fk_of(entity, id, f->name));
            for (const AttrDecl* a : entity_attrs)
                out += "," + csv_escape(render_value_cell(inst.attr_of(entity, id, a->name), nulls));
            out += "\n";
            auto lin = inst.lineage.find({entity, id});
            if (lin != inst.lineage.end())
                prov += csv_escape(id) + "," + csv_escape(lin->second) + "\n";
        }
        files[entity + ".csv"] = std::move(out);
        if (!prov.empty()) files[entity + ".provenance.csv"] = "id,lineage\n" + prov;
    }
    return files;
}

std::vector<std::string> export_csv(const Instance& inst, const std::string& dir) {
    auto files = render_csv(inst);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw EngineError(errc::IoError, "cannot create output directory '" + dir + "'");
    std::vector<std::string> written;
    for (const auto& [name, content] : files) {
        fs::path p = fs::path(dir) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw EngineError(errc::IoError, "cannot write '" + p.string() + "'");
        out << content;
        written.push_back(name);
    }
    return written;
}

} // namespace funmig::io
