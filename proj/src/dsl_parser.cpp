#include "funmig/dsl/parser.hpp"

#include <cctype>
#include <set>

namespace funmig::dsl {

namespace {

enum class Tok {
    Ident, Int, Float, String, NullLabel, // ?label
    LBrace, RBrace, LParen, RParen, Colon, Semi, Comma, Dot, Arrow, Assign,
    EqEq, NotEq, Lt, Le, Gt, Ge,
    Kw, End,
};

const std::set<std::string> kKeywords = {
    "schema", "entities", "fks", "attrs", "equations", "mapping", "entity", "fk",
    "attr", "instance", "row", "merge", "overlap", "left", "right", "keys",
    "migrate", "filter", "mode", "delta", "sigma", "where", "and", "import",
    "null", "true", "false", "id",
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Literal lit;
    Span span;
};

class Lexer {
public:
    Lexer(const std::string& text, const std::string& file) : text_(text), file_(file) {}

    std::vector<Token> run(std::vector<Diagnostic>& diags) {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            Span span = here();
            if (eof()) {
                out.push_back({Tok::End, "", {}, span});
                break;
            }
            char c = peek();
            if (c == '{') { out.push_back(tok(Tok::LBrace, "{", span)); continue; }
            if (c == '}') { out.push_back(tok(Tok::RBrace, "}", span)); continue; }
            if (c == '(') { out.push_back(tok(Tok::LParen, "(", span)); continue; }
            if (c == ')') { out.push_back(tok(Tok::RParen, ")", span)); continue; }
            if (c == ':') { out.push_back(tok(Tok::Colon, ":", span)); continue; }
            if (c == ';') { out.push_back(tok(Tok::Semi, ";", span)); continue; }
            if (c == ',') { out.push_back(tok(Tok::Comma, ",", span)); continue; }
            if (c == '.') { out.push_back(tok(Tok::Dot, ".", span)); continue; }
            if (c == '=') {
                get();
                if (!eof() && peek() == '=') { get(); out.push_back({Tok::EqEq, "==", {}, span}); }
                else out.push_back({Tok::Assign, "=", {}, span});
                continue;
            }
            if (c == '!') {
                get();
                if (!eof() && peek() == '=') { get(); out.push_back({Tok::NotEq, "!=", {}, span}); }
                else diags.push_back({errc::SyntaxError, "stray '!'", span});
                continue;
            }
            if (c == '<') {
                get();
                if (!eof() && peek() == '=') { get(); out.push_back({Tok::Le, "<=", {}, span}); }
                else out.push_back({Tok::Lt, "<", {}, span});
                continue;
            }
            if (c == '>') {
                get();
                if (!eof() && peek() == '=') { get(); out.push_back({Tok::Ge, ">=", {}, span}); }
                else out.push_back({Tok::Gt, ">", {}, span});
                continue;
            }
            if (c == '-') {
                // '--' comments are consumed above; here it is an arrow or a
                // negative number.
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    get(); get();
                    out.push_back({Tok::Arrow, "->", {}, span});
                    continue;
                }
                if (pos_ + 1 < text_.size() &&
                    (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                    out.push_back(lex_number(span));
                    continue;
                }
                get();
                diags.push_back({errc::SyntaxError, "stray '-'", span});
                continue;
            }
            if (c == '"') { out.push_back(lex_string(span, diags)); continue; }
            if (c == '?') {
                get();
                std::string label = lex_ident_text();
                if (label.empty())
                    diags.push_back({errc::SyntaxError, "expected label after '?'", span});
                out.push_back({Tok::NullLabel, label, {}, span});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(lex_number(span));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string word = lex_ident_text();
                out.push_back({kKeywords.count(word) ? Tok::Kw : Tok::Ident, word, {}, span});
                continue;
            }
            diags.push_back({errc::SyntaxError,
                             std::string("unexpected character '") + c + "'", span});
            get();
        }
        return out;
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() {
        char c = text_[pos_++];
        if (c == '\n') { ++line_; col_ = 1; }
        else ++col_;
        return c;
    }
    Span here() const { return {file_, line_, col_}; }
    Token tok(Tok kind, const char* text, Span span) {
        get();
        return {kind, text, {}, span};
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { get(); continue; }
            if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
                while (!eof() && peek() != '\n') get();
                continue;
            }
            break;
        }
    }

    std::string lex_ident_text() {
        std::string out;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            out += get();
        return out;
    }

    Token lex_number(Span span) {
        std::string out;
        bool is_float = false;
        if (peek() == '-') out += get();
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) out += get();
        if (!eof() && peek() == '.' && pos_ + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            is_float = true;
            out += get();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) out += get();
        }
        if (!eof() && (peek() == 'e' || peek() == 'E')) {
            size_t save = pos_;
            std::string exp;
            exp += get();
            if (!eof() && (peek() == '+' || peek() == '-')) exp += get();
            if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                is_float = true;
                while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) exp += get();
                out += exp;
            } else {
                pos_ = save; // not an exponent after all
            }
        }
        Token t;
        t.span = span;
        if (is_float) {
            t.kind = Tok::Float;
            t.lit = *parse_literal(out, BaseType::Float);
        } else {
            t.kind = Tok::Int;
            t.lit = *parse_literal(out, BaseType::Int);
        }
        t.text = out;
        return t;
    }

    Token lex_string(Span span, std::vector<Diagnostic>& diags) {
        get(); // opening quote
        std::string out;
        while (!eof() && peek() != '"') {
            char c = get();
            if (c == '\\' && !eof()) {
                char esc = get();
                switch (esc) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default:
                        diags.push_back({errc::SyntaxError,
                                         std::string("unknown escape '\\") + esc + "'", span});
                }
            } else {
                out += c;
            }
        }
        if (eof()) {
            diags.push_back({errc::SyntaxError, "unterminated string literal", span});
        } else {
            get(); // closing quote
        }
        return {Tok::String, out, Literal(out), span};
    }

    const std::string& text_;
    std::string file_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Thrown internally to unwind to the declaration level on syntax errors.
struct ParseAbort {};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    std::vector<Declaration> run() {
        std::vector<Declaration> decls;
        while (!at(Tok::End)) {
            try {
                decls.push_back(declaration());
            } catch (const ParseAbort&) {
                recover();
            }
        }
        return decls;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(size_t n) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_kw(const char* w) const { return cur().kind == Tok::Kw && cur().text == w; }
    Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

    [[noreturn]] void fail(const std::string& expected) {
        std::string got = cur().kind == Tok::End ? "end of input" : "'" + cur().text + "'";
        diags_.push_back(
            {errc::SyntaxError, "expected " + expected + ", got " + got, cur().span});
        throw ParseAbort{};
    }

    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(what);
        return take();
    }

    Token expect_kw(const char* w) {
        if (!at_kw(w)) fail(std::string("'") + w + "'");
        return take();
    }

    std::string ident(const char* what) {
        if (!at(Tok::Ident)) fail(what);
        return take().text;
    }

    // Skip to the next plausible declaration start.
    void recover() {
        while (!at(Tok::End)) {
            if (cur().kind == Tok::Kw &&
                (cur().text == "schema" || cur().text == "mapping" || cur().text == "instance" ||
                 cur().text == "merge" || cur().text == "migrate" || cur().text == "filter" ||
                 cur().text == "import"))
                return;
            take();
        }
    }

    Declaration declaration() {
        if (at_kw("schema")) return schema_decl();
        if (at_kw("mapping")) return mapping_decl();
        if (at_kw("instance")) return instance_decl();
        if (at_kw("merge")) return merge_decl();
        if (at_kw("migrate")) return migrate_decl();
        if (at_kw("filter")) return filter_decl();
        if (at_kw("import")) return import_decl();
        fail("a declaration (schema, mapping, instance, merge, migrate, filter, import)");
    }

    PathSyntax path() {
        PathSyntax p;
        p.span = cur().span;
        p.start = ident("an entity name");
        while (at(Tok::Dot)) {
            take();
            if (at_kw("id")) { take(); continue; } // identity step, unit law
            p.steps.push_back(ident("a generator name or 'id'"));
        }
        return p;
    }

    ExprSyntax expr() {
        ExprSyntax e;
        e.span = cur().span;
        if (at_kw("null")) {
            take();
            e.kind = ExprSyntax::Kind::Null;
            return e;
        }
        if (at(Tok::NullLabel)) {
            e.kind = ExprSyntax::Kind::NullLabel;
            e.label = take().text;
            return e;
        }
        if (at_kw("true") || at_kw("false")) {
            e.kind = ExprSyntax::Kind::Lit;
            e.lit = Literal(take().text == "true");
            return e;
        }
        if (at(Tok::Int) || at(Tok::Float) || at(Tok::String)) {
            e.kind = ExprSyntax::Kind::Lit;
            e.lit = take().lit;
            return e;
        }
        if (at(Tok::Ident) && ahead(1).kind == Tok::LParen) {
            e.kind = ExprSyntax::Kind::Apply;
            e.fn = take().text;
            take(); // (
            if (!at(Tok::RParen)) {
                e.args.push_back(expr());
                while (at(Tok::Comma)) {
                    take();
                    e.args.push_back(expr());
                }
            }
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::Ident)) {
            e.kind = ExprSyntax::Kind::Path;
            e.path = path();
            return e;
        }
        fail("an attribute expression (path, literal, null, or udf(...))");
    }

    Declaration import_decl() {
        ImportDecl d;
        d.span = cur().span;
        expect_kw("import");
        d.path = expect(Tok::String, "a quoted file path").text;
        expect(Tok::Semi, "';'");
        return d;
    }

    Declaration schema_decl() {
        SchemaDecl d;
        d.span = cur().span;
        expect_kw("schema");
        d.name = ident("a schema name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at_kw("entities")) {
                take();
                if (!at(Tok::Semi)) {
                    Span sp = cur().span;
                    d.entities.push_back({ident("an entity name"), sp});
                    while (at(Tok::Comma)) {
                        take();
                        sp = cur().span;
                        d.entities.push_back({ident("an entity name"), sp});
                    }
                }
                expect(Tok::Semi, "';'");
            } else if (at_kw("fks")) {
                take();
                while (at(Tok::Ident)) {
                    FkSyntax f;
                    f.span = cur().span;
                    f.name = ident("a foreign key name");
                    expect(Tok::Colon, "':'");
                    f.src = ident("a source entity");
                    expect(Tok::Arrow, "'->'");
                    f.dst = ident("a target entity");
                    expect(Tok::Semi, "';'");
                    d.fks.push_back(std::move(f));
                }
            } else if (at_kw("attrs")) {
                take();
                while (at(Tok::Ident)) {
                    AttrSyntax a;
                    a.span = cur().span;
                    a.name = ident("an attribute name");
                    expect(Tok::Colon, "':'");
                    a.src = ident("a source entity");
                    expect(Tok::Arrow, "'->'");
                    a.type_name = ident("a base type (Int, Float, String, Bool)");
                    expect(Tok::Semi, "';'");
                    d.attrs.push_back(std::move(a));
                }
            } else if (at_kw("equations")) {
                take();
                while (at(Tok::Ident)) {
                    EquationSyntax eq;
                    eq.span = cur().span;
                    if (ahead(1).kind == Tok::Colon) {
                        eq.label = take().text;
                        take(); // :
                    }
                    eq.lhs = path();
                    expect(Tok::Assign, "'='");
                    eq.rhs = path();
                    expect(Tok::Semi, "';'");
                    d.equations.push_back(std::move(eq));
                }
            } else {
                fail("'entities', 'fks', 'attrs', 'equations' or '}'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Declaration mapping_decl() {
        MappingDecl d;
        d.span = cur().span;
        expect_kw("mapping");
        d.name = ident("a mapping name");
        expect(Tok::Colon, "':'");
        d.source = ident("a source schema name");
        expect(Tok::Arrow, "'->'");
        d.target = ident("a target schema name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            MappingEntrySyntax entry;
            entry.span = cur().span;
            if (at_kw("entity")) {
                take();
                entry.kind = MappingEntrySyntax::Kind::Entity;
                entry.key = ident("a source entity");
                expect(Tok::Arrow, "'->'");
                entry.entity_target = ident("a target entity");
            } else if (at_kw("fk")) {
                take();
                entry.kind = MappingEntrySyntax::Kind::Fk;
                entry.key = ident("a foreign key name");
                if (at(Tok::Dot)) {
                    take();
                    entry.key_entity = entry.key;
                    entry.key = ident("a foreign key name");
                }
                expect(Tok::Arrow, "'->'");
                entry.path_target = path();
            } else if (at_kw("attr")) {
                take();
                entry.kind = MappingEntrySyntax::Kind::Attr;
                entry.key = ident("an attribute name");
                if (at(Tok::Dot)) {
                    take();
                    entry.key_entity = entry.key;
                    entry.key = ident("an attribute name");
                }
                expect(Tok::Arrow, "'->'");
                entry.expr_target = expr();
            } else {
                fail("'entity', 'fk', 'attr' or '}'");
            }
            expect(Tok::Semi, "';'");
            d.entries.push_back(std::move(entry));
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Declaration instance_decl() {
        InstanceDecl d;
        d.span = cur().span;
        expect_kw("instance");
        d.name = ident("an instance name");
        expect(Tok::Colon, "':'");
        d.schema = ident("a schema name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            InstanceEntitySyntax ent;
            ent.span = cur().span;
            ent.entity = ident("an entity name");
            expect(Tok::LBrace, "'{'");
            while (at_kw("row")) {
                RowSyntax row;
                row.span = cur().span;
                take(); // row
                if (at(Tok::Ident) || at(Tok::Int)) row.id = take().text;
                else fail("a row id");
                expect(Tok::LBrace, "'{'");
                while (!at(Tok::RBrace)) {
                    RowAssignSyntax assign;
                    assign.span = cur().span;
                    assign.generator = ident("a generator name");
                    expect(Tok::Assign, "'='");
                    if (at(Tok::NullLabel)) {
                        assign.kind = RowAssignSyntax::Kind::NullLabel;
                        assign.null_label = take().text;
                    } else if ((at(Tok::Ident) && ahead(1).kind != Tok::LParen &&
                                ahead(1).kind != Tok::Dot) ||
                               at(Tok::Int)) {
                        // Bare id: a row reference or an integer literal;
                        // the elaborator decides by generator kind.
                        assign.kind = RowAssignSyntax::Kind::RowId;
                        assign.row_id = take().text;
                    } else {
                        assign.kind = RowAssignSyntax::Kind::Expr;
                        assign.expr = expr();
                    }
                    expect(Tok::Semi, "';'");
                    row.assigns.push_back(std::move(assign));
                }
                expect(Tok::RBrace, "'}'");
                ent.rows.push_back(std::move(row));
            }
            expect(Tok::RBrace, "'}'");
            d.entities.push_back(std::move(ent));
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Declaration merge_decl() {
        MergeDecl d;
        d.span = cur().span;
        expect_kw("merge");
        d.name = ident("a merge name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at_kw("overlap")) {
                take();
                d.overlap = ident("a schema name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("left")) {
                take();
                d.left = ident("a mapping name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("right")) {
                take();
                d.right = ident("a mapping name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("keys")) {
                take();
                MergeKeySyntax k;
                k.span = cur().span;
                k.entity = ident("an overlap entity");
                expect(Tok::Colon, "':'");
                k.paths.push_back(path());
                while (at(Tok::Comma)) {
                    take();
                    k.paths.push_back(path());
                }
                expect(Tok::Semi, "';'");
                d.keys.push_back(std::move(k));
            } else {
                fail("'overlap', 'left', 'right', 'keys' or '}'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Declaration migrate_decl() {
        MigrateDecl d;
        d.span = cur().span;
        expect_kw("migrate");
        d.name = ident("a migration name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at_kw("mapping")) {
                take();
                d.mapping = ident("a mapping name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("mode")) {
                take();
                if (at_kw("delta") || at_kw("sigma")) d.mode = take().text;
                else fail("'delta' or 'sigma'");
                expect(Tok::Semi, "';'");
            } else {
                fail("'mapping', 'mode' or '}'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    Declaration filter_decl() {
        FilterDecl d;
        d.span = cur().span;
        expect_kw("filter");
        d.name = ident("a filter name");
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at_kw("schema")) {
                take();
                d.schema = ident("a schema name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("entity")) {
                take();
                d.entity = ident("an entity name");
                expect(Tok::Semi, "';'");
            } else if (at_kw("where")) {
                take();
                for (;;) {
                    FilterCondSyntax c;
                    c.span = cur().span;
                    c.attr = ident("an attribute name");
                    if (at(Tok::EqEq) || at(Tok::NotEq) || at(Tok::Lt) || at(Tok::Le) ||
                        at(Tok::Gt) || at(Tok::Ge))
                        c.op = take().text;
                    else
                        fail("a comparison operator (==, !=, <, <=, >, >=)");
                    if (at(Tok::Int) || at(Tok::Float) || at(Tok::String)) c.rhs = take().lit;
                    else if (at_kw("true") || at_kw("false")) c.rhs = Literal(take().text == "true");
                    else fail("a literal");
                    d.conds.push_back(std::move(c));
                    if (at_kw("and")) { take(); continue; }
                    break;
                }
                expect(Tok::Semi, "';'");
            } else {
                fail("'schema', 'entity', 'where' or '}'");
            }
        }
        expect(Tok::RBrace, "'}'");
        return d;
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    size_t pos_ = 0;
};

} // namespace

ParseResult parse(const std::string& text, const std::string& file) {
    ParseResult result;
    Lexer lexer(text, file);
    std::vector<Token> tokens = lexer.run(result.diagnostics);
    if (!result.diagnostics.empty()) return result;
    Parser parser(std::move(tokens), result.diagnostics);
    result.decls = parser.run();
    return result;
}

} // namespace funmig::dsl
