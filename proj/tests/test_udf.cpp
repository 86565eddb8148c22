#include <doctest.h>

#include "funmig/diag.hpp"
#include "funmig/udf.hpp"

using namespace funmig;
using udf::Registry;

namespace {
Value lit_s(const char* s) { return Value::make_lit(Literal(std::string(s))); }
Value lit_b(bool b) { return Value::make_lit(Literal(b)); }
} // namespace

TEST_CASE("register: nullary constant and duplicate rejection") {
    Registry reg = Registry::builtins();
    CHECK(reg.apply("dft_code", {}) == lit_s("VASP"));
    CHECK_THROWS_AS(reg.register_fn({"dft_code", {}, BaseType::String},
                                    [](const std::vector<Literal>&) {
                                        return Literal(std::string("x"));
                                    }),
                    EngineError);
}

TEST_CASE("register: unit scale with factor 1.0 is the identity") {
    Registry reg;
    reg.register_fn(udf::scale_signature("scale"), udf::make_scale(1.0));
    for (double x : {0.0, -2.5, 13.60569}) {
        Value out = reg.apply("scale", {Value::make_lit(Literal(x))});
        CHECK(out == Value::make_lit(Literal(x)));
    }
}

TEST_CASE("json_extract against a hand-built document set") {
    Registry reg = Registry::builtins();
    // Hand-parsed fixture: five flat documents and their expected fields.
    struct Doc {
        const char* json;
        const char* field;
        const char* expected;
    };
    const Doc docs[] = {
        {R"({"encut": "520"})", "encut", "520"},
        {R"({"encut": 400})", "encut", "400"},
        {R"({"xc": "PBE", "encut": "450"})", "xc", "PBE"},
        {R"({"kpoints": "4x4x4", "spin": "2"})", "spin", "2"},
        {R"({"pseudo": "PAW"})", "pseudo", "PAW"},
    };
    for (const auto& d : docs) {
        Value out = reg.apply("json_extract", {lit_s(d.json), lit_s(d.field)});
        CHECK(out == lit_s(d.expected));
    }
}

TEST_CASE("json_extract error paths") {
    Registry reg = Registry::builtins();
    CHECK_THROWS_WITH_AS(reg.apply("json_extract", {lit_s("{oops"), lit_s("f")}),
                         doctest::Contains("malformed"), EngineError);
    CHECK_THROWS_WITH_AS(reg.apply("json_extract", {lit_s(R"({"a": "1"})"), lit_s("b")}),
                         doctest::Contains("no field"), EngineError);
    CHECK_THROWS_WITH_AS(reg.apply("json_extract", {lit_s(R"([1,2])"), lit_s("a")}),
                         doctest::Contains("not a JSON object"), EngineError);
}

TEST_CASE("apply: argument checking") {
    Registry reg = Registry::builtins();
    CHECK_THROWS_AS(reg.apply("nope", {}), EngineError);
    CHECK_THROWS_AS(reg.apply("json_extract", {lit_s("{}")}), EngineError); // arity
    CHECK_THROWS_AS(reg.apply("json_extract", {lit_s("{}"), lit_b(true)}), EngineError); // type
}

TEST_CASE("apply: null-containing arguments stay symbolic") {
    Registry reg = Registry::builtins();
    Value n1 = Value::make_null("n1", BaseType::String);
    Value out = reg.apply("json_extract", {n1, lit_s("encut")});
    REQUIRE(out.is_term());
    CHECK(out.fn == "json_extract");
    CHECK(out.args.size() == 2);
    CHECK(out.type == BaseType::String);

    // Nested: a term argument keeps the application symbolic too.
    Value nested = reg.apply("json_extract", {out, lit_s("inner")});
    CHECK(nested.is_term());
}

TEST_CASE("apply: purity (repeated application is identical)") {
    Registry reg = Registry::builtins();
    Value a = reg.apply("json_extract", {lit_s(R"({"encut": "520"})"), lit_s("encut")});
    Value b = reg.apply("json_extract", {lit_s(R"({"encut": "520"})"), lit_s("encut")});
    CHECK(a == b);
}

TEST_CASE("detect_system_type: rule base cases") {
    Registry reg = Registry::builtins();
    CHECK(reg.apply("detect_system_type", {lit_b(true), lit_b(true), lit_b(true)}) ==
          lit_s("bulk"));
    CHECK(reg.apply("detect_system_type", {lit_b(true), lit_b(true), lit_b(false)}) ==
          lit_s("surface"));
    CHECK(reg.apply("detect_system_type", {lit_b(false), lit_b(false), lit_b(false)}) ==
          lit_s("molecule"));
    CHECK_THROWS_WITH_AS(
        reg.apply("detect_system_type", {lit_b(true), lit_b(false), lit_b(false)}),
        doctest::Contains("undefined"), EngineError);
}

TEST_CASE("detect_system_type: hand-labelled structures") {
    Registry reg = Registry::builtins();
    struct Row {
        bool px, py, pz;
        const char* label;
    };
    const Row rows[] = {
        {true, true, true, "bulk"},      // crystalline iron oxide
        {true, true, true, "bulk"},      // rock salt
        {true, true, false, "surface"},  // a (111) slab
        {false, true, true, "surface"},  // slab, axes permuted
        {false, false, false, "molecule"}, // water in a box
        {false, false, false, "molecule"}, // ammonia in a box
    };
    for (const auto& r : rows)
        CHECK(reg.apply("detect_system_type", {lit_b(r.px), lit_b(r.py), lit_b(r.pz)}) ==
              lit_s(r.label));
}

TEST_CASE("json extraction round-trip: every field of a flat document") {
    Registry reg = Registry::builtins();
    const char* doc = R"({"a": "1", "b": "two", "c": "3.5"})";
    const char* fields[] = {"a", "b", "c"};
    const char* expected[] = {"1", "two", "3.5"};
    for (int i = 0; i < 3; ++i)
        CHECK(reg.apply("json_extract", {lit_s(doc), lit_s(fields[i])}) == lit_s(expected[i]));
}
