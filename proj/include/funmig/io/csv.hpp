#pragma once

#include <map>
#include <string>
#include <vector>

#include "funmig/instance.hpp"

namespace funmig::io {

// One CSV file per entity named '<entity>.csv'. Header row is 'id'
// followed by the entity's generator names in declaration order. Cells:
// row ids for fks; literals, '?label' nulls or '!fn(...)' terms for
// attrs. RFC 4180 quoting, UTF-8, comma separator, LF line endings on
// export. Row lineage round-trips through '<entity>.provenance.csv'.

// Throws EngineError(HeaderMismatch / UnparsableLiteral /
// DanglingForeignKey / DuplicateId / IoError) with file/row/column
// context. Equation checking is separate (check_instance).
Instance load_csv(const std::string& dir, SchemaPtr schema,
                  const udf::Registry& reg = udf::Registry::builtins(),
                  const std::string& instance_name = "");

// Deterministic: rows sorted by id, columns in declaration order.
// Returns the files written (relative names), for reporting.
std::vector<std::string> export_csv(const Instance& inst, const std::string& dir);

// In-memory export, path -> file bytes. Used to guarantee that failed
// commands leave the output directory untouched.
std::map<std::string, std::string> render_csv(const Instance& inst);

// RFC 4180 helpers.
std::string csv_escape(const std::string& field);
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& file);

} // namespace funmig::io
