#pragma once

#include <string>

#include "funmig/instance.hpp"
#include "funmig/mapping.hpp"
#include "funmig/migrate.hpp"

namespace funmig::dsl {

// Deterministic, canonically ordered output: entities and generators
// sorted, equations in declaration order, rows in insertion order.
// parse(pretty_print(x)) elaborates to a structurally equal object.
std::string pretty_print(const Schema& s);
std::string pretty_print(const Mapping& f);
std::string pretty_print(const Instance& i);
std::string pretty_print(const MergeSpec& m);

} // namespace funmig::dsl
