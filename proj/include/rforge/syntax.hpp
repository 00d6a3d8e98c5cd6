/*
 * Copyright 2026 The ruloid-forge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "rforge/decomposition.hpp"
#include "rforge/dist_rules.hpp"
#include "rforge/logic.hpp"
#include "rforge/pgsos.hpp"
#include "rforge/semantics.hpp"

#include <string>
#include <string_view>

namespace rforge {

// How identifiers in terms are resolved. With a signature, declared nullary
// operators are constants and other bare identifiers are variables. Without
// one, operators are inferred from their use.
struct TermContext {
    const Signature* sig = nullptr;
    bool bare_constants = false;
};

PtsSpec parse_spec(std::string_view text);
Term parse_term(std::string_view text, const TermContext& ctx);
DistTerm parse_dist_term(std::string_view text, const TermContext& ctx);
Formula parse_formula(std::string_view text);
// "oplus{r: F, ...}" or a single state formula with weight 1.
DistFormula parse_dist_formula(std::string_view text);

// actions a; states s, u; s -a-> {s: 1/2, u: 1/2};
Pts parse_pts(std::string_view text);

// "mu: 1/4, 3/4; nu: 1/3, 2/3"
Shapes parse_shapes(std::string_view text);

// "{t1: 1/10, t2: 3/10}" over closed terms; targets must be distinct.
std::vector<std::pair<Rational, Term>> parse_weighted_terms(std::string_view text, const TermContext& ctx);

// "x = t, mu = {t1: 1/2, t2: 1/2}"; a braced value binds a distribution variable.
Substitution parse_substitution(std::string_view text, const TermContext& ctx);

std::string print_spec(const PtsSpec& spec);
std::string print_pts(const Pts& pts);
std::string print_shapes(const Shapes& shapes);

// Whole file contents; throws Error(Input) when unreadable.
std::string read_file(const std::string& path);

} // namespace rforge
