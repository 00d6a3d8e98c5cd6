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
#include "rforge/equivalences.hpp"

#include "json.hpp"

namespace rforge {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

// {"schema": 1, "kind": kind}
Json envelope(const std::string& kind);

Json to_json(const Rational& r);
Rational rational_from_json(const Json& j);
Json to_json(const Distribution& d);
Json to_json(const Literal& l);
Json to_json(const LiteralRule& r);
Json to_json(const DistOverTerms& l);
Json to_json(const DistRule& r);
Json to_json(const ProofNode& p);
Json to_json(const DistRuloid& r);
Json to_json(const Substitution& s);
Json to_json(const StateMapping& m);
Json to_json(const DistMapping& m);
// Related pairs by state name.
Json relation_json(const Pts& pts, const RefinementTrace& trace);
// Blocks of an equivalence, by state name.
Json partition_json(const Pts& pts, const RefinementTrace& trace);
Json to_json(const Pts& pts);

} // namespace rforge
