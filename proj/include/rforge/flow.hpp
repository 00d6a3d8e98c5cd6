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

#include "rforge/rational.hpp"

#include <vector>

namespace rforge {

// Bipartite transportation problem with uncapacitated allowed edges.
struct Transport {
    std::vector<Rational> supply;
    std::vector<Rational> demand;
    std::vector<std::vector<char>> allowed; // supply x demand
};

struct FlowResult {
    Rational value;
    std::vector<std::vector<Rational>> plan;
};

// Exact maximum flow (shortest augmenting paths).
FlowResult max_transport(const Transport& t);

// Total supply equals total demand and all of it can be routed.
bool feasible(const Transport& t, std::vector<std::vector<Rational>>* plan = nullptr);

// feasible() over integer supplies and demands.
bool feasible_int(const std::vector<long>& supply, const std::vector<long>& demand,
                  const std::vector<std::vector<char>>& allowed, std::vector<std::vector<long>>* plan = nullptr);

// Supplies and demands scaled by a common denominator, when it stays small.
bool scale_to_int(const std::vector<Rational>& supply, const std::vector<Rational>& demand, std::vector<long>& s,
                  std::vector<long>& d);

} // namespace rforge
