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

#include "rforge/logic.hpp"

#include <limits>

namespace rforge {

using Relation = std::vector<std::vector<char>>;

// pi R-lifted rho, decided by maximum flow over R restricted to the supports.
bool lift_check(const Relation& r, const IndexDist& pi, const IndexDist& rho);
// Same question for an equivalence given by block ids: equal mass on every block.
bool lift_check_classes(const std::vector<std::size_t>& block, const IndexDist& pi, const IndexDist& rho);

enum class RelationKind { Bisimilarity, Similarity, ReadySimilarity };

const char* to_string(RelationKind k);

struct RefinementTrace {
    RelationKind kind = RelationKind::Bisimilarity;
    // Bisimilarity: block id per state after each round; rounds.front() is the trivial partition.
    std::vector<std::vector<std::size_t>> rounds;
    // Preorders: round at which a pair was removed, or never.
    std::vector<std::vector<std::size_t>> removed_at;
    Relation relation;

    static constexpr std::size_t never = std::numeric_limits<std::size_t>::max();
    std::size_t iterations() const;
    bool related(std::size_t s, std::size_t t) const { return relation[s][t] != 0; }
};

// Throw IncompletePts on a partially explored PTS.
RefinementTrace bisimilarity(const Pts& pts);
RefinementTrace similarity(const Pts& pts);
RefinementTrace ready_similarity(const Pts& pts);
RefinementTrace compute_relation(const Pts& pts, RelationKind kind);

// Formula with s satisfying it and t not, in the logic class characterizing
// the relation; verified with the model checker before it is returned.
// Requires the pair to be outside the relation.
Formula distinguishing_formula(Pts& pts, const RefinementTrace& trace, std::size_t s, std::size_t t);

} // namespace rforge
