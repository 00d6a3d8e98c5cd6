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

#include "rforge/dist_rules.hpp"
#include "rforge/logic.hpp"
#include "rforge/ruloids.hpp"

#include <map>
#include <optional>

namespace rforge {

// Support pattern of a transportation plan with one plan realizing it.
struct Matching {
    std::vector<std::vector<char>> pattern;
    std::vector<std::vector<Rational>> weights;
};

// Every pattern S such that some plan with row sums q and column sums r is
// positive exactly on S. Stops after limit patterns and sets truncated.
std::vector<Matching> enumerate_matchings(const std::vector<Rational>& q, const std::vector<Rational>& r,
                                          std::size_t limit, bool* truncated = nullptr);

// Variable to formula; absent variables carry tt.
using StateMapping = std::map<std::string, Formula>;

struct DistMapping {
    std::map<std::string, Formula> state;    // absent: tt
    std::map<std::string, DistFormula> dist; // absent: 1: tt
    friend bool operator==(const DistMapping&, const DistMapping&) = default;
};

int compare(const StateMapping& a, const StateMapping& b);
int compare(const DistMapping& a, const DistMapping& b);
std::string to_string(const StateMapping& m);
std::string to_string(const DistMapping& m);
Formula lookup(const StateMapping& m, const std::string& x);
DistFormula lookup(const DistMapping& m, const std::string& mu);

struct DecompBounds {
    unsigned k = 2;                  // support size of distribution shapes
    unsigned d = 2;                  // weight denominators of distribution shapes
    std::size_t max_mappings = 100000;
};

struct StateDecomposition {
    std::vector<StateMapping> mappings;
    // Some enumeration hit the budget; a negation over a truncated set is left empty.
    bool truncated = false;
};

struct DistDecomposition {
    std::vector<DistMapping> mappings;
    bool truncated = false;
};

struct GuidedInfo {
    std::size_t max_support = 0;
    unsigned long max_denominator = 1;
    bool truncated = false;
    bool soundness_violation = false;
    bool within(const DecompBounds& b) const { return max_support <= b.k && max_denominator <= b.d; }
};

class Decomposer {
public:
    Decomposer(const PtsSpec& spec, LogicClass cls, DecompBounds bounds = {});

    // t^{-1}(phi), bounded by the configured shapes; mappings are simplified.
    const StateDecomposition& state(Term t, Formula phi);
    // theta^{-1}(psi).
    const DistDecomposition& dist(DistTerm theta, DistFormula psi);

    // Mapping read off a satisfying closed instance s(t); verified before returning.
    std::optional<StateMapping> guided(Term t, Formula phi, const Substitution& s, GuidedInfo* info = nullptr);
    std::optional<DistMapping> guided_dist(DistTerm theta, DistFormula psi, const Substitution& sigma,
                                           GuidedInfo* info = nullptr);

    // Every variable of t satisfies its formula under s.
    bool satisfies(const StateMapping& m, const Substitution& s);

    LogicClass logic_class() const { return cls_; }
    const DecompBounds& bounds() const { return bounds_; }
    RuloidEngine& ruloid_engine() { return ruloids_; }
    Semantics& semantics() { return sem_; }
    ModelChecker& checker() { return mc_; }

private:
    struct Key {
        const void* a;
        const void* b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            return std::hash<const void*>()(k.a) * 131 + std::hash<const void*>()(k.b);
        }
    };

    void check_formula(Formula phi) const;
    StateDecomposition compute_state(Term t, Formula phi);
    StateDecomposition compute_univariate(Term t, Formula phi);
    DistDecomposition compute_dist(DistTerm theta, DistFormula psi);
    std::optional<StateMapping> guided_univariate(Term t, Formula phi, const Substitution& s, GuidedInfo& info);
    std::optional<StateMapping> guided_diam(Term t, Formula phi, const Substitution& s, GuidedInfo& info);

    const PtsSpec* spec_;
    LogicClass cls_;
    DecompBounds bounds_;
    RuloidEngine ruloids_;
    Semantics sem_;
    ModelChecker mc_;
    std::vector<std::vector<Rational>> shapes_;
    std::unordered_map<Key, StateDecomposition, KeyHash> state_memo_;
    std::unordered_map<Key, DistDecomposition, KeyHash> dist_memo_;
};

} // namespace rforge
