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

#include "rforge/semantics.hpp"

#include <functional>
#include <optional>

namespace rforge {

struct RuloidOptions {
    // Drop premise sets containing both x -b-> mu and x -b-|.
    bool prune_contradictory = true;
    std::size_t max_ruloids = 200000;
};

// Ruloids H / t -a-> theta built by recursion on t; results are memoized,
// canonical in their distribution variables, sorted and duplicate-free.
class RuloidEngine {
public:
    explicit RuloidEngine(const PtsSpec& spec, RuloidOptions opts = {}) : spec_(&spec), opts_(opts) {}

    const std::vector<LiteralRule>& ruloids(Term t, const std::string& a);
    const PtsSpec& spec() const { return *spec_; }

private:
    struct Key {
        Term t;
        std::string a;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const { return k.t.hash() * 31 + std::hash<std::string>()(k.a); }
    };

    std::vector<LiteralRule> compute(Term t, const std::string& a);
    LiteralRule rename_apart(const LiteralRule& r);
    std::string fresh() { return "_m" + std::to_string(counter_++); }

    const PtsSpec* spec_;
    RuloidOptions opts_;
    std::size_t counter_ = 0;
    std::unordered_map<Key, std::vector<LiteralRule>, KeyHash> memo_;
};

std::vector<LiteralRule> derive_ruloids(const PtsSpec& spec, Term t, const std::string& a, RuloidOptions opts = {});

struct RuloidWitness {
    LiteralRule ruloid;
    Substitution sigma;
};

// Calls f for every ruloid of (t, a) whose premises hold under the closed
// substitution s, with the extension sigma' and the resulting distribution.
// Stops when f returns false.
void for_each_instance(RuloidEngine& engine, Semantics& sem, Term t, const Substitution& s, const std::string& a,
                       const std::function<bool(const LiteralRule&, const Substitution&, const Distribution&)>& f);

std::optional<RuloidWitness> ruloid_witness(RuloidEngine& engine, Semantics& sem, Term t, const Substitution& s,
                                            const std::string& a, const Distribution& pi);

} // namespace rforge
