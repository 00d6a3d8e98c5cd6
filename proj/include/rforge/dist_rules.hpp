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

#include <map>
#include <optional>

namespace rforge {

// {theta -q_j-> t_j}: distribution term with its weighted targets.
struct DistOverTerms {
    DistTerm source;
    std::vector<std::pair<Rational, Term>> branches; // sorted by target

    static DistOverTerms make(DistTerm source, std::vector<std::pair<Rational, Term>> branches);
    static DistOverTerms from(DistTerm source, const Distribution& d);
    Distribution as_distribution() const;
    bool closed() const;
    friend bool operator==(const DistOverTerms&, const DistOverTerms&) = default;
};

std::string to_string(const DistOverTerms& l);

enum class DistRuleKind { Axiom, Lift, Convex };

struct DistRule {
    DistRuleKind kind = DistRuleKind::Axiom;
    Op op;
    std::vector<Rational> convex_weights;
    std::vector<DistOverTerms> premises;
    DistOverTerms conclusion;
};

std::string to_string(const DistRule& r);

// Premise with target variables, as supplied to the rule constructors.
struct PremiseShape {
    DistTerm source; // distribution variable or dirac of a state variable
    std::vector<std::pair<Rational, std::string>> branches;
};

DistRule dirac_axiom(const std::string& x);
DistRule lift_rule(Op f, const std::vector<PremiseShape>& premises);
DistRule convex_rule(const std::vector<Rational>& p, const std::vector<PremiseShape>& premises);

// Reduced instance: equal images of targets are merged and weights summed.
DistOverTerms reduce(const Substitution& sigma, const DistOverTerms& l);
// Premises reduced, conclusion recomputed from the reduced premises.
DistRule reduce_rule(const Substitution& sigma, const DistRule& r);

struct ProofNode {
    DistRule rule;
    Substitution sigma;
    DistRule instance;
    std::vector<ProofNode> children;

    std::size_t size() const;
};

struct ProofOutcome {
    bool provable = false;
    std::optional<ProofNode> proof;
    Distribution semantics;
    std::string reason;
};

// Proof of the unique provable distribution over terms of a closed term.
ProofNode proof_of(DistTerm closed);
ProofOutcome prove_dist(const DistOverTerms& l);
// Recheck every node of a proof: rule instance, reduction and children.
bool check_proof(const ProofNode& p);

struct DistRuloid {
    std::vector<DistOverTerms> premises;
    DistOverTerms conclusion;
};

std::string to_string(const DistRuloid& r);

using Shapes = std::map<std::string, std::vector<Rational>>;

// One premise per variable of theta; target variables are fresh.
DistRuloid build_dist_ruloid(DistTerm theta, const Shapes& shapes, const std::string& target_prefix = "x");
std::optional<std::string> check_invariants(const DistRuloid& r);

struct DistRuloidWitness {
    DistRuloid ruloid;
    Substitution sigma;
    DistOverTerms reduced_conclusion;
};

// sigma must close every variable of theta.
DistRuloidWitness dist_ruloid_witness(DistTerm theta, const Substitution& sigma);
// Every reduced premise equals the semantics of its closed source.
bool premises_provable(const DistRuloid& r, const Substitution& sigma);
bool provable(const DistOverTerms& closed_reduced);

// Weight multisets (non-increasing) with at most k entries, denominators at most d.
std::vector<std::vector<Rational>> bounded_shapes(unsigned k, unsigned d);

} // namespace rforge
