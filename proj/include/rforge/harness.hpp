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
#include "rforge/equivalences.hpp"
#include "rforge/json_io.hpp"

#include <cstdint>
#include <optional>
#include <random>

namespace rforge {

// Random generators shared by the harnesses and the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(rng_() % n) : 0; }
    bool chance(unsigned num, unsigned den) { return rng_() % den < num; }
    // n positive weights with a common denominator at most max_den, summing to 1.
    std::vector<Rational> weights(std::size_t n, unsigned max_den);
    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

std::uint64_t case_seed(std::uint64_t seed, std::size_t index);

struct SpecShape {
    unsigned constants = 3;
    unsigned max_operators = 4;
    unsigned max_rank = 2;
    unsigned max_rules = 6;
    unsigned actions = 2;
    unsigned max_den = 6;
    bool negative = true;
    // Adds a constant with the same leaf rules as c0.
    bool clone_constant = false;
};

PtsSpec random_spec(Gen& g, const SpecShape& shape = {});
Term random_closed_term(Gen& g, const Signature& sig, unsigned depth);
// Leaves drawn from the given variables and the constants of sig.
Term random_open_term(Gen& g, const Signature& sig, unsigned depth, const std::vector<std::string>& vars);
// Closed: dirac, lifting and convex nodes over closed terms of depth at most 1.
DistTerm random_closed_dist_term(Gen& g, const Signature& sig, unsigned depth, unsigned max_support);
DistTerm random_open_dist_term(Gen& g, const Signature& sig, unsigned depth, const std::vector<std::string>& state_vars,
                               const std::vector<std::string>& dist_vars);
Distribution random_distribution(Gen& g, const Signature& sig, unsigned max_support, unsigned max_den);
Formula random_formula(Gen& g, const std::vector<std::string>& actions, LogicClass cls, unsigned depth);
Pts random_pts(Gen& g, unsigned max_states, unsigned actions);

enum class Theorem { Proof, Ruloid, DistRuloid, Decomposition, Characterization, Congruence, Invariants };
const char* to_string(Theorem t);
std::optional<Theorem> theorem_from_string(std::string_view s);

struct HarnessConfig {
    std::uint64_t seed = 1;
    std::size_t samples = 500;
    // 0: RULOID_FORGE_THREADS, else the hardware concurrency.
    unsigned threads = 0;
    DecompBounds bounds{2, 3, 20000};
    std::size_t max_states = 64;
    // Cases draw terms over this specification instead of random ones.
    const PtsSpec* spec = nullptr;
    // Run only the case with this seed.
    std::optional<std::uint64_t> replay;
};

struct CaseResult {
    enum class Verdict { Pass, Fail, Skip };
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Verdict verdict = Verdict::Pass;
    std::size_t checks = 0;
    // Some argument pair or decomposition instance exercised a non-identity case.
    bool nontrivial = false;
    bool truncated = false;
    std::string reason;
    Json witness;
};

struct Report {
    Theorem theorem = Theorem::Proof;
    HarnessConfig config;
    std::vector<CaseResult> cases;

    std::size_t count(CaseResult::Verdict v) const;
    std::size_t checks() const;
    bool ok() const { return count(CaseResult::Verdict::Fail) == 0; }
    Json to_json() const;
};

Report run_harness(Theorem theorem, const HarnessConfig& config);

unsigned harness_threads(unsigned requested);

} // namespace rforge
