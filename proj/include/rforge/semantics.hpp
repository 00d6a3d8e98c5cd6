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

#include "rforge/pgsos.hpp"

#include <map>
#include <optional>
#include <unordered_map>

namespace rforge {

// Finitely supported distribution over terms; zero weights are never stored.
class Distribution {
public:
    using Map = std::map<Term, Rational, TermLess>;

    Distribution() = default;
    static Distribution point(Term t);

    void add(Term t, const Rational& w);
    Rational operator()(Term t) const;
    const Map& weights() const { return w_; }
    std::size_t support_size() const { return w_.size(); }
    Rational mass() const;
    DistTerm to_dist_term() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    Map w_;
};

int compare(const Distribution& a, const Distribution& b);
inline bool operator<(const Distribution& a, const Distribution& b) { return compare(a, b) < 0; }
std::string to_string(const Distribution& d);

// Environment for open evaluation; unbound state variables stay symbolic.
struct OpenEnv {
    std::map<std::string, Term, std::less<>> state;
    std::map<std::string, const Distribution*, std::less<>> dist;
};

Distribution eval_open(DistTerm d, const OpenEnv& env);
// Throws NonClosed for open input.
Distribution eval_dist(DistTerm d);

class Lts {
public:
    virtual ~Lts() = default;
    virtual const std::vector<Distribution>& derivatives(Term s, const std::string& a) = 0;
    virtual const std::vector<std::string>& action_list() const = 0;
};

// Lazy transition relation of a specification; not thread-safe.
class Semantics : public Lts {
public:
    explicit Semantics(const PtsSpec& spec) : spec_(&spec) {}

    // Sorted, duplicate-free.
    const std::vector<Distribution>& derivatives(Term t, const std::string& a) override;
    const std::vector<std::string>& action_list() const override { return spec_->signature().actions(); }
    std::vector<std::pair<std::string, Distribution>> transitions(Term t);
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

    std::vector<Distribution> derive(Term t, const std::string& a);

    const PtsSpec* spec_;
    std::unordered_map<Key, std::vector<Distribution>, KeyHash> cache_;
};

inline std::vector<std::pair<std::string, Distribution>> derive_transitions(Semantics& sem, Term t)
{
    return sem.transitions(t);
}

using IndexDist = std::vector<std::pair<std::size_t, Rational>>;

// Explicit PTS over indexed states; unexplored (state, action) pairs are absent.
class Pts : public Lts {
public:
    std::size_t add_state(Term t);
    std::size_t add_action(const std::string& a);
    std::optional<std::size_t> find(Term t) const;
    std::optional<std::size_t> action_index(const std::string& a) const;

    void set_successors(std::size_t s, std::size_t a, std::vector<IndexDist> succ);
    bool explored(std::size_t s, std::size_t a) const;
    // Throws IncompletePts when unexplored.
    const std::vector<IndexDist>& successors(std::size_t s, std::size_t a) const;
    bool complete() const;

    std::size_t size() const { return states_.size(); }
    Term state(std::size_t i) const { return states_[i]; }
    const std::vector<Term>& states() const { return states_; }
    const std::vector<std::string>& action_list() const override { return actions_; }
    const std::vector<Distribution>& derivatives(Term s, const std::string& a) override;

    std::size_t transition_count() const;

private:
    std::vector<Term> states_;
    std::vector<std::string> actions_;
    std::unordered_map<Term, std::size_t> index_;
    std::vector<std::vector<std::optional<std::vector<IndexDist>>>> succ_;
    std::unordered_map<Term, std::unordered_map<std::string, std::vector<Distribution>>> dist_cache_;
};

struct Exploration {
    Pts pts;
    bool truncated = false;
};

Exploration explore_pts(Semantics& sem, const std::vector<Term>& roots, std::size_t max_states);

} // namespace rforge
