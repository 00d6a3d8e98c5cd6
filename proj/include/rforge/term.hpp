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

#include "rforge/errors.hpp"
#include "rforge/rational.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rforge {

namespace detail {
struct OpSymbol;
struct TermNode;
struct DistNode;
} // namespace detail

enum class Sort { State, Distribution };

struct Var {
    Sort sort = Sort::State;
    std::string name;
    auto operator<=>(const Var&) const = default;
};

// Interned operator symbol; identity is (name, params, rank).
class Op {
public:
    Op() = default;
    static Op make(std::string_view name, std::vector<Rational> params, unsigned rank);

    const std::string& name() const;
    const std::vector<Rational>& params() const;
    unsigned rank() const;
    std::size_t hash() const;
    std::string display() const;
    bool valid() const { return s_ != nullptr; }

    friend bool operator==(Op a, Op b) { return a.s_ == b.s_; }

private:
    explicit Op(const detail::OpSymbol* s) : s_(s) {}
    const detail::OpSymbol* s_ = nullptr;
};

int compare(Op a, Op b);

// Hash-consed open term: equal terms share one node.
class Term {
public:
    Term() = default;
    static Term var(std::string_view name);
    static Term app(Op op, std::vector<Term> args);
    static Term constant(Op op) { return app(op, {}); }

    bool is_var() const;
    const std::string& name() const;
    Op op() const;
    const std::vector<Term>& args() const;
    bool closed() const;
    std::size_t hash() const;
    std::size_t size() const;
    std::size_t depth() const;
    const void* id() const { return n_; }
    explicit operator bool() const { return n_ != nullptr; }

    friend bool operator==(Term a, Term b) { return a.n_ == b.n_; }

private:
    explicit Term(const detail::TermNode* n) : n_(n) {}
    const detail::TermNode* n_ = nullptr;
};

// Structural total order, stable across runs.
int compare(Term a, Term b);
struct TermLess {
    bool operator()(Term a, Term b) const { return compare(a, b) < 0; }
};

class DistTerm {
public:
    enum class Kind { Var, Dirac, Lift, Convex };

    DistTerm() = default;
    static DistTerm var(std::string_view name);
    static DistTerm dirac(Term t);
    static DistTerm lift(Op op, std::vector<DistTerm> args);
    static DistTerm convex(std::vector<std::pair<Rational, DistTerm>> parts);

    Kind kind() const;
    const std::string& name() const;
    Term term() const;
    Op op() const;
    // Lift arguments or convex components.
    const std::vector<DistTerm>& args() const;
    const std::vector<Rational>& weights() const;
    bool closed() const;
    std::size_t hash() const;
    const void* id() const { return n_; }
    explicit operator bool() const { return n_ != nullptr; }

    friend bool operator==(DistTerm a, DistTerm b) { return a.n_ == b.n_; }

private:
    explicit DistTerm(const detail::DistNode* n) : n_(n) {}
    const detail::DistNode* n_ = nullptr;
};

int compare(DistTerm a, DistTerm b);
struct DistTermLess {
    bool operator()(DistTerm a, DistTerm b) const { return compare(a, b) < 0; }
};

namespace detail {
struct OpSymbol {
    std::string name;
    std::vector<Rational> params;
    unsigned rank = 0;
    std::size_t hash = 0;
};

struct TermNode {
    bool is_var = false;
    std::string name;
    Op op;
    std::vector<Term> args;
    std::size_t hash = 0;
    std::size_t size = 1;
    std::size_t depth = 0;
    bool closed = true;
};

struct DistNode {
    DistTerm::Kind kind = DistTerm::Kind::Var;
    std::string name;
    Term term;
    Op op;
    std::vector<DistTerm> args;
    std::vector<Rational> weights;
    std::size_t hash = 0;
    bool closed = true;
};
} // namespace detail

inline const std::string& Op::name() const { return s_->name; }
inline const std::vector<Rational>& Op::params() const { return s_->params; }
inline unsigned Op::rank() const { return s_->rank; }
inline std::size_t Op::hash() const { return s_->hash; }

inline bool Term::is_var() const { return n_->is_var; }
inline const std::string& Term::name() const { return n_->name; }
inline Op Term::op() const { return n_->op; }
inline const std::vector<Term>& Term::args() const { return n_->args; }
inline bool Term::closed() const { return n_->closed; }
inline std::size_t Term::hash() const { return n_->hash; }
inline std::size_t Term::size() const { return n_->size; }
inline std::size_t Term::depth() const { return n_->depth; }

inline DistTerm::Kind DistTerm::kind() const { return n_->kind; }
inline const std::string& DistTerm::name() const { return n_->name; }
inline Term DistTerm::term() const { return n_->term; }
inline Op DistTerm::op() const { return n_->op; }
inline const std::vector<DistTerm>& DistTerm::args() const { return n_->args; }
inline const std::vector<Rational>& DistTerm::weights() const { return n_->weights; }
inline bool DistTerm::closed() const { return n_->closed; }
inline std::size_t DistTerm::hash() const { return n_->hash; }

class Signature {
public:
    Op add_operator(std::string_view name, std::vector<Rational> params, unsigned rank);
    void add_action(std::string_view a);

    // Operator by (name, params); invalid Op if absent.
    Op find(std::string_view name, const std::vector<Rational>& params) const;
    std::vector<Op> find_by_name(std::string_view name) const;
    bool has_action(std::string_view a) const;
    bool contains(Op op) const;

    const std::vector<Op>& operators() const { return ops_; }
    const std::vector<std::string>& actions() const { return actions_; }

private:
    std::vector<Op> ops_;
    std::vector<std::string> actions_;
};

struct VarSet {
    std::set<std::string> state;
    std::set<std::string> dist;
    bool empty() const { return state.empty() && dist.empty(); }
};

void collect_vars(Term t, VarSet& out);
void collect_vars(DistTerm d, VarSet& out);
VarSet vars(Term t);
VarSet vars(DistTerm d);
// Variables in depth-first, left-to-right order of first occurrence.
std::vector<Var> ordered_vars(Term t);
std::vector<Var> ordered_vars(DistTerm d);
bool is_univariate(Term t);
bool is_univariate(DistTerm d);

class Substitution {
public:
    void bind(const Var& v, Term t);
    void bind(const Var& v, DistTerm d);
    void bind_state(std::string_view name, Term t);
    void bind_dist(std::string_view name, DistTerm d);

    const Term* state(std::string_view name) const;
    const DistTerm* dist(std::string_view name) const;
    const std::map<std::string, Term, std::less<>>& states() const { return state_; }
    const std::map<std::string, DistTerm, std::less<>>& dists() const { return dist_; }
    bool empty() const { return state_.empty() && dist_.empty(); }

    friend bool operator==(const Substitution&, const Substitution&) = default;

private:
    std::map<std::string, Term, std::less<>> state_;
    std::map<std::string, DistTerm, std::less<>> dist_;
};

Term apply(const Substitution& s, Term t);
DistTerm apply(const Substitution& s, DistTerm d);
// outer after inner.
Substitution compose(const Substitution& outer, const Substitution& inner);

enum class RenameScope { All, DistOnly, StateOnly };

// Canonical variable renaming: names are handed out in visit order.
class Renamer {
public:
    explicit Renamer(RenameScope scope = RenameScope::All, std::string state_prefix = "x",
                     std::string dist_prefix = "mu");

    void visit(Term t);
    void visit(DistTerm d);
    void visit_state(const std::string& name);
    void visit_dist(const std::string& name);
    bool has_dist(const std::string& name) const { return dist_.count(name) != 0; }
    bool has_state(const std::string& name) const { return state_.count(name) != 0; }

    Term apply(Term t) const;
    DistTerm apply(DistTerm d) const;
    std::string state(const std::string& name) const;
    std::string dist(const std::string& name) const;
    Substitution substitution() const;

private:
    RenameScope scope_;
    std::string state_prefix_, dist_prefix_;
    std::map<std::string, std::string> state_, dist_;
};

// Hands out names not present in a reserved set.
class FreshNames {
public:
    explicit FreshNames(std::string prefix) : prefix_(std::move(prefix)) {}
    void reserve(const std::string& name) { used_.insert(name); }
    void reserve(const VarSet& vs);
    std::string next();

private:
    std::string prefix_;
    std::set<std::string> used_;
    std::size_t counter_ = 0;
};

std::string to_string(Term t);
std::string to_string(DistTerm d);

} // namespace rforge

template <>
struct std::hash<rforge::Term> {
    std::size_t operator()(rforge::Term t) const noexcept { return t.hash(); }
};
template <>
struct std::hash<rforge::DistTerm> {
    std::size_t operator()(rforge::DistTerm d) const noexcept { return d.hash(); }
};
template <>
struct std::hash<rforge::Op> {
    std::size_t operator()(rforge::Op o) const noexcept { return o.hash(); }
};
