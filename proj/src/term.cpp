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

#include "rforge/term.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <unordered_set>

namespace rforge {

const char* to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::Input: return "InputError";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::UnknownOperator: return "UnknownOperator";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NonClosed: return "NonClosed";
    case ErrorKind::IncompletePts: return "IncompletePts";
    case ErrorKind::Budget: return "BudgetExceeded";
    case ErrorKind::NonPositiveSpec: return "NonPositiveSpec";
    case ErrorKind::NotSatisfied: return "NotSatisfied";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::Internal: return "InternalError";
    }
    return "Error";
}

namespace {

inline std::size_t mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

template <class Node, class Hash, class Eq>
class InternTable {
public:
    const Node* intern(Node&& candidate)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = set_.find(&candidate);
        if (it != set_.end()) return *it;
        store_.push_back(std::move(candidate));
        const Node* p = &store_.back();
        set_.insert(p);
        return p;
    }

private:
    std::mutex mutex_;
    std::deque<Node> store_;
    std::unordered_set<const Node*, Hash, Eq> set_;
};

struct NodeHash {
    template <class N>
    std::size_t operator()(const N* n) const { return n->hash; }
};

struct OpEq {
    bool operator()(const detail::OpSymbol* a, const detail::OpSymbol* b) const
    {
        return a->rank == b->rank && a->name == b->name && a->params == b->params;
    }
};

struct TermEq {
    bool operator()(const detail::TermNode* a, const detail::TermNode* b) const
    {
        return a->is_var == b->is_var && a->name == b->name && a->op == b->op && a->args == b->args;
    }
};

struct DistEq {
    bool operator()(const detail::DistNode* a, const detail::DistNode* b) const
    {
        return a->kind == b->kind && a->name == b->name && a->term == b->term && a->op == b->op &&
               a->args == b->args && a->weights == b->weights;
    }
};

InternTable<detail::OpSymbol, NodeHash, OpEq>& op_table()
{
    static InternTable<detail::OpSymbol, NodeHash, OpEq> t;
    return t;
}
InternTable<detail::TermNode, NodeHash, TermEq>& term_table()
{
    static InternTable<detail::TermNode, NodeHash, TermEq> t;
    return t;
}
InternTable<detail::DistNode, NodeHash, DistEq>& dist_table()
{
    static InternTable<detail::DistNode, NodeHash, DistEq> t;
    return t;
}

int compare_str(const std::string& a, const std::string& b)
{
    int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int compare_rationals(const std::vector<Rational>& a, const std::vector<Rational>& b)
{
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c) return c < 0 ? -1 : 1;
    }
    return 0;
}

} // namespace

Op Op::make(std::string_view name, std::vector<Rational> params, unsigned rank)
{
    detail::OpSymbol s;
    s.name = std::string(name);
    s.params = std::move(params);
    s.rank = rank;
    std::size_t h = std::hash<std::string>()(s.name);
    h = mix(h, rank);
    for (const auto& p : s.params) h = mix(h, hash_value(p));
    s.hash = h;
    return Op(op_table().intern(std::move(s)));
}

std::string Op::display() const
{
    std::string out = s_->name;
    if (!s_->params.empty()) {
        out += '[';
        for (std::size_t i = 0; i < s_->params.size(); ++i) {
            if (i) out += ',';
            out += to_string(s_->params[i]);
        }
        out += ']';
    }
    return out;
}

int compare(Op a, Op b)
{
    if (a == b) return 0;
    if (int c = compare_str(a.name(), b.name())) return c;
    if (a.rank() != b.rank()) return a.rank() < b.rank() ? -1 : 1;
    return compare_rationals(a.params(), b.params());
}

Term Term::var(std::string_view name)
{
    detail::TermNode n;
    n.is_var = true;
    n.name = std::string(name);
    n.closed = false;
    n.hash = mix(std::hash<std::string>()(n.name), 17);
    return Term(term_table().intern(std::move(n)));
}

Term Term::app(Op op, std::vector<Term> args)
{
    if (!op.valid()) throw Error(ErrorKind::UnknownOperator, "invalid operator");
    if (args.size() != op.rank())
        throw Error(ErrorKind::ArityMismatch, op.display() + " expects " + std::to_string(op.rank()) +
                                                  " arguments, got " + std::to_string(args.size()));
    detail::TermNode n;
    n.op = op;
    std::size_t h = mix(op.hash(), 29);
    for (Term a : args) {
        if (!a) throw Error(ErrorKind::Input, "null term argument");
        h = mix(h, a.hash());
        n.size += a.size();
        n.depth = std::max(n.depth, a.depth() + 1);
        n.closed = n.closed && a.closed();
    }
    n.args = std::move(args);
    n.hash = h;
    return Term(term_table().intern(std::move(n)));
}

int compare(Term a, Term b)
{
    if (a == b) return 0;
    if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
    if (a.is_var()) return compare_str(a.name(), b.name());
    if (int c = compare(a.op(), b.op())) return c;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (int c = compare(a.args()[i], b.args()[i])) return c;
    return 0;
}

DistTerm DistTerm::var(std::string_view name)
{
    detail::DistNode n;
    n.kind = Kind::Var;
    n.name = std::string(name);
    n.closed = false;
    n.hash = mix(std::hash<std::string>()(n.name), 41);
    return DistTerm(dist_table().intern(std::move(n)));
}

DistTerm DistTerm::dirac(Term t)
{
    if (!t) throw Error(ErrorKind::Input, "null term in dirac");
    detail::DistNode n;
    n.kind = Kind::Dirac;
    n.term = t;
    n.closed = t.closed();
    n.hash = mix(t.hash(), 43);
    return DistTerm(dist_table().intern(std::move(n)));
}

DistTerm DistTerm::lift(Op op, std::vector<DistTerm> args)
{
    if (!op.valid()) throw Error(ErrorKind::UnknownOperator, "invalid operator");
    if (args.size() != op.rank())
        throw Error(ErrorKind::ArityMismatch, op.display() + " expects " + std::to_string(op.rank()) +
                                                  " arguments, got " + std::to_string(args.size()));
    detail::DistNode n;
    n.kind = Kind::Lift;
    n.op = op;
    std::size_t h = mix(op.hash(), 47);
    for (DistTerm a : args) {
        if (!a) throw Error(ErrorKind::Input, "null distribution term argument");
        h = mix(h, a.hash());
        n.closed = n.closed && a.closed();
    }
    n.args = std::move(args);
    n.hash = h;
    return DistTerm(dist_table().intern(std::move(n)));
}

DistTerm DistTerm::convex(std::vector<std::pair<Rational, DistTerm>> parts)
{
    if (parts.empty()) throw ValidationError("ConvexWeights", "empty convex combination");
    detail::DistNode n;
    n.kind = Kind::Convex;
    Rational sum = 0;
    std::size_t h = 53;
    for (auto& [w, d] : parts) {
        if (!is_probability(w)) throw ValidationError("ConvexWeights", "weight " + to_string(w) + " not in (0,1]");
        if (!d) throw Error(ErrorKind::Input, "null distribution term component");
        sum += w;
        h = mix(mix(h, hash_value(w)), d.hash());
        n.closed = n.closed && d.closed();
        n.weights.push_back(w);
        n.args.push_back(d);
    }
    if (sum != 1) throw ValidationError("ConvexWeights", "weights sum to " + to_string(sum));
    n.hash = h;
    return DistTerm(dist_table().intern(std::move(n)));
}

int compare(DistTerm a, DistTerm b)
{
    if (a == b) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
    case DistTerm::Kind::Var: return compare_str(a.name(), b.name());
    case DistTerm::Kind::Dirac: return compare(a.term(), b.term());
    case DistTerm::Kind::Lift:
        if (int c = compare(a.op(), b.op())) return c;
        break;
    case DistTerm::Kind::Convex:
        if (int c = compare_rationals(a.weights(), b.weights())) return c;
        break;
    }
    if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args().size(); ++i)
        if (int c = compare(a.args()[i], b.args()[i])) return c;
    return 0;
}

Op Signature::add_operator(std::string_view name, std::vector<Rational> params, unsigned rank)
{
    if (find(name, params).valid())
        throw ValidationError("DuplicateOperator", std::string(name) + " declared twice with the same parameters");
    Op op = Op::make(name, std::move(params), rank);
    ops_.push_back(op);
    return op;
}

void Signature::add_action(std::string_view a)
{
    if (!has_action(a)) actions_.emplace_back(a);
}

Op Signature::find(std::string_view name, const std::vector<Rational>& params) const
{
    for (Op op : ops_)
        if (op.name() == name && op.params() == params) return op;
    return Op();
}

std::vector<Op> Signature::find_by_name(std::string_view name) const
{
    std::vector<Op> out;
    for (Op op : ops_)
        if (op.name() == name) out.push_back(op);
    return out;
}

bool Signature::has_action(std::string_view a) const
{
    return std::find(actions_.begin(), actions_.end(), a) != actions_.end();
}

bool Signature::contains(Op op) const { return std::find(ops_.begin(), ops_.end(), op) != ops_.end(); }

void collect_vars(Term t, VarSet& out)
{
    if (t.closed()) return;
    if (t.is_var()) {
        out.state.insert(t.name());
        return;
    }
    for (Term a : t.args()) collect_vars(a, out);
}

void collect_vars(DistTerm d, VarSet& out)
{
    if (d.closed()) return;
    switch (d.kind()) {
    case DistTerm::Kind::Var: out.dist.insert(d.name()); break;
    case DistTerm::Kind::Dirac: collect_vars(d.term(), out); break;
    default:
        for (DistTerm a : d.args()) collect_vars(a, out);
    }
}

VarSet vars(Term t)
{
    VarSet v;
    collect_vars(t, v);
    return v;
}

VarSet vars(DistTerm d)
{
    VarSet v;
    collect_vars(d, v);
    return v;
}

namespace {
void ordered(Term t, std::vector<Var>& out, std::size_t& occurrences)
{
    if (t.closed()) return;
    if (t.is_var()) {
        ++occurrences;
        Var v{Sort::State, t.name()};
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        return;
    }
    for (Term a : t.args()) ordered(a, out, occurrences);
}

void ordered(DistTerm d, std::vector<Var>& out, std::size_t& occurrences)
{
    if (d.closed()) return;
    switch (d.kind()) {
    case DistTerm::Kind::Var: {
        ++occurrences;
        Var v{Sort::Distribution, d.name()};
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
        break;
    }
    case DistTerm::Kind::Dirac: ordered(d.term(), out, occurrences); break;
    default:
        for (DistTerm a : d.args()) ordered(a, out, occurrences);
    }
}
} // namespace

std::vector<Var> ordered_vars(Term t)
{
    std::vector<Var> out;
    std::size_t n = 0;
    ordered(t, out, n);
    return out;
}

std::vector<Var> ordered_vars(DistTerm d)
{
    std::vector<Var> out;
    std::size_t n = 0;
    ordered(d, out, n);
    return out;
}

bool is_univariate(Term t)
{
    std::vector<Var> out;
    std::size_t n = 0;
    ordered(t, out, n);
    return n == out.size();
}

bool is_univariate(DistTerm d)
{
    std::vector<Var> out;
    std::size_t n = 0;
    ordered(d, out, n);
    return n == out.size();
}

void Substitution::bind(const Var& v, Term t)
{
    if (v.sort != Sort::State) throw Error(ErrorKind::SortMismatch, "state term bound to distribution variable " + v.name);
    bind_state(v.name, t);
}

void Substitution::bind(const Var& v, DistTerm d)
{
    if (v.sort != Sort::Distribution)
        throw Error(ErrorKind::SortMismatch, "distribution term bound to state variable " + v.name);
    bind_dist(v.name, d);
}

void Substitution::bind_state(std::string_view name, Term t) { state_.insert_or_assign(std::string(name), t); }
void Substitution::bind_dist(std::string_view name, DistTerm d) { dist_.insert_or_assign(std::string(name), d); }

const Term* Substitution::state(std::string_view name) const
{
    auto it = state_.find(name);
    return it == state_.end() ? nullptr : &it->second;
}

const DistTerm* Substitution::dist(std::string_view name) const
{
    auto it = dist_.find(name);
    return it == dist_.end() ? nullptr : &it->second;
}

Term apply(const Substitution& s, Term t)
{
    if (t.closed()) return t;
    if (t.is_var()) {
        const Term* r = s.state(t.name());
        return r ? *r : t;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (Term a : t.args()) args.push_back(apply(s, a));
    return Term::app(t.op(), std::move(args));
}

DistTerm apply(const Substitution& s, DistTerm d)
{
    if (d.closed()) return d;
    switch (d.kind()) {
    case DistTerm::Kind::Var: {
        const DistTerm* r = s.dist(d.name());
        return r ? *r : d;
    }
    case DistTerm::Kind::Dirac: return DistTerm::dirac(apply(s, d.term()));
    case DistTerm::Kind::Lift: {
        std::vector<DistTerm> args;
        for (DistTerm a : d.args()) args.push_back(apply(s, a));
        return DistTerm::lift(d.op(), std::move(args));
    }
    case DistTerm::Kind::Convex: {
        std::vector<std::pair<Rational, DistTerm>> parts;
        for (std::size_t i = 0; i < d.args().size(); ++i) parts.emplace_back(d.weights()[i], apply(s, d.args()[i]));
        return DistTerm::convex(std::move(parts));
    }
    }
    return d;
}

Substitution compose(const Substitution& outer, const Substitution& inner)
{
    Substitution out;
    for (const auto& [x, t] : inner.states()) out.bind_state(x, apply(outer, t));
    for (const auto& [m, d] : inner.dists()) out.bind_dist(m, apply(outer, d));
    for (const auto& [x, t] : outer.states())
        if (!inner.state(x)) out.bind_state(x, t);
    for (const auto& [m, d] : outer.dists())
        if (!inner.dist(m)) out.bind_dist(m, d);
    return out;
}

Renamer::Renamer(RenameScope scope, std::string state_prefix, std::string dist_prefix)
    : scope_(scope), state_prefix_(std::move(state_prefix)), dist_prefix_(std::move(dist_prefix))
{
}

void Renamer::visit(Term t)
{
    if (t.closed()) return;
    if (t.is_var()) {
        visit_state(t.name());
        return;
    }
    for (Term a : t.args()) visit(a);
}

void Renamer::visit(DistTerm d)
{
    if (d.closed()) return;
    switch (d.kind()) {
    case DistTerm::Kind::Var: visit_dist(d.name()); break;
    case DistTerm::Kind::Dirac: visit(d.term()); break;
    default:
        for (DistTerm a : d.args()) visit(a);
    }
}

void Renamer::visit_state(const std::string& name)
{
    if (scope_ == RenameScope::DistOnly || state_.count(name)) return;
    state_.emplace(name, state_prefix_ + std::to_string(state_.size()));
}

void Renamer::visit_dist(const std::string& name)
{
    if (scope_ == RenameScope::StateOnly || dist_.count(name)) return;
    dist_.emplace(name, dist_prefix_ + std::to_string(dist_.size()));
}

std::string Renamer::state(const std::string& name) const
{
    auto it = state_.find(name);
    return it == state_.end() ? name : it->second;
}

std::string Renamer::dist(const std::string& name) const
{
    auto it = dist_.find(name);
    return it == dist_.end() ? name : it->second;
}

Substitution Renamer::substitution() const
{
    Substitution s;
    for (const auto& [from, to] : state_) s.bind_state(from, Term::var(to));
    for (const auto& [from, to] : dist_) s.bind_dist(from, DistTerm::var(to));
    return s;
}

Term Renamer::apply(Term t) const { return rforge::apply(substitution(), t); }
DistTerm Renamer::apply(DistTerm d) const { return rforge::apply(substitution(), d); }

void FreshNames::reserve(const VarSet& vs)
{
    used_.insert(vs.state.begin(), vs.state.end());
    used_.insert(vs.dist.begin(), vs.dist.end());
}

std::string FreshNames::next()
{
    for (;;) {
        std::string n = prefix_ + std::to_string(counter_++);
        if (used_.insert(n).second) return n;
    }
}

std::string to_string(Term t)
{
    if (t.is_var()) return t.name();
    std::string out = t.op().display();
    if (t.args().empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.args()[i]);
    }
    return out + ')';
}

std::string to_string(DistTerm d)
{
    switch (d.kind()) {
    case DistTerm::Kind::Var: return d.name();
    case DistTerm::Kind::Dirac: return "dirac(" + to_string(d.term()) + ")";
    case DistTerm::Kind::Lift: {
        std::string out = d.op().display();
        if (d.args().empty()) return out;
        out += '(';
        for (std::size_t i = 0; i < d.args().size(); ++i) {
            if (i) out += ", ";
            out += to_string(d.args()[i]);
        }
        return out + ')';
    }
    case DistTerm::Kind::Convex: {
        std::string out;
        for (std::size_t i = 0; i < d.args().size(); ++i) {
            if (i) out += " + ";
            out += to_string(d.weights()[i]) + "*";
            DistTerm c = d.args()[i];
            if (c.kind() == DistTerm::Kind::Convex)
                out += "(" + to_string(c) + ")";
            else
                out += to_string(c);
        }
        return out;
    }
    }
    return {};
}

} // namespace rforge
