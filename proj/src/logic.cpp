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

#include "rforge/logic.hpp"

#include "rforge/flow.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <unordered_set>

namespace rforge {

namespace {

inline std::size_t mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

struct NodeHash {
    template <class N>
    std::size_t operator()(const N* n) const { return n->hash; }
};

struct FormulaEq {
    bool operator()(const detail::FormulaNode* a, const detail::FormulaNode* b) const
    {
        return a->kind == b->kind && a->action == b->action && a->sub == b->sub && a->conjuncts == b->conjuncts &&
               a->dist == b->dist;
    }
};

struct DistFormulaEq {
    bool operator()(const detail::DistFormulaNode* a, const detail::DistFormulaNode* b) const
    {
        return a->branches == b->branches;
    }
};

template <class Node, class Eq>
class Table {
public:
    const Node* intern(Node&& n)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = set_.find(&n);
        if (it != set_.end()) return *it;
        store_.push_back(std::move(n));
        set_.insert(&store_.back());
        return &store_.back();
    }

private:
    std::mutex mutex_;
    std::deque<Node> store_;
    std::unordered_set<const Node*, NodeHash, Eq> set_;
};

Table<detail::FormulaNode, FormulaEq>& formulas()
{
    static Table<detail::FormulaNode, FormulaEq> t;
    return t;
}

Table<detail::DistFormulaNode, DistFormulaEq>& dist_formulas()
{
    static Table<detail::DistFormulaNode, DistFormulaEq> t;
    return t;
}

} // namespace

Formula Formula::top()
{
    static const Formula t = [] {
        detail::FormulaNode n;
        n.kind = Kind::Top;
        n.hash = 7;
        return Formula(formulas().intern(std::move(n)));
    }();
    return t;
}

Formula Formula::neg(Formula f)
{
    detail::FormulaNode n;
    n.kind = Kind::Neg;
    n.sub = f;
    n.hash = mix(11, f.hash());
    return Formula(formulas().intern(std::move(n)));
}

Formula Formula::conj(std::vector<Formula> fs)
{
    std::sort(fs.begin(), fs.end(), FormulaLess());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    if (fs.empty()) return top();
    if (fs.size() == 1) return fs.front();
    detail::FormulaNode n;
    n.kind = Kind::Conj;
    std::size_t h = 13;
    for (Formula f : fs) h = mix(h, f.hash());
    n.conjuncts = std::move(fs);
    n.hash = h;
    return Formula(formulas().intern(std::move(n)));
}

Formula Formula::diam(std::string_view a, DistFormula d)
{
    detail::FormulaNode n;
    n.kind = Kind::Diam;
    n.action = std::string(a);
    n.dist = d;
    n.hash = mix(mix(17, std::hash<std::string>()(n.action)), d.hash());
    return Formula(formulas().intern(std::move(n)));
}

Formula Formula::can(std::string_view a) { return diam(a, DistFormula::unit(top())); }
Formula Formula::cannot(std::string_view a) { return neg(can(a)); }

bool Formula::is_cannot() const
{
    return kind() == Kind::Neg && sub().kind() == Kind::Diam && sub().dist() == DistFormula::unit(top());
}

DistFormula DistFormula::make(std::vector<std::pair<Rational, Formula>> branches)
{
    if (branches.empty()) throw ValidationError("DistFormulaWeights", "empty distribution formula");
    Rational sum = 0;
    detail::DistFormulaNode n;
    std::size_t h = 19;
    for (const auto& [r, f] : branches) {
        if (!is_probability(r)) throw ValidationError("DistFormulaWeights", "weight " + to_string(r) + " not in (0,1]");
        if (!f) throw Error(ErrorKind::Input, "null formula");
        sum += r;
        h = mix(mix(h, hash_value(r)), f.hash());
    }
    if (sum != 1) throw ValidationError("DistFormulaWeights", "weights sum to " + to_string(sum));
    n.branches = std::move(branches);
    n.hash = h;
    return DistFormula(dist_formulas().intern(std::move(n)));
}

int compare(Formula a, Formula b)
{
    if (a == b) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
    case Formula::Kind::Top: return 0;
    case Formula::Kind::Neg: return compare(a.sub(), b.sub());
    case Formula::Kind::Conj: {
        const auto &x = a.conjuncts(), &y = b.conjuncts();
        for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
            if (int c = compare(x[i], y[i])) return c;
        if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
        return 0;
    }
    case Formula::Kind::Diam:
        if (int c = a.action().compare(b.action())) return c < 0 ? -1 : 1;
        return compare(a.dist(), b.dist());
    }
    return 0;
}

int compare(DistFormula a, DistFormula b)
{
    if (a == b) return 0;
    const auto &x = a.branches(), &y = b.branches();
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (int c = compare(x[i].second, y[i].second)) return c;
        if (int c = cmp(x[i].first, y[i].first)) return c < 0 ? -1 : 1;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

const char* to_string(LogicClass c)
{
    switch (c) {
    case LogicClass::Positive: return "positive";
    case LogicClass::Ready: return "ready";
    case LogicClass::Full: return "full";
    }
    return "";
}

bool in_class(DistFormula d, LogicClass c)
{
    return std::all_of(d.branches().begin(), d.branches().end(), [&](const auto& b) { return in_class(b.second, c); });
}

bool in_class(Formula f, LogicClass c)
{
    switch (f.kind()) {
    case Formula::Kind::Top: return true;
    case Formula::Kind::Neg:
        if (c == LogicClass::Full) return in_class(f.sub(), c);
        return c == LogicClass::Ready && f.is_cannot();
    case Formula::Kind::Conj:
        return std::all_of(f.conjuncts().begin(), f.conjuncts().end(), [&](Formula g) { return in_class(g, c); });
    case Formula::Kind::Diam: return in_class(f.dist(), c);
    }
    return false;
}

LogicClass classify(Formula f)
{
    if (in_class(f, LogicClass::Positive)) return LogicClass::Positive;
    if (in_class(f, LogicClass::Ready)) return LogicClass::Ready;
    return LogicClass::Full;
}

std::size_t modal_depth(Formula f)
{
    switch (f.kind()) {
    case Formula::Kind::Top: return 0;
    case Formula::Kind::Neg: return modal_depth(f.sub());
    case Formula::Kind::Conj: {
        std::size_t d = 0;
        for (Formula g : f.conjuncts()) d = std::max(d, modal_depth(g));
        return d;
    }
    case Formula::Kind::Diam: {
        std::size_t d = 0;
        for (const auto& [r, g] : f.dist().branches()) d = std::max(d, modal_depth(g));
        return d + 1;
    }
    }
    return 0;
}

namespace {

struct SimplifyCache {
    std::mutex mutex;
    std::unordered_map<Formula, Formula> f;
    std::unordered_map<DistFormula, DistFormula> d;
};

SimplifyCache& simplify_cache()
{
    static SimplifyCache c;
    return c;
}

} // namespace

Formula conjoin(const std::vector<Formula>& fs)
{
    std::vector<Formula> flat;
    for (Formula f : fs) {
        if (f.kind() == Formula::Kind::Conj)
            flat.insert(flat.end(), f.conjuncts().begin(), f.conjuncts().end());
        else if (!f.is_top())
            flat.push_back(f);
    }
    return Formula::conj(std::move(flat));
}

Formula simplify(Formula f)
{
    auto& cache = simplify_cache();
    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        auto it = cache.f.find(f);
        if (it != cache.f.end()) return it->second;
    }
    Formula out;
    switch (f.kind()) {
    case Formula::Kind::Top: out = f; break;
    case Formula::Kind::Neg: {
        Formula g = simplify(f.sub());
        out = g.kind() == Formula::Kind::Neg ? g.sub() : Formula::neg(g);
        break;
    }
    case Formula::Kind::Conj: {
        std::vector<Formula> parts;
        for (Formula g : f.conjuncts()) parts.push_back(simplify(g));
        out = conjoin(parts);
        break;
    }
    case Formula::Kind::Diam: out = Formula::diam(f.action(), simplify(f.dist())); break;
    }
    std::lock_guard<std::mutex> lock(cache.mutex);
    cache.f.emplace(f, out);
    return out;
}

DistFormula simplify(DistFormula d)
{
    auto& cache = simplify_cache();
    {
        std::lock_guard<std::mutex> lock(cache.mutex);
        auto it = cache.d.find(d);
        if (it != cache.d.end()) return it->second;
    }
    std::map<Formula, Rational, FormulaLess> merged;
    for (const auto& [r, f] : d.branches()) merged[simplify(f)] += r;
    std::vector<std::pair<Rational, Formula>> b;
    for (const auto& [f, r] : merged) b.emplace_back(r, f);
    DistFormula out = DistFormula::make(std::move(b));
    std::lock_guard<std::mutex> lock(cache.mutex);
    cache.d.emplace(d, out);
    return out;
}

std::string to_string(DistFormula d)
{
    const auto& b = d.branches();
    if (b.size() == 1) return to_string(b[0].second);
    std::string out = "oplus{";
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) out += ", ";
        out += to_string(b[i].first) + ": " + to_string(b[i].second);
    }
    return out + "}";
}

std::string to_string(Formula f)
{
    switch (f.kind()) {
    case Formula::Kind::Top: return "tt";
    case Formula::Kind::Neg:
        if (f.is_cannot()) return "bar " + f.sub().action();
        return "neg " + to_string(f.sub());
    case Formula::Kind::Conj: {
        std::string out = "and{";
        for (std::size_t i = 0; i < f.conjuncts().size(); ++i) {
            if (i) out += ", ";
            out += to_string(f.conjuncts()[i]);
        }
        return out + "}";
    }
    case Formula::Kind::Diam: return "<" + f.action() + "> " + to_string(f.dist());
    }
    return {};
}

bool ModelChecker::sat(Term s, Formula f)
{
    switch (f.kind()) {
    case Formula::Kind::Top: return true;
    case Formula::Kind::Neg: return !sat(s, f.sub());
    default: break;
    }
    Key key{s.id(), f.id()};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool r = false;
    if (f.kind() == Formula::Kind::Conj) {
        r = std::all_of(f.conjuncts().begin(), f.conjuncts().end(), [&](Formula g) { return sat(s, g); });
    } else {
        for (const auto& pi : lts_->derivatives(s, f.action()))
            if (sat(pi, f.dist())) {
                r = true;
                break;
            }
    }
    memo_.emplace(key, r);
    return r;
}

std::optional<std::vector<std::vector<Rational>>> ModelChecker::split(const Distribution& pi, DistFormula d)
{
    Transport t;
    for (const auto& [s, w] : pi.weights()) {
        t.supply.push_back(w);
        std::vector<char> row;
        for (const auto& [r, f] : d.branches()) row.push_back(sat(s, f) ? 1 : 0);
        t.allowed.push_back(std::move(row));
    }
    for (const auto& [r, f] : d.branches()) t.demand.push_back(r);
    std::vector<std::vector<Rational>> plan;
    if (!feasible(t, &plan)) return std::nullopt;
    return plan;
}

bool ModelChecker::sat(const Distribution& pi, DistFormula d) { return split(pi, d).has_value(); }

} // namespace rforge
