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

#include "rforge/semantics.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace rforge {

Distribution Distribution::point(Term t)
{
    Distribution d;
    d.w_.emplace(t, Rational(1));
    return d;
}

void Distribution::add(Term t, const Rational& w)
{
    if (w == 0) return;
    auto [it, fresh] = w_.emplace(t, w);
    if (!fresh) {
        it->second += w;
        if (it->second == 0) w_.erase(it);
    }
}

Rational Distribution::operator()(Term t) const
{
    auto it = w_.find(t);
    return it == w_.end() ? Rational(0) : it->second;
}

Rational Distribution::mass() const
{
    Rational m = 0;
    for (const auto& [t, w] : w_) m += w;
    return m;
}

DistTerm Distribution::to_dist_term() const
{
    if (w_.size() == 1 && w_.begin()->second == 1) return DistTerm::dirac(w_.begin()->first);
    std::vector<std::pair<Rational, DistTerm>> parts;
    for (const auto& [t, w] : w_) parts.emplace_back(w, DistTerm::dirac(t));
    return DistTerm::convex(std::move(parts));
}

int compare(const Distribution& a, const Distribution& b)
{
    auto i = a.weights().begin(), j = b.weights().begin();
    for (; i != a.weights().end() && j != b.weights().end(); ++i, ++j) {
        if (int c = compare(i->first, j->first)) return c;
        if (int c = cmp(i->second, j->second)) return c < 0 ? -1 : 1;
    }
    if (i == a.weights().end() && j == b.weights().end()) return 0;
    return i == a.weights().end() ? -1 : 1;
}

std::string to_string(const Distribution& d)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [t, w] : d.weights()) {
        if (!first) out += ", ";
        first = false;
        out += to_string(t) + ": " + to_string(w);
    }
    return out + "}";
}

namespace {

void product(const std::vector<Distribution>& parts, Op op, std::size_t i, std::vector<Term>& args, const Rational& w,
             Distribution& out)
{
    if (i == parts.size()) {
        out.add(Term::app(op, args), w);
        return;
    }
    for (const auto& [t, q] : parts[i].weights()) {
        args[i] = t;
        product(parts, op, i + 1, args, w * q, out);
    }
}

} // namespace

Distribution eval_open(DistTerm d, const OpenEnv& env)
{
    switch (d.kind()) {
    case DistTerm::Kind::Var: {
        auto it = env.dist.find(d.name());
        if (it == env.dist.end() || !it->second)
            throw Error(ErrorKind::NonClosed, "unbound distribution variable " + d.name());
        return *it->second;
    }
    case DistTerm::Kind::Dirac: {
        Term t = d.term();
        if (!t.closed() && !env.state.empty()) {
            Substitution s;
            for (const auto& [x, u] : env.state) s.bind_state(x, u);
            t = apply(s, t);
        }
        return Distribution::point(t);
    }
    case DistTerm::Kind::Lift: {
        std::vector<Distribution> parts;
        parts.reserve(d.args().size());
        for (DistTerm a : d.args()) parts.push_back(eval_open(a, env));
        Distribution out;
        std::vector<Term> args(parts.size());
        product(parts, d.op(), 0, args, Rational(1), out);
        return out;
    }
    case DistTerm::Kind::Convex: {
        Distribution out;
        for (std::size_t i = 0; i < d.args().size(); ++i) {
            Distribution c = eval_open(d.args()[i], env);
            for (const auto& [t, q] : c.weights()) out.add(t, d.weights()[i] * q);
        }
        return out;
    }
    }
    return {};
}

Distribution eval_dist(DistTerm d)
{
    if (!d.closed()) throw Error(ErrorKind::NonClosed, "distribution term " + to_string(d) + " is not closed");
    return eval_open(d, OpenEnv{});
}

const std::vector<Distribution>& Semantics::derivatives(Term t, const std::string& a)
{
    Key key{t, a};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<Distribution> r = derive(t, a);
    return cache_.emplace(std::move(key), std::move(r)).first->second;
}

std::vector<Distribution> Semantics::derive(Term t, const std::string& a)
{
    if (!t.closed()) throw Error(ErrorKind::NonClosed, "term " + to_string(t) + " is not closed");
    std::vector<Distribution> out;
    for (const PgsosRule* r : spec_->rules_for(t.op(), a)) {
        bool blocked = false;
        for (const auto& n : r->negatives())
            if (!derivatives(t.args()[n.arg], n.action).empty()) {
                blocked = true;
                break;
            }
        if (blocked) continue;

        std::vector<const std::vector<Distribution>*> choices;
        for (const auto& p : r->positives()) {
            const auto& ds = derivatives(t.args()[p.arg], p.action);
            if (ds.empty()) {
                blocked = true;
                break;
            }
            choices.push_back(&ds);
        }
        if (blocked) continue;

        OpenEnv env;
        for (std::size_t i = 0; i < r->source_vars().size(); ++i) env.state.emplace(r->source_vars()[i], t.args()[i]);
        std::vector<std::size_t> pick(choices.size(), 0);
        for (;;) {
            for (std::size_t j = 0; j < choices.size(); ++j) env.dist[r->positives()[j].dist_var] = &(*choices[j])[pick[j]];
            out.push_back(eval_open(r->target(), env));
            std::size_t j = 0;
            while (j < pick.size() && ++pick[j] == choices[j]->size()) pick[j++] = 0;
            if (j == pick.size()) break;
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::pair<std::string, Distribution>> Semantics::transitions(Term t)
{
    std::vector<std::pair<std::string, Distribution>> out;
    for (const auto& a : action_list())
        for (const auto& d : derivatives(t, a)) out.emplace_back(a, d);
    return out;
}

std::size_t Pts::add_state(Term t)
{
    auto [it, fresh] = index_.emplace(t, states_.size());
    if (fresh) {
        states_.push_back(t);
        succ_.emplace_back(actions_.size());
    }
    return it->second;
}

std::size_t Pts::add_action(const std::string& a)
{
    if (auto i = action_index(a)) return *i;
    actions_.push_back(a);
    for (auto& row : succ_) row.resize(actions_.size());
    return actions_.size() - 1;
}

std::optional<std::size_t> Pts::find(Term t) const
{
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Pts::action_index(const std::string& a) const
{
    auto it = std::find(actions_.begin(), actions_.end(), a);
    if (it == actions_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - actions_.begin());
}

void Pts::set_successors(std::size_t s, std::size_t a, std::vector<IndexDist> succ)
{
    for (auto& d : succ) std::sort(d.begin(), d.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    succ_[s][a] = std::move(succ);
    dist_cache_.erase(states_[s]);
}

bool Pts::explored(std::size_t s, std::size_t a) const { return succ_[s][a].has_value(); }

const std::vector<IndexDist>& Pts::successors(std::size_t s, std::size_t a) const
{
    if (!succ_[s][a])
        throw Error(ErrorKind::IncompletePts, "transitions of " + to_string(states_[s]) + " under " + actions_[a] +
                                                  " were not explored");
    return *succ_[s][a];
}

bool Pts::complete() const
{
    for (const auto& row : succ_)
        for (const auto& e : row)
            if (!e) return false;
    return true;
}

std::size_t Pts::transition_count() const
{
    std::size_t n = 0;
    for (const auto& row : succ_)
        for (const auto& e : row)
            if (e) n += e->size();
    return n;
}

const std::vector<Distribution>& Pts::derivatives(Term s, const std::string& a)
{
    auto& slot = dist_cache_[s];
    auto it = slot.find(a);
    if (it != slot.end()) return it->second;
    auto si = find(s);
    if (!si) throw Error(ErrorKind::IncompletePts, "state " + to_string(s) + " is not in the PTS");
    std::vector<Distribution> out;
    if (auto ai = action_index(a)) {
        for (const auto& d : successors(*si, *ai)) {
            Distribution pd;
            for (const auto& [j, w] : d) pd.add(states_[j], w);
            out.push_back(std::move(pd));
        }
    }
    std::sort(out.begin(), out.end());
    return slot.emplace(a, std::move(out)).first->second;
}

Exploration explore_pts(Semantics& sem, const std::vector<Term>& roots, std::size_t max_states)
{
    Exploration ex;
    for (const auto& a : sem.action_list()) ex.pts.add_action(a);
    std::deque<std::size_t> queue;
    for (Term r : roots) {
        if (!r.closed()) throw Error(ErrorKind::NonClosed, "root " + to_string(r) + " is not closed");
        std::size_t before = ex.pts.size();
        std::size_t i = ex.pts.add_state(r);
        if (ex.pts.size() > before) queue.push_back(i);
    }
    while (!queue.empty()) {
        std::size_t s = queue.front();
        // States reached from s must fit in the budget before s is expanded.
        std::set<Term, TermLess> fresh;
        for (const auto& a : sem.action_list())
            for (const auto& d : sem.derivatives(ex.pts.state(s), a))
                for (const auto& [t, w] : d.weights())
                    if (!ex.pts.find(t)) fresh.insert(t);
        if (ex.pts.size() + fresh.size() > max_states) break;
        queue.pop_front();
        for (std::size_t a = 0; a < sem.action_list().size(); ++a) {
            std::vector<IndexDist> succ;
            for (const auto& d : sem.derivatives(ex.pts.state(s), sem.action_list()[a])) {
                IndexDist id;
                for (const auto& [t, w] : d.weights()) {
                    std::size_t before = ex.pts.size();
                    std::size_t j = ex.pts.add_state(t);
                    if (ex.pts.size() > before) queue.push_back(j);
                    id.emplace_back(j, w);
                }
                succ.push_back(std::move(id));
            }
            ex.pts.set_successors(s, a, std::move(succ));
        }
    }
    if (!queue.empty()) ex.truncated = true;
    return ex;
}

} // namespace rforge
