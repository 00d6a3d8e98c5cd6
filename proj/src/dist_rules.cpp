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

#include "rforge/dist_rules.hpp"

#include <algorithm>
#include <set>

namespace rforge {

namespace {

void sort_branches(std::vector<std::pair<Rational, Term>>& b)
{
    std::sort(b.begin(), b.end(), [](const auto& x, const auto& y) { return compare(x.second, y.second) < 0; });
}

std::vector<std::pair<Rational, Term>> branches_of(const Distribution& d)
{
    std::vector<std::pair<Rational, Term>> out;
    for (const auto& [t, w] : d.weights()) out.emplace_back(w, t);
    return out;
}

void check_premise_shape(const PremiseShape& p)
{
    bool ok = p.source.kind() == DistTerm::Kind::Var ||
              (p.source.kind() == DistTerm::Kind::Dirac && p.source.term().is_var());
    if (!ok) throw ValidationError("PremiseSource", "premise source must be a distribution variable or dirac of a variable");
    Rational sum = 0;
    std::set<std::string> seen;
    for (const auto& [q, x] : p.branches) {
        if (!is_probability(q)) throw ValidationError("PremiseWeights", "weight " + to_string(q) + " not in (0,1]");
        if (!seen.insert(x).second) throw ValidationError("PremiseTargets", "target " + x + " repeated");
        sum += q;
    }
    if (sum != 1) throw ValidationError("PremiseWeights", "premise weights sum to " + to_string(sum));
}

DistOverTerms shape_literal(const PremiseShape& p)
{
    std::vector<std::pair<Rational, Term>> b;
    for (const auto& [q, x] : p.branches) b.emplace_back(q, Term::var(x));
    return DistOverTerms::make(p.source, std::move(b));
}

void check_distinct_sources(const std::vector<PremiseShape>& ps)
{
    std::set<DistTerm, DistTermLess> seen;
    for (const auto& p : ps)
        if (!seen.insert(p.source).second)
            throw ValidationError("DuplicatePremiseSource", "premise source " + to_string(p.source) + " repeated");
}

void lift_branches(const std::vector<DistOverTerms>& ps, Op f, std::size_t i, std::vector<Term>& args,
                   const Rational& w, Distribution& out)
{
    if (i == ps.size()) {
        out.add(Term::app(f, args), w);
        return;
    }
    for (const auto& [q, t] : ps[i].branches) {
        args[i] = t;
        lift_branches(ps, f, i + 1, args, w * q, out);
    }
}

DistOverTerms lift_conclusion(Op f, const std::vector<DistOverTerms>& ps)
{
    std::vector<DistTerm> sources;
    for (const auto& p : ps) sources.push_back(p.source);
    Distribution out;
    std::vector<Term> args(ps.size());
    lift_branches(ps, f, 0, args, Rational(1), out);
    return DistOverTerms::from(DistTerm::lift(f, std::move(sources)), out);
}

DistOverTerms convex_conclusion(const std::vector<Rational>& p, const std::vector<DistOverTerms>& ps)
{
    std::vector<std::pair<Rational, DistTerm>> parts;
    Distribution out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        parts.emplace_back(p[i], ps[i].source);
        for (const auto& [q, t] : ps[i].branches) out.add(t, p[i] * q);
    }
    return DistOverTerms::from(DistTerm::convex(std::move(parts)), out);
}

std::string rule_kind(const DistRule& r)
{
    switch (r.kind) {
    case DistRuleKind::Axiom: return "axiom";
    case DistRuleKind::Lift: return "lift " + r.op.display();
    case DistRuleKind::Convex: return "convex";
    }
    return {};
}

} // namespace

DistOverTerms DistOverTerms::make(DistTerm source, std::vector<std::pair<Rational, Term>> branches)
{
    Rational sum = 0;
    for (const auto& [q, t] : branches) {
        if (!is_probability(q)) throw ValidationError("DistributionWeights", "weight " + to_string(q) + " not in (0,1]");
        sum += q;
    }
    if (sum != 1) throw ValidationError("DistributionWeights", "weights sum to " + to_string(sum));
    sort_branches(branches);
    for (std::size_t i = 1; i < branches.size(); ++i)
        if (branches[i].second == branches[i - 1].second)
            throw ValidationError("DistributionTargets", "target " + to_string(branches[i].second) + " repeated");
    DistOverTerms l;
    l.source = source;
    l.branches = std::move(branches);
    return l;
}

DistOverTerms DistOverTerms::from(DistTerm source, const Distribution& d)
{
    return make(source, branches_of(d));
}

Distribution DistOverTerms::as_distribution() const
{
    Distribution d;
    for (const auto& [q, t] : branches) d.add(t, q);
    return d;
}

bool DistOverTerms::closed() const
{
    if (!source.closed()) return false;
    return std::all_of(branches.begin(), branches.end(), [](const auto& b) { return b.second.closed(); });
}

std::string to_string(const DistOverTerms& l)
{
    std::string out = to_string(l.source) + " -> {";
    for (std::size_t i = 0; i < l.branches.size(); ++i) {
        if (i) out += ", ";
        out += to_string(l.branches[i].first) + ": " + to_string(l.branches[i].second);
    }
    return out + "}";
}

std::string to_string(const DistRule& r)
{
    std::string out = rule_kind(r) + " [";
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
        if (i) out += "; ";
        out += to_string(r.premises[i]);
    }
    return out + "] => " + to_string(r.conclusion);
}

DistRule dirac_axiom(const std::string& x)
{
    DistRule r;
    r.kind = DistRuleKind::Axiom;
    r.conclusion = DistOverTerms::make(DistTerm::dirac(Term::var(x)), {{Rational(1), Term::var(x)}});
    return r;
}

DistRule lift_rule(Op f, const std::vector<PremiseShape>& premises)
{
    if (premises.size() != f.rank())
        throw Error(ErrorKind::ArityMismatch, f.display() + " expects " + std::to_string(f.rank()) + " premises");
    check_distinct_sources(premises);
    DistRule r;
    r.kind = DistRuleKind::Lift;
    r.op = f;
    for (const auto& p : premises) {
        check_premise_shape(p);
        r.premises.push_back(shape_literal(p));
    }
    r.conclusion = lift_conclusion(f, r.premises);
    return r;
}

DistRule convex_rule(const std::vector<Rational>& p, const std::vector<PremiseShape>& premises)
{
    if (p.size() != premises.size() || p.empty())
        throw ValidationError("ConvexWeights", "one weight per premise required");
    check_distinct_sources(premises);
    DistRule r;
    r.kind = DistRuleKind::Convex;
    r.convex_weights = p;
    for (const auto& ps : premises) {
        check_premise_shape(ps);
        r.premises.push_back(shape_literal(ps));
    }
    r.conclusion = convex_conclusion(p, r.premises);
    return r;
}

DistOverTerms reduce(const Substitution& sigma, const DistOverTerms& l)
{
    Distribution d;
    for (const auto& [q, t] : l.branches) d.add(apply(sigma, t), q);
    return DistOverTerms::from(apply(sigma, l.source), d);
}

DistRule reduce_rule(const Substitution& sigma, const DistRule& r)
{
    DistRule out;
    out.kind = r.kind;
    out.op = r.op;
    out.convex_weights = r.convex_weights;
    for (const auto& p : r.premises) out.premises.push_back(reduce(sigma, p));
    switch (r.kind) {
    case DistRuleKind::Axiom: out.conclusion = reduce(sigma, r.conclusion); break;
    case DistRuleKind::Lift: out.conclusion = lift_conclusion(r.op, out.premises); break;
    case DistRuleKind::Convex: out.conclusion = convex_conclusion(r.convex_weights, out.premises); break;
    }
    return out;
}

std::size_t ProofNode::size() const
{
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
}

namespace {

class ProofBuilder {
public:
    ProofNode build(DistTerm theta)
    {
        ProofNode node;
        if (theta.kind() == DistTerm::Kind::Dirac) {
            std::string x = fresh("x");
            node.rule = dirac_axiom(x);
            node.sigma.bind_state(x, theta.term());
            node.instance = reduce_rule(node.sigma, node.rule);
            return node;
        }
        if (theta.kind() == DistTerm::Kind::Var) throw Error(ErrorKind::NonClosed, "open distribution term");

        std::vector<PremiseShape> shapes;
        for (DistTerm child : theta.args()) {
            ProofNode c = build(child);
            PremiseShape ps;
            if (child.kind() == DistTerm::Kind::Dirac) {
                std::string y = fresh("x");
                ps.source = DistTerm::dirac(Term::var(y));
                ps.branches.emplace_back(Rational(1), y);
                node.sigma.bind_state(y, child.term());
            } else {
                std::string mu = fresh("mu");
                ps.source = DistTerm::var(mu);
                node.sigma.bind_dist(mu, child);
                for (const auto& [q, u] : c.instance.conclusion.branches) {
                    std::string x = fresh("x");
                    ps.branches.emplace_back(q, x);
                    node.sigma.bind_state(x, u);
                }
            }
            shapes.push_back(std::move(ps));
            node.children.push_back(std::move(c));
        }
        node.rule = theta.kind() == DistTerm::Kind::Lift ? lift_rule(theta.op(), shapes)
                                                         : convex_rule(theta.weights(), shapes);
        node.instance = reduce_rule(node.sigma, node.rule);
        return node;
    }

private:
    std::string fresh(const std::string& prefix) { return prefix + std::to_string(counter_++); }
    std::size_t counter_ = 1;
};

} // namespace

ProofNode proof_of(DistTerm closed)
{
    if (!closed.closed()) throw Error(ErrorKind::NonClosed, "distribution term " + to_string(closed) + " is not closed");
    return ProofBuilder().build(closed);
}

bool check_proof(const ProofNode& p)
{
    DistRule inst = reduce_rule(p.sigma, p.rule);
    if (!(inst.conclusion == p.instance.conclusion) || inst.premises != p.instance.premises) return false;
    if (p.children.size() != p.instance.premises.size()) return false;
    for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (!(p.children[i].instance.conclusion == p.instance.premises[i])) return false;
        if (!check_proof(p.children[i])) return false;
    }
    return true;
}

ProofOutcome prove_dist(const DistOverTerms& l)
{
    if (!l.closed()) throw Error(ErrorKind::NonClosed, "distribution over terms is not closed");
    ProofOutcome out;
    out.semantics = eval_dist(l.source);
    Distribution claimed = l.as_distribution();
    if (!(claimed == out.semantics)) {
        for (const auto& [t, w] : claimed.weights())
            if (out.semantics(t) != w) {
                out.reason = "weight of " + to_string(t) + " is " + to_string(out.semantics(t)) + ", claimed " + to_string(w);
                return out;
            }
        for (const auto& [t, w] : out.semantics.weights())
            if (claimed(t) != w) {
                out.reason = "target " + to_string(t) + " with weight " + to_string(w) + " is missing";
                return out;
            }
        return out;
    }
    ProofNode p = proof_of(l.source);
    if (!(p.instance.conclusion == l)) {
        out.reason = "proof conclusion differs from the claimed distribution";
        return out;
    }
    out.provable = true;
    out.proof = std::move(p);
    return out;
}

std::string to_string(const DistRuloid& r)
{
    std::string out = "[";
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
        if (i) out += "; ";
        out += to_string(r.premises[i]);
    }
    return out + "] => " + to_string(r.conclusion);
}

namespace {

DistRuloid build_impl(DistTerm theta, const Shapes& shapes, const std::string& prefix,
                      std::map<std::string, std::vector<std::string>>* targets_out)
{
    FreshNames fresh(prefix);
    fresh.reserve(vars(theta));
    DistRuloid r;
    std::map<std::string, Distribution> premise_dists;
    OpenEnv env;
    for (const Var& v : ordered_vars(theta)) {
        if (v.sort == Sort::State) {
            r.premises.push_back(
                DistOverTerms::make(DistTerm::dirac(Term::var(v.name)), {{Rational(1), Term::var(v.name)}}));
            continue;
        }
        auto it = shapes.find(v.name);
        if (it == shapes.end()) throw Error(ErrorKind::Input, "no shape for distribution variable " + v.name);
        std::vector<std::pair<Rational, Term>> b;
        std::vector<std::string> names;
        for (const auto& q : it->second) {
            names.push_back(fresh.next());
            b.emplace_back(q, Term::var(names.back()));
        }
        r.premises.push_back(DistOverTerms::make(DistTerm::var(v.name), b));
        premise_dists[v.name] = r.premises.back().as_distribution();
        if (targets_out) (*targets_out)[v.name] = std::move(names);
    }
    for (const auto& [mu, d] : premise_dists) env.dist[mu] = &d;
    r.conclusion = DistOverTerms::from(theta, eval_open(theta, env));
    return r;
}

} // namespace

DistRuloid build_dist_ruloid(DistTerm theta, const Shapes& shapes, const std::string& target_prefix)
{
    return build_impl(theta, shapes, target_prefix, nullptr);
}

std::optional<std::string> check_invariants(const DistRuloid& r)
{
    VarSet tv = vars(r.conclusion.source);
    std::set<std::string> seen_dist, seen_state, targets;
    std::map<std::string, Distribution> premise_dists;
    for (const auto& p : r.premises) {
        Rational sum = 0;
        for (const auto& [q, t] : p.branches) {
            sum += q;
            if (!t.is_var()) return "premise target " + to_string(t) + " is not a variable";
            targets.insert(t.name());
        }
        if (sum != 1) return "premise weights of " + to_string(p.source) + " sum to " + to_string(sum);
        if (p.source.kind() == DistTerm::Kind::Var) {
            if (!seen_dist.insert(p.source.name()).second) return "duplicate premise for " + p.source.name();
            premise_dists[p.source.name()] = p.as_distribution();
        } else if (p.source.kind() == DistTerm::Kind::Dirac && p.source.term().is_var()) {
            const std::string& x = p.source.term().name();
            if (!seen_state.insert(x).second) return "duplicate premise for dirac " + x;
            if (p.branches.size() != 1 || p.branches[0].second != Term::var(x))
                return "dirac premise of " + x + " is not the axiom";
        } else {
            return "premise source " + to_string(p.source) + " is neither a variable nor dirac of a variable";
        }
    }
    if (seen_dist != tv.dist) return "distribution variables of the conclusion differ from premise sources";
    if (seen_state != tv.state) return "state variables of the conclusion differ from dirac premise sources";
    Rational sum = 0;
    for (const auto& [q, t] : r.conclusion.branches) {
        sum += q;
        for (const auto& x : vars(t).state)
            if (!targets.count(x)) return "conclusion target variable " + x + " not introduced by a premise";
    }
    if (sum != 1) return "conclusion weights sum to " + to_string(sum);
    OpenEnv env;
    for (const auto& [mu, d] : premise_dists) env.dist[mu] = &d;
    if (!(eval_open(r.conclusion.source, env) == r.conclusion.as_distribution()))
        return "conclusion is not determined by the premises";
    return std::nullopt;
}

DistRuloidWitness dist_ruloid_witness(DistTerm theta, const Substitution& sigma)
{
    Shapes shapes;
    std::map<std::string, Distribution> values;
    VarSet tv = vars(theta);
    for (const auto& x : tv.state) {
        const Term* t = sigma.state(x);
        if (!t || !t->closed()) throw Error(ErrorKind::NonClosed, "substitution does not close " + x);
    }
    for (const auto& mu : tv.dist) {
        const DistTerm* d = sigma.dist(mu);
        if (!d || !d->closed()) throw Error(ErrorKind::NonClosed, "substitution does not close " + mu);
        values[mu] = eval_dist(*d);
        for (const auto& [t, w] : values[mu].weights()) shapes[mu].push_back(w);
    }
    std::map<std::string, std::vector<std::string>> targets;
    DistRuloidWitness w;
    w.ruloid = build_impl(theta, shapes, "x", &targets);
    for (const auto& x : tv.state) w.sigma.bind_state(x, *sigma.state(x));
    for (const auto& mu : tv.dist) {
        w.sigma.bind_dist(mu, *sigma.dist(mu));
        std::size_t j = 0;
        for (const auto& [t, q] : values[mu].weights()) w.sigma.bind_state(targets[mu][j++], t);
    }
    w.reduced_conclusion = reduce(w.sigma, w.ruloid.conclusion);
    return w;
}

bool provable(const DistOverTerms& l)
{
    if (!l.closed()) return false;
    return eval_dist(l.source) == l.as_distribution();
}

bool premises_provable(const DistRuloid& r, const Substitution& sigma)
{
    for (const auto& p : r.premises) {
        DistOverTerms red = reduce(sigma, p);
        if (!provable(red)) return false;
    }
    return true;
}

std::vector<std::vector<Rational>> bounded_shapes(unsigned k, unsigned d)
{
    std::set<Rational> fr;
    for (unsigned q = 1; q <= d; ++q)
        for (unsigned p = 1; p <= q; ++p) fr.insert(make_rational(p, q));
    std::vector<Rational> desc(fr.rbegin(), fr.rend());
    std::vector<std::vector<Rational>> out;
    std::vector<Rational> cur;
    auto rec = [&](auto&& self, std::size_t from, const Rational& left) -> void {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        if (cur.size() == k) return;
        for (std::size_t i = from; i < desc.size(); ++i) {
            if (desc[i] > left) continue;
            cur.push_back(desc[i]);
            self(self, i, left - desc[i]);
            cur.pop_back();
        }
    };
    rec(rec, 0, Rational(1));
    return out;
}

} // namespace rforge
