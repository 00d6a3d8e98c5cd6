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

#include "rforge/harness.hpp"

#include "rforge/syntax.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

namespace rforge {

std::vector<Rational> Gen::weights(std::size_t n, unsigned max_den)
{
    if (n == 0) return {};
    unsigned lo = static_cast<unsigned>(n);
    unsigned hi = std::max(lo, max_den);
    unsigned den = lo + static_cast<unsigned>(below(hi - lo + 1));
    std::set<unsigned> cuts;
    while (cuts.size() + 1 < n) cuts.insert(1 + static_cast<unsigned>(below(den - 1)));
    std::vector<Rational> out;
    unsigned prev = 0;
    for (unsigned c : cuts) {
        out.push_back(make_rational(c - prev, den));
        prev = c;
    }
    out.push_back(make_rational(den - prev, den));
    return out;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

std::vector<Op> constants_of(const Signature& sig)
{
    std::vector<Op> out;
    for (Op op : sig.operators())
        if (op.rank() == 0) out.push_back(op);
    return out;
}

std::vector<Op> functions_of(const Signature& sig)
{
    std::vector<Op> out;
    for (Op op : sig.operators())
        if (op.rank() > 0) out.push_back(op);
    return out;
}

template <class T>
const T& pick(Gen& g, const std::vector<T>& v)
{
    return v[g.below(v.size())];
}

DistTerm convex_of(Gen& g, std::vector<DistTerm> parts, unsigned max_den)
{
    if (parts.size() == 1) return parts[0];
    auto ws = g.weights(parts.size(), max_den);
    std::vector<std::pair<Rational, DistTerm>> ps;
    for (std::size_t i = 0; i < parts.size(); ++i) ps.emplace_back(ws[i], parts[i]);
    return DistTerm::convex(std::move(ps));
}

LiteralRule leaf_rule(Gen& g, Op c, const std::vector<Op>& consts, const std::string& a, unsigned max_den)
{
    std::size_t n = 1 + g.below(std::min<std::size_t>(2, consts.size()));
    std::vector<Op> pool = consts;
    std::vector<DistTerm> parts;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = g.below(pool.size());
        parts.push_back(DistTerm::dirac(Term::constant(pool[j])));
        pool.erase(pool.begin() + static_cast<long>(j));
    }
    return LiteralRule{{}, Literal::pos(Term::constant(c), a, convex_of(g, parts, max_den))};
}

} // namespace

PtsSpec random_spec(Gen& g, const SpecShape& shape)
{
    Signature sig;
    std::vector<std::string> actions;
    for (unsigned i = 0; i < std::max(1u, shape.actions); ++i) {
        actions.push_back(std::string(1, static_cast<char>('a' + i)));
        sig.add_action(actions.back());
    }
    std::vector<Op> consts;
    for (unsigned i = 0; i < std::max(1u, shape.constants); ++i) consts.push_back(sig.add_operator("c" + std::to_string(i), {}, 0));
    std::vector<Op> funcs;
    std::size_t nf = 1 + g.below(std::max(1u, shape.max_operators));
    for (std::size_t i = 0; i < nf; ++i) {
        unsigned rank = 1 + static_cast<unsigned>(g.below(std::max(1u, shape.max_rank)));
        std::vector<Rational> params;
        if (g.chance(1, 4)) params.push_back(g.weights(2, 4)[0]);
        funcs.push_back(sig.add_operator("f" + std::to_string(i), params, rank));
    }

    std::vector<LiteralRule> rules;
    std::size_t nr = 2 + g.below(std::max(2u, shape.max_rules) - 1);
    for (std::size_t r = 0; r < nr; ++r) {
        if (r == 0 || g.chance(2, 5)) {
            rules.push_back(leaf_rule(g, pick(g, consts), consts, pick(g, actions), shape.max_den));
            continue;
        }
        Op f = pick(g, funcs);
        std::vector<Term> xs;
        for (unsigned i = 0; i < f.rank(); ++i) xs.push_back(Term::var("x" + std::to_string(i + 1)));
        LiteralRule rule;
        std::vector<DistTerm> leaves;
        std::set<std::pair<std::size_t, std::string>> negs;
        std::size_t mus = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            std::size_t np = g.chance(1, 3) ? 0 : (g.chance(1, 4) ? 2 : 1);
            for (std::size_t k = 0; k < np; ++k) {
                std::string b = pick(g, actions);
                if (shape.negative && g.chance(1, 3)) {
                    if (negs.insert({i, b}).second) rule.premises.push_back(Literal::neg(xs[i], b));
                } else {
                    DistTerm mu = DistTerm::var("mu" + std::to_string(++mus));
                    rule.premises.push_back(Literal::pos(xs[i], b, mu));
                    leaves.push_back(mu);
                }
            }
            leaves.push_back(DistTerm::dirac(xs[i]));
        }
        leaves.push_back(DistTerm::dirac(Term::constant(pick(g, consts))));
        auto part = [&]() {
            if (g.chance(1, 2)) return pick(g, leaves);
            Op h = pick(g, funcs);
            std::vector<DistTerm> args;
            for (unsigned i = 0; i < h.rank(); ++i) args.push_back(pick(g, leaves));
            return DistTerm::lift(h, std::move(args));
        };
        DistTerm target = g.chance(1, 3) ? convex_of(g, {part(), part()}, shape.max_den) : part();
        rule.conclusion = Literal::pos(Term::app(f, xs), pick(g, actions), target);
        rules.push_back(std::move(rule));
    }
    if (shape.clone_constant) {
        Op twin = sig.add_operator("c" + std::to_string(consts.size()), {}, 0);
        std::vector<LiteralRule> extra;
        for (const auto& r : rules)
            if (r.premises.empty() && r.conclusion.source == Term::constant(consts[0]))
                extra.push_back(LiteralRule{{}, Literal::pos(Term::constant(twin), r.conclusion.action, r.conclusion.target)});
        rules.insert(rules.end(), extra.begin(), extra.end());
    }
    std::vector<PgsosRule> validated;
    for (const auto& r : rules) validated.push_back(PgsosRule::validate(sig, r));
    return PtsSpec(std::move(sig), std::move(validated));
}

Term random_closed_term(Gen& g, const Signature& sig, unsigned depth)
{
    auto consts = constants_of(sig);
    auto funcs = functions_of(sig);
    if (consts.empty()) throw Error(ErrorKind::Input, "signature has no constants");
    if (depth == 0 || funcs.empty() || g.chance(1, 3)) return Term::constant(pick(g, consts));
    Op f = pick(g, funcs);
    std::vector<Term> args;
    for (unsigned i = 0; i < f.rank(); ++i) args.push_back(random_closed_term(g, sig, depth - 1));
    return Term::app(f, std::move(args));
}

Term random_open_term(Gen& g, const Signature& sig, unsigned depth, const std::vector<std::string>& vars)
{
    auto consts = constants_of(sig);
    auto funcs = functions_of(sig);
    if (depth == 0 || funcs.empty() || g.chance(1, 4)) {
        if (vars.empty() || (!consts.empty() && g.chance(1, 4))) return Term::constant(pick(g, consts));
        return Term::var(pick(g, vars));
    }
    Op f = pick(g, funcs);
    std::vector<Term> args;
    for (unsigned i = 0; i < f.rank(); ++i) args.push_back(random_open_term(g, sig, depth - 1, vars));
    return Term::app(f, std::move(args));
}

DistTerm random_closed_dist_term(Gen& g, const Signature& sig, unsigned depth, unsigned max_support)
{
    auto funcs = functions_of(sig);
    if (depth == 0 || g.chance(1, 4)) return DistTerm::dirac(random_closed_term(g, sig, 1));
    if (!funcs.empty() && g.chance(1, 2)) {
        Op f = pick(g, funcs);
        std::vector<DistTerm> args;
        for (unsigned i = 0; i < f.rank(); ++i) args.push_back(random_closed_dist_term(g, sig, depth - 1, max_support));
        return DistTerm::lift(f, std::move(args));
    }
    std::size_t n = 2 + g.below(std::max(2u, max_support) - 1);
    std::vector<DistTerm> parts;
    for (std::size_t i = 0; i < n; ++i) parts.push_back(random_closed_dist_term(g, sig, depth - 1, max_support));
    return convex_of(g, parts, 6);
}

DistTerm random_open_dist_term(Gen& g, const Signature& sig, unsigned depth, const std::vector<std::string>& state_vars,
                               const std::vector<std::string>& dist_vars)
{
    auto funcs = functions_of(sig);
    if (depth == 0 || g.chance(1, 4)) {
        if (!dist_vars.empty() && g.chance(1, 2)) return DistTerm::var(pick(g, dist_vars));
        return DistTerm::dirac(random_open_term(g, sig, g.below(2), state_vars));
    }
    if (!funcs.empty() && g.chance(1, 2)) {
        Op f = pick(g, funcs);
        std::vector<DistTerm> args;
        for (unsigned i = 0; i < f.rank(); ++i)
            args.push_back(random_open_dist_term(g, sig, depth - 1, state_vars, dist_vars));
        return DistTerm::lift(f, std::move(args));
    }
    std::vector<DistTerm> parts;
    for (std::size_t i = 0; i < 2; ++i) parts.push_back(random_open_dist_term(g, sig, depth - 1, state_vars, dist_vars));
    return convex_of(g, parts, 6);
}

Distribution random_distribution(Gen& g, const Signature& sig, unsigned max_support, unsigned max_den)
{
    std::size_t n = 1 + g.below(std::max(1u, max_support));
    std::set<Term, TermLess> support;
    for (std::size_t tries = 0; support.size() < n && tries < 4 * n; ++tries) support.insert(random_closed_term(g, sig, 1));
    auto ws = g.weights(support.size(), max_den);
    Distribution d;
    std::size_t i = 0;
    for (Term t : support) d.add(t, ws[i++]);
    return d;
}

Formula random_formula(Gen& g, const std::vector<std::string>& actions, LogicClass cls, unsigned depth)
{
    const std::string& a = pick(g, actions);
    if (depth == 0) {
        std::size_t options = cls == LogicClass::Positive ? 2 : 3;
        switch (g.below(options)) {
        case 0: return Formula::top();
        case 1: return Formula::can(a);
        default: return cls == LogicClass::Full && g.chance(1, 2) ? Formula::neg(Formula::can(a)) : Formula::cannot(a);
        }
    }
    std::size_t kind = g.below(6);
    if (kind == 0) return Formula::conj({random_formula(g, actions, cls, depth - 1), random_formula(g, actions, cls, depth - 1)});
    if (kind == 1 && cls == LogicClass::Full) return Formula::neg(random_formula(g, actions, cls, depth - 1));
    if (kind == 1 && cls == LogicClass::Ready) return Formula::conj({Formula::cannot(a), random_formula(g, actions, cls, depth - 1)});
    std::size_t nb = g.chance(1, 2) ? 1 : 2;
    auto ws = g.weights(nb, 4);
    std::vector<std::pair<Rational, Formula>> bs;
    for (std::size_t i = 0; i < nb; ++i) bs.emplace_back(ws[i], random_formula(g, actions, cls, depth - 1));
    return Formula::diam(a, DistFormula::make(std::move(bs)));
}

Pts random_pts(Gen& g, unsigned max_states, unsigned actions)
{
    Pts pts;
    std::size_t n = 1 + g.below(std::max(1u, max_states));
    for (unsigned a = 0; a < std::max(1u, actions); ++a) pts.add_action(std::string(1, static_cast<char>('a' + a)));
    for (std::size_t s = 0; s < n; ++s) pts.add_state(Term::constant(Op::make("s" + std::to_string(s), {}, 0)));
    std::vector<std::vector<std::vector<IndexDist>>> succ(n, std::vector<std::vector<IndexDist>>(pts.action_list().size()));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < pts.action_list().size(); ++a) {
            std::size_t count = g.below(3);
            for (std::size_t k = 0; k < count; ++k) {
                std::size_t m = 1 + g.below(std::min<std::size_t>(3, n));
                std::set<std::size_t> targets;
                while (targets.size() < m) targets.insert(g.below(n));
                auto ws = g.weights(m, 4);
                IndexDist d;
                std::size_t i = 0;
                for (std::size_t t : targets) d.emplace_back(t, ws[i++]);
                succ[s][a].push_back(std::move(d));
            }
        }
    if (n > 1 && g.chance(1, 2)) {
        std::size_t i = g.below(n), j = g.below(n);
        if (i != j) {
            succ[j] = succ[i];
            if (g.chance(1, 2))
                for (auto& ds : succ[j])
                    if (ds.size() > 1) ds.pop_back();
        }
    }
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < pts.action_list().size(); ++a) pts.set_successors(s, a, succ[s][a]);
    return pts;
}

const char* to_string(Theorem t)
{
    switch (t) {
    case Theorem::Proof: return "proof";
    case Theorem::Ruloid: return "ruloid";
    case Theorem::DistRuloid: return "dist-ruloid";
    case Theorem::Decomposition: return "decomposition";
    case Theorem::Characterization: return "characterization";
    case Theorem::Congruence: return "congruence";
    case Theorem::Invariants: return "invariants";
    }
    return "?";
}

std::optional<Theorem> theorem_from_string(std::string_view s)
{
    for (Theorem t : {Theorem::Proof, Theorem::Ruloid, Theorem::DistRuloid, Theorem::Decomposition,
                      Theorem::Characterization, Theorem::Congruence, Theorem::Invariants})
        if (s == to_string(t)) return t;
    return std::nullopt;
}

unsigned harness_threads(unsigned requested)
{
    if (requested) return requested;
    if (const char* env = std::getenv("RULOID_FORGE_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min(v, 256ul));
    }
    return std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
}

namespace {

struct Case {
    CaseResult r;
    void check(bool ok, const std::string& why, Json witness = {})
    {
        ++r.checks;
        if (ok || r.verdict == CaseResult::Verdict::Fail) return;
        r.verdict = CaseResult::Verdict::Fail;
        r.reason = why;
        r.witness = std::move(witness);
    }
    void skip(const std::string& why)
    {
        if (r.verdict == CaseResult::Verdict::Pass) {
            r.verdict = CaseResult::Verdict::Skip;
            r.reason = why;
        }
    }
};

PtsSpec case_spec(Gen& g, const HarnessConfig& cfg, SpecShape shape = {})
{
    if (cfg.spec) return *cfg.spec;
    return random_spec(g, shape);
}

Json subst_json(const Substitution& s) { return to_json(s); }

Substitution closing(Gen& g, const Signature& sig, const VarSet& vs, unsigned depth = 1)
{
    Substitution s;
    for (const auto& x : vs.state) s.bind_state(x, random_closed_term(g, sig, depth));
    for (const auto& mu : vs.dist) s.bind_dist(mu, random_distribution(g, sig, 3, 6).to_dist_term());
    return s;
}

void proof_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    PtsSpec spec = case_spec(g, cfg);
    const Signature& sig = spec.signature();
    DistTerm theta = random_closed_dist_term(g, sig, 1 + static_cast<unsigned>(g.below(4)), 3);
    Json w = {{"term", to_string(theta)}};
    Distribution sem = eval_dist(theta);
    c.check(sem.mass() == 1, "semantics does not sum to 1", w);
    ProofNode p = proof_of(theta);
    c.check(check_proof(p), "proof tree has an invalid node", w);
    c.check(p.instance.conclusion.source == theta, "proof concludes about another term", w);
    c.check(p.instance.conclusion.as_distribution() == sem, "proof conclusion differs from the semantics", w);

    DistOverTerms l = DistOverTerms::from(theta, sem);
    c.check(prove_dist(l).provable, "semantic distribution not provable", w);
    if (sem.support_size() >= 2) {
        c.r.nontrivial = true;
        std::vector<std::pair<Rational, Term>> bs = l.branches;
        Rational delta = std::min(bs[0].first, bs[1].first) / 2;
        bs[0].first -= delta;
        bs[1].first += delta;
        DistOverTerms moved = DistOverTerms::make(theta, bs);
        c.check(!prove_dist(moved).provable, "perturbed weights provable", w);
    }
    Term other = random_closed_term(g, sig, 2);
    if (sem(other) == 0) {
        std::vector<std::pair<Rational, Term>> bs = l.branches;
        bs[g.below(bs.size())].second = other;
        DistOverTerms swapped = DistOverTerms::make(theta, bs);
        c.check(!prove_dist(swapped).provable, "distribution with a foreign target provable", w);
    }
}

void ruloid_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    PtsSpec spec = case_spec(g, cfg);
    const Signature& sig = spec.signature();
    Term t = random_open_term(g, sig, 1 + static_cast<unsigned>(g.below(3)), {"x", "y", "z"});
    const std::string& a = pick(g, sig.actions());
    RuloidEngine engine(spec);
    Semantics sem(spec);
    VarSet tv = vars(t);
    for (const auto& r : engine.ruloids(t, a)) {
        bool ok = r.conclusion.source == t && r.conclusion.action == a;
        for (const auto& p : r.premises) ok = ok && p.source.is_var() && tv.state.count(p.source.name());
        c.check(ok, "malformed ruloid", {{"term", to_string(t)}, {"ruloid", to_string(r)}});
    }
    for (int k = 0; k < 6; ++k) {
        Substitution s = closing(g, sig, tv);
        Term u = apply(s, t);
        std::set<Distribution> derived(sem.derivatives(u, a).begin(), sem.derivatives(u, a).end());
        std::set<Distribution> inst;
        for_each_instance(engine, sem, t, s, a, [&](const LiteralRule&, const Substitution&, const Distribution& d) {
            inst.insert(d);
            return true;
        });
        Json w = {{"term", to_string(t)}, {"action", a}, {"substitution", subst_json(s)}};
        if (derived != inst) {
            Json only_derived = Json::array(), only_inst = Json::array();
            for (const auto& d : derived)
                if (!inst.count(d)) only_derived.push_back(to_string(d));
            for (const auto& d : inst)
                if (!derived.count(d)) only_inst.push_back(to_string(d));
            w["only_semantics"] = only_derived;
            w["only_ruloids"] = only_inst;
        }
        c.check(derived == inst, "ruloid instances and derived transitions differ", w);
        if (!derived.empty()) c.r.nontrivial = true;
    }
}

void dist_ruloid_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    PtsSpec spec = case_spec(g, cfg);
    const Signature& sig = spec.signature();
    DistTerm theta = random_open_dist_term(g, sig, 1 + static_cast<unsigned>(g.below(3)), {"x", "y"}, {"mu", "nu"});
    VarSet tv = vars(theta);
    Json w = {{"term", to_string(theta)}};

    // Instance to ruloid.
    Substitution s = closing(g, sig, tv);
    w["substitution"] = subst_json(s);
    DistRuloidWitness wit = dist_ruloid_witness(theta, s);
    auto inv = check_invariants(wit.ruloid);
    c.check(!inv, "witness ruloid breaks an invariant: " + inv.value_or(""), w);
    c.check(premises_provable(wit.ruloid, wit.sigma), "witness premises not provable", w);
    Distribution sem = eval_dist(apply(s, theta));
    c.check(wit.reduced_conclusion.as_distribution() == sem, "witness conclusion differs from the semantics", w);
    c.check(prove_dist(wit.reduced_conclusion).provable, "witness conclusion not provable", w);

    // Ruloid to instance.
    Shapes shapes;
    for (const auto& mu : tv.dist) shapes[mu] = g.weights(1 + g.below(3), 6);
    DistRuloid r = build_dist_ruloid(theta, shapes);
    w["shapes"] = {};
    for (const auto& [mu, ws] : shapes) {
        Json arr = Json::array();
        for (const auto& q : ws) arr.push_back(to_json(q));
        w["shapes"][mu] = arr;
    }
    inv = check_invariants(r);
    c.check(!inv, "ruloid breaks an invariant: " + inv.value_or(""), w);
    Rational total = 0;
    for (const auto& [q, u] : r.conclusion.branches) total += q;
    c.check(total == 1, "conclusion weights do not sum to 1", w);
    Substitution s2;
    for (const auto& p : r.premises)
        for (const auto& [q, x] : p.branches)
            if (!s2.state(x.name())) s2.bind_state(x.name(), random_closed_term(g, sig, 1));
    for (const auto& x : tv.state)
        if (!s2.state(x)) s2.bind_state(x, random_closed_term(g, sig, 1));
    for (const auto& p : r.premises) {
        if (p.source.kind() != DistTerm::Kind::Var) continue;
        Distribution d;
        for (const auto& [q, x] : p.branches) d.add(*s2.state(x.name()), q);
        s2.bind_dist(p.source.name(), d.to_dist_term());
    }
    w["ruloid_substitution"] = subst_json(s2);
    c.check(premises_provable(r, s2), "premises of the instantiated ruloid not provable", w);
    DistOverTerms red = reduce(s2, r.conclusion);
    c.check(red.as_distribution() == eval_dist(apply(s2, theta)), "reduced conclusion differs from the semantics", w);
    c.check(prove_dist(red).provable, "reduced conclusion not provable", w);
    if (!tv.dist.empty()) c.r.nontrivial = true;
}

bool contains(const std::vector<StateMapping>& ms, const StateMapping& m)
{
    return std::any_of(ms.begin(), ms.end(), [&](const StateMapping& x) { return compare(x, m) == 0; });
}

void decomposition_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    SpecShape shape;
    shape.negative = g.chance(1, 2);
    shape.max_rules = 5;
    PtsSpec spec = case_spec(g, cfg, shape);
    const Signature& sig = spec.signature();
    Term t = random_open_term(g, sig, 1 + static_cast<unsigned>(g.below(2)), {"x", "y"});
    VarSet tv = vars(t);
    std::vector<Substitution> subs;
    for (int k = 0; k < 6; ++k) subs.push_back(closing(g, sig, tv));

    std::vector<LogicClass> classes{LogicClass::Full, LogicClass::Ready};
    if (spec.is_positive()) classes.push_back(LogicClass::Positive);
    for (LogicClass cls : classes) {
        Formula phi = random_formula(g, sig.actions(), cls, 1 + static_cast<unsigned>(g.below(2)));
        Decomposer dec(spec, cls, cfg.bounds);
        Json w = {{"term", to_string(t)}, {"formula", to_string(phi)}, {"class", to_string(cls)}};
        const StateDecomposition& d = dec.state(t, phi);
        if (d.truncated) c.r.truncated = true;
        for (const auto& xi : d.mappings)
            for (const auto& [x, f] : xi) {
                c.check(in_class(f, cls), "mapping formula outside the class", w);
                c.check(tv.state.count(x) != 0, "mapping mentions a foreign variable", w);
            }
        for (const auto& s : subs) {
            Term u = apply(s, t);
            bool holds = dec.checker().sat(u, phi);
            Json ws = w;
            ws["substitution"] = subst_json(s);
            for (const auto& xi : d.mappings)
                if (dec.satisfies(xi, s)) {
                    Json wx = ws;
                    wx["mapping"] = to_json(xi);
                    c.check(holds, "soundness: mapping satisfied but the composite fails", wx);
                }
            if (!holds) continue;
            c.r.nontrivial = true;
            GuidedInfo info;
            auto gx = dec.guided(t, phi, s, &info);
            c.check(gx.has_value(), "completeness: no verified mapping for a satisfied instance", ws);
            c.check(!info.soundness_violation, "guided negation found no failing variable", ws);
            if (!gx) continue;
            for (const auto& [x, f] : *gx) c.check(in_class(f, cls), "guided formula outside the class", ws);
            if (!d.truncated && !info.truncated && info.within(cfg.bounds)) {
                Json wx = ws;
                wx["mapping"] = to_json(*gx);
                c.check(contains(d.mappings, *gx), "guided mapping missing from the bounded enumeration", wx);
            }
        }
    }
}

// Relation induced by a pool of formulas closed under conjunction (negation
// for the full class) and under characteristic diamonds of every transition.
Relation pool_relation(Pts& pts, LogicClass cls)
{
    const std::size_t n = pts.size();
    const std::uint32_t full = n >= 32 ? ~0u : ((1u << n) - 1);
    ModelChecker mc(pts);
    std::map<std::uint32_t, Formula> pool;
    auto ext = [&](Formula f) {
        std::uint32_t m = 0;
        for (std::size_t s = 0; s < n; ++s)
            if (mc.sat(pts.state(s), f)) m |= 1u << s;
        return m;
    };
    auto add = [&](std::uint32_t m, Formula f) { return pool.emplace(m, f).second; };
    add(full, Formula::top());
    if (cls == LogicClass::Ready)
        for (const auto& a : pts.action_list()) add(ext(Formula::cannot(a)), Formula::cannot(a));
    for (;;) {
        bool grown = true;
        while (grown) {
            grown = false;
            std::vector<std::pair<std::uint32_t, Formula>> cur(pool.begin(), pool.end());
            for (std::size_t i = 0; i < cur.size(); ++i) {
                if (cls == LogicClass::Full) grown |= add(full & ~cur[i].first, Formula::neg(cur[i].second));
                for (std::size_t j = i + 1; j < cur.size(); ++j)
                    grown |= add(cur[i].first & cur[j].first, Formula::conj({cur[i].second, cur[j].second}));
            }
        }
        std::vector<Formula> chi(n);
        for (std::size_t u = 0; u < n; ++u) {
            std::uint32_t m = full;
            for (const auto& [mask, f] : pool)
                if (mask >> u & 1u) m &= mask;
            chi[u] = pool.at(m);
        }
        bool changed = false;
        for (std::size_t s = 0; s < n; ++s)
            for (const auto& a : pts.action_list())
                for (const auto& pi : pts.derivatives(pts.state(s), a)) {
                    std::vector<std::pair<Rational, Formula>> bs;
                    for (const auto& [u, w] : pi.weights()) bs.emplace_back(w, chi[*pts.find(u)]);
                    Formula f = Formula::diam(a, DistFormula::make(std::move(bs)));
                    changed |= add(ext(f), f);
                }
        if (!changed) break;
    }
    Relation r(n, std::vector<char>(n, 1));
    for (const auto& [mask, f] : pool)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
                if ((mask >> s & 1u) && !(mask >> t & 1u)) r[s][t] = 0;
    return r;
}

LogicClass class_of(RelationKind k)
{
    switch (k) {
    case RelationKind::Bisimilarity: return LogicClass::Full;
    case RelationKind::ReadySimilarity: return LogicClass::Ready;
    case RelationKind::Similarity: return LogicClass::Positive;
    }
    return LogicClass::Full;
}

void characterization_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    Pts pts = random_pts(g, 8, 2);
    if (cfg.spec) {
        Semantics sem(*cfg.spec);
        std::vector<Term> roots{random_closed_term(g, cfg.spec->signature(), 1), random_closed_term(g, cfg.spec->signature(), 1)};
        Exploration ex = explore_pts(sem, roots, 8);
        if (!ex.truncated) pts = std::move(ex.pts);
    }
    Json w = {{"pts", to_json(pts)}};
    for (RelationKind kind : {RelationKind::Bisimilarity, RelationKind::ReadySimilarity, RelationKind::Similarity}) {
        RefinementTrace tr = compute_relation(pts, kind);
        LogicClass cls = class_of(kind);
        Relation oracle = pool_relation(pts, cls);
        ModelChecker mc(pts);
        for (std::size_t s = 0; s < pts.size(); ++s)
            for (std::size_t t = 0; t < pts.size(); ++t) {
                Json wp = w;
                wp["kind"] = to_string(kind);
                wp["pair"] = {to_string(pts.state(s)), to_string(pts.state(t))};
                c.check(tr.related(s, t) == (oracle[s][t] != 0), "relation differs from formula preservation", wp);
                if (tr.related(s, t)) continue;
                if (s != t) c.r.nontrivial = true;
                Formula f = distinguishing_formula(pts, tr, s, t);
                wp["formula"] = to_string(f);
                c.check(in_class(f, cls), "distinguishing formula outside the class", wp);
                c.check(mc.sat(pts.state(s), f) && !mc.sat(pts.state(t), f), "distinguishing formula does not distinguish",
                        wp);
            }
    }
}

void congruence_case(Gen& g, const HarnessConfig& cfg, RelationKind kind, Case& c)
{
    SpecShape shape;
    shape.negative = kind != RelationKind::Similarity && g.chance(1, 2);
    shape.clone_constant = g.chance(1, 2);
    PtsSpec spec = case_spec(g, cfg, shape);
    if (kind == RelationKind::Similarity && !spec.is_positive()) {
        c.skip("similarity congruence needs a positive specification");
        return;
    }
    const Signature& sig = spec.signature();
    auto funcs = functions_of(sig);
    if (funcs.empty()) {
        c.skip("no operator of positive arity");
        return;
    }
    Semantics sem(spec);
    std::vector<Term> roots;
    for (Op k : constants_of(sig)) roots.push_back(Term::constant(k));
    for (int i = 0; i < 4; ++i) roots.push_back(random_closed_term(g, sig, 1));
    Exploration ex = explore_pts(sem, roots, cfg.max_states);
    if (ex.truncated) {
        c.skip("argument state space exceeds the state budget");
        return;
    }
    RefinementTrace tr = compute_relation(ex.pts, kind);
    Op f = pick(g, funcs);
    std::vector<Term> lhs, rhs;
    Json pairs = Json::array();
    for (unsigned i = 0; i < f.rank(); ++i) {
        std::size_t s = g.below(ex.pts.size());
        std::vector<std::size_t> partners;
        for (std::size_t t = 0; t < ex.pts.size(); ++t)
            if (t != s && tr.related(s, t)) partners.push_back(t);
        std::size_t t = partners.empty() || g.chance(1, 4) ? s : pick(g, partners);
        if (t != s) c.r.nontrivial = true;
        lhs.push_back(ex.pts.state(s));
        rhs.push_back(ex.pts.state(t));
        pairs.push_back({to_string(lhs.back()), to_string(rhs.back())});
    }
    Term u = Term::app(f, lhs), v = Term::app(f, rhs);
    Exploration ex2 = explore_pts(sem, {u, v}, cfg.max_states);
    if (ex2.truncated) {
        c.skip("composite state space exceeds the state budget");
        return;
    }
    RefinementTrace tr2 = compute_relation(ex2.pts, kind);
    std::size_t i = *ex2.pts.find(u), j = *ex2.pts.find(v);
    Json w = {{"kind", to_string(kind)}, {"spec", print_spec(spec)}, {"arguments", pairs}, {"lhs", to_string(u)},
              {"rhs", to_string(v)}};
    if (!tr2.related(i, j)) w["formula"] = to_string(distinguishing_formula(ex2.pts, tr2, i, j));
    c.check(tr2.related(i, j), "composites of related arguments are unrelated", w);
}

void invariants_case(Gen& g, const HarnessConfig& cfg, Case& c)
{
    SpecShape shape;
    shape.negative = g.chance(1, 2);
    PtsSpec spec = case_spec(g, cfg, shape);
    const Signature& sig = spec.signature();
    Semantics sem(spec);
    Term t = random_closed_term(g, sig, 2);
    Exploration ex = explore_pts(sem, {t}, cfg.max_states);
    Json w = {{"spec", print_spec(spec)}, {"term", to_string(t)}};
    for (std::size_t s = 0; s < ex.pts.size(); ++s)
        for (const auto& a : sig.actions()) {
            if (!ex.pts.explored(s, *ex.pts.action_index(a))) continue;
            for (const auto& d : ex.pts.derivatives(ex.pts.state(s), a))
                c.check(d.mass() == 1, "derived distribution does not sum to 1", w);
        }

    Term o = random_open_term(g, sig, 2, {"x", "y"});
    RuloidEngine engine(spec);
    Substitution s = closing(g, sig, vars(o));
    for (const auto& a : sig.actions()) {
        for (const auto& r : engine.ruloids(o, a))
            if (spec.is_positive()) c.check(r.is_positive(), "positive specification produced a negative ruloid", w);
        for_each_instance(engine, sem, o, s, a, [&](const LiteralRule&, const Substitution&, const Distribution& d) {
            c.check(d.mass() == 1, "ruloid conclusion does not sum to 1", w);
            return true;
        });
    }

    DistTerm theta = random_open_dist_term(g, sig, 2, {"x"}, {"mu", "nu"});
    Shapes shapes;
    for (const auto& mu : vars(theta).dist) shapes[mu] = g.weights(1 + g.below(3), 6);
    DistRuloid r = build_dist_ruloid(theta, shapes);
    Rational total = 0;
    for (const auto& [q, u] : r.conclusion.branches) total += q;
    c.check(total == 1, "distribution ruloid conclusion does not sum to 1", {{"term", to_string(theta)}});
    for (const auto& p : r.premises) {
        Rational pt = 0;
        for (const auto& [q, u] : p.branches) pt += q;
        c.check(pt == 1, "distribution ruloid premise does not sum to 1", {{"term", to_string(theta)}});
    }

    Pts pts = random_pts(g, 8, 2);
    RefinementTrace bis = bisimilarity(pts), rs = ready_similarity(pts), sim = similarity(pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            c.check(!bis.related(i, j) || rs.related(i, j), "bisimilar pair not ready similar", {{"pts", to_json(pts)}});
            c.check(!rs.related(i, j) || sim.related(i, j), "ready similar pair not similar", {{"pts", to_json(pts)}});
        }
}

CaseResult run_case(Theorem th, std::size_t index, std::uint64_t seed, const HarnessConfig& cfg)
{
    Case c;
    c.r.index = index;
    c.r.seed = seed;
    Gen g(seed);
    try {
        switch (th) {
        case Theorem::Proof: proof_case(g, cfg, c); break;
        case Theorem::Ruloid: ruloid_case(g, cfg, c); break;
        case Theorem::DistRuloid: dist_ruloid_case(g, cfg, c); break;
        case Theorem::Decomposition: decomposition_case(g, cfg, c); break;
        case Theorem::Characterization: characterization_case(g, cfg, c); break;
        case Theorem::Congruence: {
            static const RelationKind kinds[] = {RelationKind::Bisimilarity, RelationKind::ReadySimilarity,
                                                 RelationKind::Similarity};
            std::size_t per = std::max<std::size_t>(1, cfg.replay ? 1 : cfg.samples);
            RelationKind kind = cfg.replay ? kinds[seed % 3] : kinds[std::min<std::size_t>(index / per, 2)];
            congruence_case(g, cfg, kind, c);
            break;
        }
        case Theorem::Invariants: invariants_case(g, cfg, c); break;
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Budget) {
            c.skip(std::string("budget: ") + e.what());
        } else {
            c.r.verdict = CaseResult::Verdict::Fail;
            c.r.reason = std::string(to_string(e.kind())) + ": " + e.what();
        }
    } catch (const std::exception& e) {
        c.r.verdict = CaseResult::Verdict::Fail;
        c.r.reason = std::string("exception: ") + e.what();
    }
    return std::move(c.r);
}

const char* verdict_name(CaseResult::Verdict v)
{
    switch (v) {
    case CaseResult::Verdict::Pass: return "pass";
    case CaseResult::Verdict::Fail: return "fail";
    case CaseResult::Verdict::Skip: return "skip";
    }
    return "?";
}

} // namespace

std::size_t Report::count(CaseResult::Verdict v) const
{
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [&](const CaseResult& c) { return c.verdict == v; }));
}

std::size_t Report::checks() const
{
    std::size_t n = 0;
    for (const auto& c : cases) n += c.checks;
    return n;
}

Json Report::to_json() const
{
    Json j = envelope("verify-report");
    j["theorem"] = rforge::to_string(theorem);
    j["seed"] = config.seed;
    j["samples"] = config.samples;
    j["bounds"] = {{"k", config.bounds.k}, {"d", config.bounds.d}, {"max_mappings", config.bounds.max_mappings}};
    j["max_states"] = config.max_states;
    std::size_t nontrivial = 0, truncated = 0;
    for (const auto& c : cases) {
        nontrivial += c.nontrivial;
        truncated += c.truncated;
    }
    j["summary"] = {{"cases", cases.size()},
                    {"passed", count(CaseResult::Verdict::Pass)},
                    {"failed", count(CaseResult::Verdict::Fail)},
                    {"skipped", count(CaseResult::Verdict::Skip)},
                    {"checks", checks()},
                    {"nontrivial", nontrivial},
                    {"bounded", truncated}};
    Json cs = Json::array();
    for (const auto& c : cases) {
        Json e = {{"index", c.index}, {"seed", c.seed}, {"verdict", verdict_name(c.verdict)}, {"checks", c.checks}};
        if (!c.reason.empty()) e["reason"] = c.reason;
        if (!c.witness.is_null()) e["witness"] = c.witness;
        cs.push_back(std::move(e));
    }
    j["cases"] = cs;
    return j;
}

Report run_harness(Theorem theorem, const HarnessConfig& config)
{
    Report rep;
    rep.theorem = theorem;
    rep.config = config;
    if (config.replay) {
        rep.cases.push_back(run_case(theorem, 0, *config.replay, config));
        return rep;
    }
    std::size_t total = theorem == Theorem::Congruence ? 3 * config.samples : config.samples;
    rep.cases.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < total; i = next++) rep.cases[i] = run_case(theorem, i, case_seed(config.seed, i), config);
    };
    unsigned n = std::min<unsigned>(harness_threads(config.threads), static_cast<unsigned>(std::max<std::size_t>(1, total)));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rep;
}

} // namespace rforge
