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

#include "rforge/ruloids.hpp"

#include <algorithm>
#include <set>

namespace rforge {

const std::vector<LiteralRule>& RuloidEngine::ruloids(Term t, const std::string& a)
{
    Key key{t, a};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<LiteralRule> r = compute(t, a);
    return memo_.emplace(std::move(key), std::move(r)).first->second;
}

LiteralRule RuloidEngine::rename_apart(const LiteralRule& r)
{
    Substitution s;
    auto rename = [&](DistTerm d) {
        for (const auto& mu : vars(d).dist)
            if (!s.dist(mu)) s.bind_dist(mu, DistTerm::var(fresh()));
    };
    for (const auto& p : r.premises)
        if (p.positive()) rename(p.target);
    rename(r.conclusion.target);
    LiteralRule out = r;
    for (auto& p : out.premises)
        if (p.positive()) p.target = apply(s, p.target);
    out.conclusion.target = apply(s, out.conclusion.target);
    return out;
}

std::vector<LiteralRule> RuloidEngine::compute(Term t, const std::string& a)
{
    if (t.is_var()) {
        DistTerm mu = DistTerm::var(fresh());
        LiteralRule r{{Literal::pos(t, a, mu)}, Literal::pos(t, a, mu)};
        return {canonical(r, RenameScope::DistOnly)};
    }

    struct Partial {
        std::vector<Literal> premises;
        Substitution sigma;
    };

    std::set<LiteralRule> out;
    for (const PgsosRule* rule : spec_->rules_for(t.op(), a)) {
        Partial base;
        for (std::size_t i = 0; i < rule->source_vars().size(); ++i) base.sigma.bind_state(rule->source_vars()[i], t.args()[i]);
        std::vector<Partial> parts{base};

        for (const auto& p : rule->positives()) {
            Term ti = t.args()[p.arg];
            std::vector<Partial> next;
            if (ti.is_var()) {
                for (auto& part : parts) {
                    DistTerm mu = DistTerm::var(fresh());
                    part.premises.push_back(Literal::pos(ti, p.action, mu));
                    part.sigma.bind_dist(p.dist_var, mu);
                    next.push_back(std::move(part));
                }
            } else {
                const auto& subs = ruloids(ti, p.action);
                for (const auto& part : parts)
                    for (const auto& sub : subs) {
                        LiteralRule ren = rename_apart(sub);
                        Partial q = part;
                        q.premises.insert(q.premises.end(), ren.premises.begin(), ren.premises.end());
                        q.sigma.bind_dist(p.dist_var, ren.conclusion.target);
                        next.push_back(std::move(q));
                    }
            }
            parts = std::move(next);
            if (parts.size() > opts_.max_ruloids) throw Error(ErrorKind::Budget, "ruloid budget exceeded");
        }

        for (const auto& n : rule->negatives()) {
            Term ti = t.args()[n.arg];
            if (ti.is_var()) {
                for (auto& part : parts) part.premises.push_back(Literal::neg(ti, n.action));
                continue;
            }
            // One literal picked from every premise set, each replaced by its opposite.
            const auto& subs = ruloids(ti, n.action);
            std::set<std::vector<Literal>> picks;
            std::vector<std::size_t> idx(subs.size(), 0);
            bool any = std::all_of(subs.begin(), subs.end(), [](const LiteralRule& r) { return !r.premises.empty(); });
            while (any) {
                std::set<Literal> denied;
                for (std::size_t j = 0; j < subs.size(); ++j) {
                    Literal l = subs[j].premises[idx[j]];
                    if (l.positive())
                        denied.insert(Literal::neg(l.source, l.action));
                    else
                        denied.insert(Literal::pos(l.source, l.action, DistTerm::var("_")));
                }
                picks.insert(std::vector<Literal>(denied.begin(), denied.end()));
                if (picks.size() > opts_.max_ruloids) throw Error(ErrorKind::Budget, "ruloid budget exceeded");
                std::size_t j = 0;
                while (j < idx.size() && ++idx[j] == subs[j].premises.size()) idx[j++] = 0;
                if (j == idx.size()) break;
            }
            std::vector<Partial> next;
            for (const auto& part : parts)
                for (const auto& pick : picks) {
                    Partial q = part;
                    for (const auto& l : pick)
                        q.premises.push_back(l.positive() ? Literal::pos(l.source, l.action, DistTerm::var(fresh())) : l);
                    next.push_back(std::move(q));
                }
            parts = std::move(next);
            if (parts.size() > opts_.max_ruloids) throw Error(ErrorKind::Budget, "ruloid budget exceeded");
        }

        for (const auto& part : parts) {
            LiteralRule r{part.premises, Literal::pos(t, a, apply(part.sigma, rule->target()))};
            if (opts_.prune_contradictory && r.contradictory()) continue;
            out.insert(canonical(r, RenameScope::DistOnly));
        }
        if (out.size() > opts_.max_ruloids) throw Error(ErrorKind::Budget, "ruloid budget exceeded");
    }
    return {out.begin(), out.end()};
}

std::vector<LiteralRule> derive_ruloids(const PtsSpec& spec, Term t, const std::string& a, RuloidOptions opts)
{
    RuloidEngine e(spec, opts);
    return e.ruloids(t, a);
}

void for_each_instance(RuloidEngine& engine, Semantics& sem, Term t, const Substitution& s, const std::string& a,
                       const std::function<bool(const LiteralRule&, const Substitution&, const Distribution&)>& f)
{
    VarSet tv = vars(t);
    OpenEnv env;
    for (const auto& x : tv.state) {
        const Term* u = s.state(x);
        if (!u || !u->closed()) throw Error(ErrorKind::NonClosed, "substitution does not close " + x);
        env.state.emplace(x, *u);
    }
    for (const auto& r : engine.ruloids(t, a)) {
        bool ok = true;
        std::vector<const std::vector<Distribution>*> choices;
        std::vector<std::string> mus;
        for (const auto& p : r.premises) {
            Term u = apply(s, p.source);
            const auto& ds = sem.derivatives(u, p.action);
            if (p.positive()) {
                if (ds.empty()) ok = false;
                choices.push_back(&ds);
                mus.push_back(p.target.name());
            } else if (!ds.empty()) {
                ok = false;
            }
            if (!ok) break;
        }
        if (!ok) continue;
        std::vector<std::size_t> idx(choices.size(), 0);
        for (;;) {
            OpenEnv e = env;
            Substitution sp;
            for (const auto& [x, u] : env.state) sp.bind_state(x, u);
            for (std::size_t j = 0; j < choices.size(); ++j) {
                const Distribution& d = (*choices[j])[idx[j]];
                e.dist[mus[j]] = &d;
                sp.bind_dist(mus[j], d.to_dist_term());
            }
            if (!f(r, sp, eval_open(r.conclusion.target, e))) return;
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == choices[j]->size()) idx[j++] = 0;
            if (j == idx.size()) break;
        }
    }
}

std::optional<RuloidWitness> ruloid_witness(RuloidEngine& engine, Semantics& sem, Term t, const Substitution& s,
                                            const std::string& a, const Distribution& pi)
{
    std::optional<RuloidWitness> w;
    for_each_instance(engine, sem, t, s, a, [&](const LiteralRule& r, const Substitution& sp, const Distribution& d) {
        if (!(d == pi)) return true;
        w = RuloidWitness{r, sp};
        return false;
    });
    return w;
}

} // namespace rforge
