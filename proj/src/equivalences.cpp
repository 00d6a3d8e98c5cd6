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

#include "rforge/equivalences.hpp"

#include "rforge/flow.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace rforge {

bool lift_check(const Relation& r, const IndexDist& pi, const IndexDist& rho)
{
    Transport t;
    for (const auto& [s, w] : pi) {
        t.supply.push_back(w);
        std::vector<char> row;
        for (const auto& [u, q] : rho) row.push_back(r[s][u]);
        t.allowed.push_back(std::move(row));
    }
    for (const auto& [u, q] : rho) t.demand.push_back(q);
    return feasible(t);
}

namespace {

using MassVector = std::vector<std::pair<std::size_t, Rational>>;

MassVector class_masses(const std::vector<std::size_t>& block, const IndexDist& d)
{
    std::map<std::size_t, Rational> m;
    for (const auto& [s, w] : d) m[block[s]] += w;
    return {m.begin(), m.end()};
}

} // namespace

bool lift_check_classes(const std::vector<std::size_t>& block, const IndexDist& pi, const IndexDist& rho)
{
    return class_masses(block, pi) == class_masses(block, rho);
}

const char* to_string(RelationKind k)
{
    switch (k) {
    case RelationKind::Bisimilarity: return "bisim";
    case RelationKind::Similarity: return "sim";
    case RelationKind::ReadySimilarity: return "ready";
    }
    return "";
}

std::size_t RefinementTrace::iterations() const
{
    if (kind == RelationKind::Bisimilarity) return rounds.empty() ? 0 : rounds.size() - 1;
    std::size_t m = 0;
    for (const auto& row : removed_at)
        for (std::size_t r : row)
            if (r != never) m = std::max(m, r);
    return m;
}

RefinementTrace bisimilarity(const Pts& pts)
{
    const std::size_t n = pts.size(), na = pts.action_list().size();
    RefinementTrace tr;
    tr.kind = RelationKind::Bisimilarity;
    tr.rounds.emplace_back(n, 0);
    std::size_t blocks = n ? 1 : 0;
    for (;;) {
        const auto& prev = tr.rounds.back();
        using Sig = std::pair<std::size_t, std::vector<std::vector<MassVector>>>;
        std::map<Sig, std::size_t> ids;
        std::vector<std::size_t> next(n);
        for (std::size_t s = 0; s < n; ++s) {
            Sig sig{prev[s], {}};
            for (std::size_t a = 0; a < na; ++a) {
                std::vector<MassVector> ms;
                for (const auto& d : pts.successors(s, a)) ms.push_back(class_masses(prev, d));
                std::sort(ms.begin(), ms.end());
                ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
                sig.second.push_back(std::move(ms));
            }
            auto [it, fresh] = ids.emplace(std::move(sig), ids.size());
            next[s] = it->second;
        }
        if (ids.size() == blocks) break;
        blocks = ids.size();
        tr.rounds.push_back(std::move(next));
    }
    const auto& fin = tr.rounds.back();
    tr.relation.assign(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) tr.relation[s][t] = fin[s] == fin[t];
    return tr;
}

namespace {

RefinementTrace simulation_fixpoint(const Pts& pts, bool ready)
{
    const std::size_t n = pts.size(), na = pts.action_list().size();
    RefinementTrace tr;
    tr.kind = ready ? RelationKind::ReadySimilarity : RelationKind::Similarity;
    tr.relation.assign(n, std::vector<char>(n, 1));
    tr.removed_at.assign(n, std::vector<std::size_t>(n, RefinementTrace::never));
    if (ready) {
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t a = 0; a < na; ++a)
                    if (pts.successors(s, a).empty() && !pts.successors(t, a).empty()) {
                        tr.relation[s][t] = 0;
                        tr.removed_at[s][t] = 0;
                        break;
                    }
    }
    for (std::size_t round = 1;; ++round) {
        std::vector<std::pair<std::size_t, std::size_t>> drop;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) {
                if (!tr.relation[s][t]) continue;
                bool ok = true;
                for (std::size_t a = 0; a < na && ok; ++a)
                    for (const auto& pi : pts.successors(s, a)) {
                        const auto& rhos = pts.successors(t, a);
                        bool matched = std::any_of(rhos.begin(), rhos.end(),
                                                   [&](const IndexDist& rho) { return lift_check(tr.relation, pi, rho); });
                        if (!matched) {
                            ok = false;
                            break;
                        }
                    }
                if (!ok) drop.emplace_back(s, t);
            }
        if (drop.empty()) break;
        for (auto [s, t] : drop) {
            tr.relation[s][t] = 0;
            tr.removed_at[s][t] = round;
        }
    }
    return tr;
}

} // namespace

RefinementTrace similarity(const Pts& pts) { return simulation_fixpoint(pts, false); }
RefinementTrace ready_similarity(const Pts& pts) { return simulation_fixpoint(pts, true); }

RefinementTrace compute_relation(const Pts& pts, RelationKind kind)
{
    switch (kind) {
    case RelationKind::Bisimilarity: return bisimilarity(pts);
    case RelationKind::Similarity: return similarity(pts);
    case RelationKind::ReadySimilarity: return ready_similarity(pts);
    }
    return {};
}

namespace {

class Distinguisher {
public:
    Distinguisher(Pts& pts, const RefinementTrace& tr) : pts_(pts), tr_(tr) {}

    Formula dist(std::size_t s, std::size_t t)
    {
        auto key = std::make_pair(s, t);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Formula f = tr_.kind == RelationKind::Bisimilarity ? bisim(s, t) : preorder(s, t);
        memo_.emplace(key, f);
        return f;
    }

private:
    using Related = std::function<bool(std::size_t, std::size_t)>;

    // <a> with one branch per support state u of pi, each the conjunction of
    // formulas separating u from the unrelated states reachable from other.
    Formula diamond(std::size_t a, const IndexDist& pi, std::size_t other, const Related& rel)
    {
        std::vector<std::size_t> reach;
        for (const auto& rho : pts_.successors(other, a))
            for (const auto& [v, q] : rho) reach.push_back(v);
        std::sort(reach.begin(), reach.end());
        reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
        std::vector<std::pair<Rational, Formula>> branches;
        for (const auto& [u, w] : pi) {
            std::vector<Formula> parts;
            for (std::size_t v : reach)
                if (!rel(u, v)) parts.push_back(dist(u, v));
            branches.emplace_back(w, conjoin(parts));
        }
        return simplify(Formula::diam(pts_.action_list()[a], DistFormula::make(std::move(branches))));
    }

    Formula bisim(std::size_t s, std::size_t t)
    {
        std::size_t k = 1;
        while (k < tr_.rounds.size() && tr_.rounds[k][s] == tr_.rounds[k][t]) ++k;
        if (k == tr_.rounds.size()) throw Error(ErrorKind::Input, "states are bisimilar");
        const auto& prev = tr_.rounds[k - 1];
        Related rel = [&prev](std::size_t u, std::size_t v) { return prev[u] == prev[v]; };
        for (std::size_t a = 0; a < pts_.action_list().size(); ++a) {
            const auto &ps = pts_.successors(s, a), &ts = pts_.successors(t, a);
            for (const auto& pi : ps)
                if (std::none_of(ts.begin(), ts.end(), [&](const IndexDist& r) { return lift_check_classes(prev, pi, r); }))
                    return diamond(a, pi, t, rel);
            for (const auto& rho : ts)
                if (std::none_of(ps.begin(), ps.end(), [&](const IndexDist& p) { return lift_check_classes(prev, rho, p); }))
                    return simplify(Formula::neg(diamond(a, rho, s, rel)));
        }
        throw Error(ErrorKind::Input, "no splitting transition found");
    }

    Formula preorder(std::size_t s, std::size_t t)
    {
        std::size_t round = tr_.removed_at[s][t];
        if (round == RefinementTrace::never) throw Error(ErrorKind::Input, "states are related");
        if (round == 0) {
            for (std::size_t a = 0; a < pts_.action_list().size(); ++a)
                if (pts_.successors(s, a).empty() && !pts_.successors(t, a).empty())
                    return Formula::cannot(pts_.action_list()[a]);
            throw Error(ErrorKind::Input, "no refused action found");
        }
        Related rel = [this, round](std::size_t u, std::size_t v) {
            return tr_.removed_at[u][v] == RefinementTrace::never || tr_.removed_at[u][v] >= round;
        };
        Relation prev(pts_.size(), std::vector<char>(pts_.size(), 0));
        for (std::size_t u = 0; u < pts_.size(); ++u)
            for (std::size_t v = 0; v < pts_.size(); ++v) prev[u][v] = rel(u, v);
        for (std::size_t a = 0; a < pts_.action_list().size(); ++a) {
            const auto& ts = pts_.successors(t, a);
            for (const auto& pi : pts_.successors(s, a))
                if (std::none_of(ts.begin(), ts.end(), [&](const IndexDist& r) { return lift_check(prev, pi, r); }))
                    return diamond(a, pi, t, rel);
        }
        throw Error(ErrorKind::Input, "no unmatched transition found");
    }

    Pts& pts_;
    const RefinementTrace& tr_;
    std::map<std::pair<std::size_t, std::size_t>, Formula> memo_;
};

} // namespace

Formula distinguishing_formula(Pts& pts, const RefinementTrace& trace, std::size_t s, std::size_t t)
{
    if (trace.related(s, t)) throw Error(ErrorKind::Input, "states are related; no distinguishing formula exists");
    Distinguisher d(pts, trace);
    Formula f = d.dist(s, t);
    ModelChecker mc(pts);
    if (!mc.sat(pts.state(s), f) || mc.sat(pts.state(t), f))
        throw Error(ErrorKind::Internal, "distinguishing formula failed verification: " + to_string(f));
    return f;
}

} // namespace rforge
