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

#include "doctest.h"
#include "support.hpp"

#include <functional>

using namespace rforge;
using namespace rforge::testing;

namespace {

// Hall's condition for the lifting of R: every subset of pi's support needs
// at least as much mass among its R-successors in rho.
bool hall_lift(const Relation& r, const IndexDist& pi, const IndexDist& rho)
{
    const std::size_t n = pi.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Rational need = 0, have = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) need += pi[i].second;
        for (const auto& [t, w] : rho)
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i & 1u) && r[pi[i].first][t]) {
                    have += w;
                    break;
                }
        if (need > have) return false;
    }
    return true;
}

IndexDist random_index_dist(Gen& g, std::size_t states)
{
    std::map<std::size_t, Rational> m;
    for (const auto& w : g.weights(1 + g.below(3), 6)) m[g.below(states)] += w;
    return IndexDist(m.begin(), m.end());
}

// Same block mass for every action's derivative, both directions.
bool is_bisimulation(const Pts& pts, const std::vector<std::size_t>& block)
{
    auto mass = [&](const IndexDist& d) {
        std::map<std::size_t, Rational> m;
        for (const auto& [s, w] : d) m[block[s]] += w;
        return m;
    };
    for (std::size_t s = 0; s < pts.size(); ++s)
        for (std::size_t t = 0; t < pts.size(); ++t) {
            if (block[s] != block[t]) continue;
            for (std::size_t a = 0; a < pts.action_list().size(); ++a) {
                std::set<std::map<std::size_t, Rational>> ms, mt;
                for (const auto& d : pts.successors(s, a)) ms.insert(mass(d));
                for (const auto& d : pts.successors(t, a)) mt.insert(mass(d));
                if (ms != mt) return false;
            }
        }
    return true;
}

// Largest bisimulation by trying every partition of the states.
Relation brute_bisimilarity(const Pts& pts)
{
    const std::size_t n = pts.size();
    Relation r(n, std::vector<char>(n, 0));
    std::vector<std::size_t> block(n, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            if (!is_bisimulation(pts, block)) return;
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = 0; t < n; ++t)
                    if (block[s] == block[t]) r[s][t] = 1;
            return;
        }
        for (std::size_t b = 0; b <= used; ++b) {
            block[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
    return r;
}

std::size_t idx(const Pts& pts, const char* name) { return *pts.find(con(name)); }

} // namespace

TEST_CASE("lifting of a relation")
{
    Relation r{{1, 0}, {0, 1}};
    CHECK(lift_check(r, {{0, q(1)}}, {{0, q(1)}}));
    CHECK_FALSE(lift_check(r, {{0, q(1)}}, {{1, q(1)}}));
    Relation four(4, std::vector<char>(4, 0));
    four[0][2] = four[1][3] = 1;
    IndexDist pi{{0, q(1, 2)}, {1, q(1, 2)}}, rho{{2, q(1, 2)}, {3, q(1, 2)}};
    CHECK(lift_check(four, pi, rho));
    four[1][3] = 0;
    CHECK_FALSE(lift_check(four, pi, rho));
}

TEST_CASE("lifting agrees with Hall's condition")
{
    Gen g(31);
    for (int i = 0; i < 2000; ++i) {
        const std::size_t n = 2 + g.below(4);
        Relation r(n, std::vector<char>(n, 0));
        for (auto& row : r)
            for (auto& c : row) c = g.chance(1, 2);
        IndexDist pi = random_index_dist(g, n), rho = random_index_dist(g, n);
        CHECK(lift_check(r, pi, rho) == hall_lift(r, pi, rho));
    }
}

TEST_CASE("bisimilarity on small systems")
{
    Pts one = parse_pts("actions a; states s; s -a-> {s: 1};");
    CHECK(bisimilarity(one).related(0, 0));

    Pts loops = parse_pts("actions a; states c1, c2; c1 -a-> {c1: 1}; c2 -a-> {c2: 1};");
    CHECK(bisimilarity(loops).related(0, 1));

    Pts same = parse_pts("actions a; states s, s2, u, v; s -a-> {u: 1/2, v: 1/2}; s2 -a-> {u: 1};");
    CHECK(bisimilarity(same).related(idx(same, "s"), idx(same, "s2")));
    Pts differ = parse_pts("actions a; states s, s2, u, v; s -a-> {u: 1/2, v: 1/2}; s2 -a-> {u: 1}; u -a-> {u: 1};");
    CHECK_FALSE(bisimilarity(differ).related(idx(differ, "s"), idx(differ, "s2")));

    Pts twins = corpus_pts("twins.pts");
    RefinementTrace tr = bisimilarity(twins);
    CHECK(tr.related(idx(twins, "s"), idx(twins, "t")));
    CHECK_FALSE(tr.related(idx(twins, "s"), idx(twins, "u")));
    CHECK(tr.rounds.size() >= 2);
}

TEST_CASE("bisimilarity agrees with exhaustive partition search")
{
    Gen g(41);
    for (int i = 0; i < 300; ++i) {
        Pts pts = random_pts(g, 5, 2);
        CHECK(bisimilarity(pts).relation == brute_bisimilarity(pts));
    }
}

TEST_CASE("preorders")
{
    Pts twins = corpus_pts("twins.pts");
    std::size_t s = idx(twins, "s"), u = idx(twins, "u");
    RefinementTrace sim = similarity(twins), rs = ready_similarity(twins);
    CHECK(sim.related(s, u));
    CHECK_FALSE(sim.related(u, s));
    // s cannot do b while u can: ready simulation rules the pair out.
    CHECK_FALSE(rs.related(s, u));

    Gen g(43);
    for (int i = 0; i < 300; ++i) {
        Pts pts = random_pts(g, 7, 2);
        RefinementTrace b = bisimilarity(pts), r = ready_similarity(pts), m = similarity(pts);
        const std::size_t n = pts.size();
        for (std::size_t x = 0; x < n; ++x) {
            CHECK(m.related(x, x));
            for (std::size_t y = 0; y < n; ++y) {
                if (b.related(x, y)) CHECK(r.related(x, y));
                if (r.related(x, y)) CHECK(m.related(x, y));
                for (std::size_t z = 0; z < n; ++z) {
                    if (m.related(x, y) && m.related(y, z)) CHECK(m.related(x, z));
                    if (r.related(x, y) && r.related(y, z)) CHECK(r.related(x, z));
                }
            }
        }
    }
}

TEST_CASE("distinguishing formulas")
{
    Pts p = parse_pts("actions a; states s, t, dead; t -a-> {dead: 1};");
    RefinementTrace rs = ready_similarity(p);
    std::size_t s = idx(p, "s"), t = idx(p, "t");
    REQUIRE_FALSE(rs.related(s, t));
    Formula f = distinguishing_formula(p, rs, s, t);
    ModelChecker mc(p);
    CHECK(in_class(f, LogicClass::Ready));
    CHECK(mc.sat(p.state(s), f));
    CHECK_FALSE(mc.sat(p.state(t), f));

    // Only a nested formula tells s and t apart.
    Pts n = parse_pts("actions a; states s, t, u, v, dead; s -a-> {u: 1/2, v: 1/2}; t -a-> {u: 1}; u -a-> {dead: 1};");
    RefinementTrace b = bisimilarity(n);
    std::size_t ns = idx(n, "s"), nt = idx(n, "t");
    REQUIRE_FALSE(b.related(ns, nt));
    Formula g = distinguishing_formula(n, b, ns, nt);
    ModelChecker mn(n);
    CHECK(mn.sat(n.state(ns), g));
    CHECK_FALSE(mn.sat(n.state(nt), g));
    CHECK(modal_depth(g) == 2);
    Formula h = distinguishing_formula(n, b, nt, ns);
    CHECK(mn.sat(n.state(nt), h));
    CHECK_FALSE(mn.sat(n.state(ns), h));

    Gen r(47);
    for (int i = 0; i < 200; ++i) {
        Pts pts = random_pts(r, 6, 2);
        ModelChecker m(pts);
        for (RelationKind kind : {RelationKind::Bisimilarity, RelationKind::ReadySimilarity, RelationKind::Similarity}) {
            RefinementTrace tr = compute_relation(pts, kind);
            LogicClass cls = kind == RelationKind::Bisimilarity     ? LogicClass::Full
                             : kind == RelationKind::ReadySimilarity ? LogicClass::Ready
                                                                     : LogicClass::Positive;
            for (std::size_t x = 0; x < pts.size(); ++x)
                for (std::size_t y = 0; y < pts.size(); ++y) {
                    if (tr.related(x, y)) continue;
                    Formula f2 = distinguishing_formula(pts, tr, x, y);
                    CHECK(in_class(f2, cls));
                    CHECK(m.sat(pts.state(x), f2));
                    CHECK_FALSE(m.sat(pts.state(y), f2));
                }
        }
    }
}

TEST_CASE("partially explored systems are rejected")
{
    Pts p;
    p.add_action("a");
    p.add_state(con("s"));
    CHECK_THROWS_AS(bisimilarity(p), Error);
}
