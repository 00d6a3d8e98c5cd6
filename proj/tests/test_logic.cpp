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

using namespace rforge;
using namespace rforge::testing;

namespace {

Formula F(const char* text) { return parse_formula(text); }

std::set<LogicClass> classes(Formula f)
{
    std::set<LogicClass> out;
    for (LogicClass c : {LogicClass::Full, LogicClass::Ready, LogicClass::Positive})
        if (in_class(f, c)) out.insert(c);
    return out;
}

// Feasibility of a split by Hall's condition: every set of branches must be
// covered by at least its weight of states satisfying one of them.
bool hall_sat(ModelChecker& mc, const Distribution& pi, DistFormula d)
{
    const auto& bs = d.branches();
    const std::size_t n = bs.size();
    std::vector<std::pair<Term, Rational>> support(pi.weights().begin(), pi.weights().end());
    std::vector<std::vector<char>> sat(n, std::vector<char>(support.size()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = 0; s < support.size(); ++s) sat[i][s] = mc.sat(support[s].first, bs[i].second);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Rational need = 0, have = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) need += bs[i].first;
        for (std::size_t s = 0; s < support.size(); ++s)
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i & 1u) && sat[i][s]) {
                    have += support[s].second;
                    break;
                }
        if (need > have) return false;
    }
    return true;
}

} // namespace

TEST_CASE("classification")
{
    using C = LogicClass;
    CHECK(classes(F("tt")) == std::set<C>{C::Full, C::Ready, C::Positive});
    CHECK(classes(F("and{bar a, <b> tt}")) == std::set<C>{C::Full, C::Ready});
    CHECK(classes(F("neg and{<a> tt, <b> tt}")) == std::set<C>{C::Full});
    CHECK(classes(F("<a> oplus{1/2: <a> tt, 1/2: neg <a> tt}")) == std::set<C>{C::Full, C::Ready});
    CHECK(classes(F("<a> oplus{1/2: <a> tt, 1/2: tt}")) == std::set<C>{C::Full, C::Ready, C::Positive});
    CHECK(classify(F("and{bar a, <b> tt}")) == C::Ready);
    CHECK(modal_depth(F("<a> oplus{1/2: <a> tt, 1/2: neg <a> tt}")) == 2);
    CHECK(F("bar a").is_cannot());
    CHECK(F("neg <a> tt") == Formula::cannot("a"));
}

TEST_CASE("formula constructors")
{
    CHECK(Formula::conj({}) == Formula::top());
    CHECK(Formula::conj({Formula::can("a")}) == Formula::can("a"));
    CHECK(Formula::conj({Formula::can("a"), Formula::can("b")}) == Formula::conj({Formula::can("b"), Formula::can("a")}));
    CHECK_THROWS_AS(DistFormula::make({{q(1, 2), Formula::top()}, {q(1, 3), Formula::top()}}), ValidationError);
    CHECK_THROWS_AS(DistFormula::make({}), ValidationError);
}

TEST_CASE("simplification")
{
    CHECK(simplify(F("and{tt, <a> tt}")) == F("<a> tt"));
    CHECK(simplify(F("neg neg <a> tt")) == F("<a> tt"));
    CHECK(simplify(F("and{<a> tt, and{<b> tt, tt}}")) == F("and{<a> tt, <b> tt}"));
    CHECK(simplify(parse_dist_formula("oplus{1/4: <a> tt, 1/2: bar a, 1/4: <a> tt}")) ==
          simplify(parse_dist_formula("oplus{1/2: <a> tt, 1/2: bar a}")));
    CHECK(simplify(F("<a> oplus{1/2: tt, 1/2: tt}")) == F("<a> tt"));
}

TEST_CASE("satisfaction on a two-state system")
{
    Pts pts = parse_pts("actions a; states s, u; s -a-> {s: 1/2, u: 1/2};");
    ModelChecker mc(pts);
    Term s = con("s"), u = con("u");
    CHECK(mc.sat(s, F("tt")));
    CHECK(mc.sat(u, F("bar a")));
    CHECK_FALSE(mc.sat(s, F("bar a")));
    CHECK(mc.sat(s, F("<a> oplus{1/2: <a> tt, 1/2: bar a}")));
    CHECK_FALSE(mc.sat(s, F("<a> oplus{2/3: <a> tt, 1/3: bar a}")));
    CHECK(mc.sat(s, F("neg <a> oplus{2/3: <a> tt, 1/3: bar a}")));
    CHECK(mc.sat(dist({{q(1), s}}), DistFormula::unit(F("<a> tt"))) == mc.sat(s, F("<a> tt")));
    CHECK_FALSE(mc.sat(dist({{q(1), u}}), parse_dist_formula("oplus{1/2: <a> tt, 1/2: tt}")));
}

TEST_CASE("distribution satisfaction uses the expected split")
{
    Op par = Op::make("par", {}, 2);
    Term t1 = con("t1"), t2 = con("t2");
    Term p35 = Term::app(par, {con("t3"), con("t5")}), p45 = Term::app(par, {con("t4"), con("t5")});
    Pts pts;
    std::size_t a = pts.add_action("a");
    std::size_t dead = pts.add_state(con("dead"));
    for (Term t : {t1, t2, p35, p45}) pts.add_state(t);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Term t = pts.state(i);
        bool moves = t == t1 || t == p45;
        pts.set_successors(i, a, moves ? std::vector<IndexDist>{{{dead, q(1)}}} : std::vector<IndexDist>{});
    }
    ModelChecker mc(pts);
    Distribution pi = dist({{q(1, 10), t1}, {q(3, 10), t2}, {q(1, 5), p35}, {q(2, 5), p45}});
    DistFormula psi = parse_dist_formula("oplus{1/2: <a> tt, 1/2: neg <a> tt}");
    REQUIRE(mc.sat(pi, psi));
    auto w = mc.split(pi, psi);
    REQUIRE(w);
    std::vector<Term> rows;
    for (const auto& [t, x] : pi.weights()) rows.push_back(t);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        bool moves = rows[r] == t1 || rows[r] == p45;
        CHECK((*w)[r][moves ? 0 : 1] == pi(rows[r]));
        CHECK((*w)[r][moves ? 1 : 0] == 0);
    }
    CHECK_FALSE(mc.sat(pi, parse_dist_formula("oplus{3/5: <a> tt, 2/5: neg <a> tt}")));
}

TEST_CASE("distribution satisfaction agrees with Hall's condition")
{
    Gen g(17);
    for (int i = 0; i < 300; ++i) {
        Pts pts = random_pts(g, 6, 2);
        ModelChecker mc(pts);
        for (int k = 0; k < 5; ++k) {
            Distribution pi;
            auto ws = g.weights(1 + g.below(std::min<std::size_t>(3, pts.size())), 6);
            for (const auto& w : ws) pi.add(pts.state(g.below(pts.size())), w);
            std::vector<std::pair<Rational, Formula>> bs;
            auto rs = g.weights(1 + g.below(3), 6);
            for (const auto& r : rs) bs.emplace_back(r, random_formula(g, pts.action_list(), LogicClass::Full, 2));
            DistFormula d = DistFormula::make(bs);
            INFO(to_string(d));
            CHECK(mc.sat(pi, d) == hall_sat(mc, pi, d));
            auto split = mc.split(pi, d);
            CHECK(split.has_value() == mc.sat(pi, d));
            if (split) {
                std::vector<Term> rows;
                for (const auto& [t, x] : pi.weights()) rows.push_back(t);
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    Rational sum = 0;
                    for (std::size_t c = 0; c < bs.size(); ++c) {
                        sum += (*split)[r][c];
                        if ((*split)[r][c] > 0) CHECK(mc.sat(rows[r], bs[c].second));
                    }
                    CHECK(sum == pi(rows[r]));
                }
            }
        }
    }
}

TEST_CASE("simplification preserves satisfaction")
{
    Gen g(23);
    for (int i = 0; i < 200; ++i) {
        Pts pts = random_pts(g, 6, 2);
        ModelChecker mc(pts);
        Formula f = random_formula(g, pts.action_list(), LogicClass::Full, 3);
        Formula s = simplify(f);
        CHECK(simplify(s) == s);
        for (Term t : pts.states()) CHECK(mc.sat(t, f) == mc.sat(t, s));
        for (LogicClass c : {LogicClass::Ready, LogicClass::Positive})
            if (in_class(f, c)) CHECK(in_class(s, c));
    }
}
