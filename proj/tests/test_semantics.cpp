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

const char* leaves = "op s/0; op u/0; op coin/0;\n"
                     "=> s -a-> dirac(s);\n"
                     "=> coin -a-> 1/2*dirac(s) + 1/2*dirac(u);\n";

// Transitions for action a written out by hand for the leaves above.
std::set<Distribution> oracle(Term t)
{
    const std::string& f = t.op().name();
    if (f == "s") return {dist({{q(1), t}})};
    if (f == "coin") return {dist({{q(1, 2), con("s")}, {q(1, 2), con("u")}})};
    if (f == "u" || f == "nil") return {};
    auto l = oracle(t.args()[0]), r = oracle(t.args()[1]);
    std::set<Distribution> out;
    if (f == "par") {
        for (const auto& p : l)
            for (const auto& o : r) {
                Distribution d;
                for (const auto& [a, wa] : p.weights())
                    for (const auto& [b, wb] : o.weights()) d.add(Term::app(t.op(), {a, b}), wa * wb);
                out.insert(d);
            }
        return out;
    }
    if (!l.empty() && r.empty()) return l;
    if (l.empty() && !r.empty()) return r;
    for (const auto& p : l)
        for (const auto& o : r) {
            Distribution d;
            for (const auto& [a, w] : p.weights()) d.add(a, q(2, 5) * w);
            for (const auto& [b, w] : o.weights()) d.add(b, q(3, 5) * w);
            out.insert(d);
        }
    return out;
}

} // namespace

TEST_CASE("eval_dist")
{
    Op par = Op::make("par", {}, 2);
    Term t1 = con("t1"), t2 = con("t2"), t3 = con("t3"), t4 = con("t4"), t5 = con("t5");
    CHECK(eval_dist(DistTerm::dirac(t1)) == dist({{q(1), t1}}));
    DistTerm inner = DistTerm::lift(
        par, {DistTerm::convex({{q(1, 3), DistTerm::dirac(t3)}, {q(2, 3), DistTerm::dirac(t4)}}), DistTerm::dirac(t5)});
    CHECK(eval_dist(inner) ==
          dist({{q(1, 3), Term::app(par, {t3, t5})}, {q(2, 3), Term::app(par, {t4, t5})}}));
    DistTerm theta = DistTerm::convex(
        {{q(2, 5), DistTerm::convex({{q(1, 4), DistTerm::dirac(t1)}, {q(3, 4), DistTerm::dirac(t2)}})}, {q(3, 5), inner}});
    CHECK(eval_dist(theta) == dist({{q(1, 10), t1},
                                    {q(3, 10), t2},
                                    {q(1, 5), Term::app(par, {t3, t5})},
                                    {q(2, 5), Term::app(par, {t4, t5})}}));
    CHECK_THROWS_AS(eval_dist(dvar("mu")), Error);
}

TEST_CASE("derived transitions of the example operators")
{
    PtsSpec spec = leaves_spec(leaves);
    Semantics sem(spec);
    TermContext ctx{&spec.signature(), false};
    CHECK(sem.derivatives(con("nil"), "a").empty());
    CHECK(sem.derivatives(con("nil"), "b").empty());
    CHECK(sem.transitions(con("nil")).empty());

    Term su = parse_term("pchoice[2/5](s, u)", ctx);
    REQUIRE(sem.derivatives(su, "a").size() == 1);
    CHECK(sem.derivatives(su, "a")[0] == dist({{q(1), con("s")}}));
    CHECK(sem.derivatives(parse_term("par(s, u)", ctx), "a").empty());
    CHECK(sem.derivatives(parse_term("pchoice[2/5](s, coin)", ctx), "a")[0] ==
          dist({{q(2, 5) + q(3, 10), con("s")}, {q(3, 10), con("u")}}));
}

TEST_CASE("derived transitions agree with a hand-written interpreter")
{
    PtsSpec spec = leaves_spec(leaves);
    Semantics sem(spec);
    Gen g(11);
    for (int i = 0; i < 400; ++i) {
        Term t = random_closed_term(g, spec.signature(), 1 + static_cast<unsigned>(g.below(3)));
        const auto& d = sem.derivatives(t, "a");
        std::set<Distribution> got(d.begin(), d.end());
        INFO(to_string(t));
        CHECK(got == oracle(t));
        CHECK(d.size() == got.size());
        for (const auto& x : d) CHECK(x.mass() == 1);
    }
}

TEST_CASE("explore_pts")
{
    PtsSpec nil_only = parse_spec("actions a; op nil/0;");
    Semantics s0(nil_only);
    Exploration e0 = explore_pts(s0, {con("nil")}, 10);
    CHECK(e0.pts.size() == 1);
    CHECK(e0.pts.transition_count() == 0);
    CHECK(e0.pts.complete());
    CHECK_FALSE(e0.truncated);

    PtsSpec loop = parse_spec("actions a; op c/0; => c -a-> dirac(c);");
    Semantics s1(loop);
    Exploration e1 = explore_pts(s1, {con("c")}, 10);
    CHECK(e1.pts.size() == 1);
    CHECK(e1.pts.transition_count() == 1);
    CHECK_FALSE(e1.truncated);

    PtsSpec spawn = parse_spec("actions a; op c/0; op g/1;\n"
                               "=> c -a-> dirac(g(c));\n"
                               "x -a-> mu => g(x) -a-> g(mu);");
    Semantics s2(spawn);
    Exploration e2 = explore_pts(s2, {con("c")}, 10);
    CHECK(e2.truncated);
    CHECK(e2.pts.size() <= 10);
    CHECK_FALSE(e2.pts.complete());
    bool unexplored = false;
    for (std::size_t i = 0; i < e2.pts.size(); ++i)
        if (!e2.pts.explored(i, *e2.pts.action_index("a"))) unexplored = true;
    CHECK(unexplored);
}

TEST_CASE("every derived distribution sums to one")
{
    PtsSpec spec = corpus_spec("coins.pgsos");
    Semantics sem(spec);
    Exploration ex = explore_pts(sem, {parse_term("par(die, coin)", {&spec.signature(), false}),
                                       parse_term("pchoice[2/5](die, stop)", {&spec.signature(), false})},
                                 200);
    CHECK_FALSE(ex.truncated);
    for (std::size_t s = 0; s < ex.pts.size(); ++s)
        for (std::size_t a = 0; a < ex.pts.action_list().size(); ++a)
            for (const auto& d : ex.pts.successors(s, a)) {
                Rational m = 0;
                for (const auto& [i, w] : d) m += w;
                CHECK(m == 1);
            }
}
