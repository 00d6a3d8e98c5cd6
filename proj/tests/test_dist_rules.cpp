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

const Op par = Op::make("par", {}, 2);

DistRule par_rule()
{
    return lift_rule(par, {{dvar("mu"), {{q(1, 4), "x1"}, {q(3, 4), "x2"}}}, {dvar("nu"), {{q(1, 3), "y1"}, {q(2, 3), "y2"}}}});
}

Term p(Term a, Term b) { return Term::app(par, {a, b}); }

} // namespace

TEST_CASE("distribution over terms invariants")
{
    CHECK_THROWS_AS(DistOverTerms::make(dvar("mu"), {{q(1, 2), var("x")}, {q(1, 3), var("y")}}), ValidationError);
    CHECK_THROWS_AS(DistOverTerms::make(dvar("mu"), {{q(1, 2), var("x")}, {q(1, 2), var("x")}}), ValidationError);
    CHECK_THROWS_AS(DistOverTerms::make(dvar("mu"), {{q(0), var("x")}, {q(1), var("y")}}), ValidationError);
    CHECK_NOTHROW(DistOverTerms::make(dvar("mu"), {{q(1, 2), var("x")}, {q(1, 2), var("y")}}));
}

TEST_CASE("rule schemata")
{
    DistRule ax = dirac_axiom("x");
    CHECK(ax.kind == DistRuleKind::Axiom);
    CHECK(ax.premises.empty());
    CHECK(ax.conclusion.source == DistTerm::dirac(var("x")));
    CHECK(ax.conclusion.as_distribution() == dist({{q(1), var("x")}}));

    DistRule r = par_rule();
    CHECK(r.conclusion.source == DistTerm::lift(par, {dvar("mu"), dvar("nu")}));
    CHECK(r.conclusion.as_distribution() == dist({{q(1, 12), p(var("x1"), var("y1"))},
                                                  {q(1, 6), p(var("x1"), var("y2"))},
                                                  {q(1, 4), p(var("x2"), var("y1"))},
                                                  {q(1, 2), p(var("x2"), var("y2"))}}));

    DistRule c = convex_rule({q(2, 5), q(3, 5)}, {{dvar("mu"), {{q(1), "x"}}}, {dvar("nu"), {{q(1), "y"}}}});
    CHECK(c.conclusion.as_distribution() == dist({{q(2, 5), var("x")}, {q(3, 5), var("y")}}));

    CHECK_NOTHROW(lift_rule(par, {{dvar("mu"), {{q(1), "x"}}}, {dvar("nu"), {{q(1), "x"}}}}));
    CHECK_THROWS_AS(lift_rule(par, {{dvar("mu"), {{q(1, 2), "x"}, {q(1, 2), "x"}}}, {dvar("nu"), {{q(1), "y"}}}}),
                    ValidationError);
    CHECK_THROWS_AS(convex_rule({q(1, 2), q(1, 3)}, {{dvar("mu"), {{q(1), "x"}}}, {dvar("nu"), {{q(1), "y"}}}}),
                    ValidationError);
}

TEST_CASE("reduction")
{
    DistRule r = par_rule();
    CHECK(reduce_rule(Substitution{}, r).conclusion == r.conclusion);

    Substitution ren;
    ren.bind_state("x1", var("a1"));
    ren.bind_state("x2", var("a2"));
    DistOverTerms l = reduce(ren, r.premises[0]);
    CHECK(l.as_distribution() == dist({{q(1, 4), var("a1")}, {q(3, 4), var("a2")}}));

    Term nil = con("nil");
    Substitution s;
    s.bind_state("x1", var("x"));
    s.bind_state("x2", var("x"));
    s.bind_state("y1", var("y"));
    s.bind_state("y2", nil);
    CHECK(reduce(s, r.premises[0]).as_distribution() == dist({{q(1), var("x")}}));
    CHECK(reduce(s, r.premises[1]).as_distribution() == dist({{q(1, 3), var("y")}, {q(2, 3), nil}}));
    DistRule red = reduce_rule(s, r);
    CHECK(red.conclusion.as_distribution() == dist({{q(1, 3), p(var("x"), var("y"))}, {q(2, 3), p(var("x"), nil)}}));

    DistRule c = convex_rule({q(1, 3), q(2, 3)},
                             {{dvar("mu"), {{q(1, 2), "x1"}, {q(1, 2), "x2"}}}, {dvar("nu"), {{q(1), "y1"}}}});
    Substitution all;
    for (const char* v : {"x1", "x2", "y1"}) all.bind_state(v, nil);
    DistRule merged = reduce_rule(all, c);
    CHECK(merged.conclusion.branches.size() == 1);
    CHECK(merged.conclusion.branches[0].first == 1);
}

TEST_CASE("proofs")
{
    Term t = con("t");
    ProofOutcome one = prove_dist(DistOverTerms::make(DistTerm::dirac(t), {{q(1), t}}));
    REQUIRE(one.provable);
    CHECK(one.proof->size() == 1);
    CHECK(one.proof->rule.kind == DistRuleKind::Axiom);

    Term t1 = con("t1"), t2 = con("t2"), t3 = con("t3"), t4 = con("t4"), t5 = con("t5");
    DistTerm theta = DistTerm::convex(
        {{q(2, 5), DistTerm::convex({{q(1, 4), DistTerm::dirac(t1)}, {q(3, 4), DistTerm::dirac(t2)}})},
         {q(3, 5),
          DistTerm::lift(par, {DistTerm::convex({{q(1, 3), DistTerm::dirac(t3)}, {q(2, 3), DistTerm::dirac(t4)}}),
                               DistTerm::dirac(t5)})}});
    auto bs = std::vector<std::pair<Rational, Term>>{{q(1, 10), t1}, {q(3, 10), t2}, {q(1, 5), p(t3, t5)}, {q(2, 5), p(t4, t5)}};
    ProofOutcome ok = prove_dist(DistOverTerms::make(theta, bs));
    REQUIRE(ok.provable);
    CHECK(check_proof(*ok.proof));
    CHECK(ok.proof->size() == 9);

    bs[0].first = q(1, 5);
    bs[1].first = q(1, 5);
    ProofOutcome bad = prove_dist(DistOverTerms::make(theta, bs));
    CHECK_FALSE(bad.provable);
    CHECK(bad.semantics == eval_dist(theta));
    CHECK_FALSE(bad.reason.empty());
}

TEST_CASE("tampered proofs are rejected")
{
    DistTerm theta = DistTerm::convex({{q(1, 2), DistTerm::dirac(con("a"))}, {q(1, 2), DistTerm::dirac(con("b"))}});
    ProofNode pr = proof_of(theta);
    REQUIRE(check_proof(pr));
    ProofNode bad = pr;
    bad.children.pop_back();
    CHECK_FALSE(check_proof(bad));
    ProofNode swapped = pr;
    std::swap(swapped.children[0], swapped.children[1]);
    CHECK_FALSE(check_proof(swapped));
}

TEST_CASE("distribution ruloids")
{
    DistRuloid ax = build_dist_ruloid(DistTerm::dirac(var("x")), {});
    REQUIRE(ax.premises.size() == 1);
    CHECK(ax.premises[0].source == DistTerm::dirac(var("x")));
    CHECK(ax.conclusion.as_distribution() == dist({{q(1), var("x")}}));

    DistRuloid id = build_dist_ruloid(dvar("mu"), {{"mu", {q(1)}}});
    REQUIRE(id.premises.size() == 1);
    CHECK(id.conclusion.branches.size() == 1);
    CHECK(id.conclusion.branches[0].first == 1);
    CHECK(id.conclusion.branches[0].second == id.premises[0].branches[0].second);

    DistTerm theta =
        DistTerm::convex({{q(2, 5), dvar("mu")}, {q(3, 5), DistTerm::lift(par, {dvar("nu"), dvar("up")})}});
    DistRuloid r = build_dist_ruloid(theta, {{"mu", {q(1, 4), q(3, 4)}}, {"nu", {q(1, 3), q(2, 3)}}, {"up", {q(1)}}});
    CHECK_FALSE(check_invariants(r));
    std::map<std::string, std::vector<Term>> targets;
    for (const auto& pm : r.premises)
        for (const auto& [w, x] : pm.branches) targets[pm.source.name()].push_back(x);
    Term x1 = targets["mu"][0], x2 = targets["mu"][1], y1 = targets["nu"][0], y2 = targets["nu"][1], z = targets["up"][0];
    CHECK(r.conclusion.as_distribution() ==
          dist({{q(1, 10), x1}, {q(3, 10), x2}, {q(1, 5), p(y1, z)}, {q(2, 5), p(y2, z)}}));
}

TEST_CASE("witness for a Dirac term keeps the substitution")
{
    Substitution s;
    s.bind_state("x", con("c"));
    DistRuloidWitness w = dist_ruloid_witness(DistTerm::dirac(var("x")), s);
    REQUIRE(w.ruloid.premises.size() == 1);
    CHECK(w.ruloid.premises[0].source == DistTerm::dirac(var("x")));
    REQUIRE(w.sigma.state("x"));
    CHECK(*w.sigma.state("x") == con("c"));
    CHECK(w.reduced_conclusion.as_distribution() == dist({{q(1), con("c")}}));
}

TEST_CASE("witness conclusions match the semantics on random instances")
{
    PtsSpec spec = corpus_spec("coins.pgsos");
    const Signature& sig = spec.signature();
    Gen g(5);
    for (int i = 0; i < 300; ++i) {
        DistTerm theta = random_open_dist_term(g, sig, 1 + static_cast<unsigned>(g.below(3)), {"x", "y"}, {"mu", "nu"});
        Substitution s;
        VarSet vs = vars(theta);
        for (const auto& x : vs.state) s.bind_state(x, random_closed_term(g, sig, 1));
        for (const auto& m : vs.dist) s.bind_dist(m, random_distribution(g, sig, 3, 6).to_dist_term());
        INFO(to_string(theta));
        DistRuloidWitness w = dist_ruloid_witness(theta, s);
        CHECK_FALSE(check_invariants(w.ruloid));
        CHECK(premises_provable(w.ruloid, w.sigma));
        CHECK(w.reduced_conclusion.as_distribution() == eval_dist(apply(s, theta)));
        CHECK(provable(w.reduced_conclusion));
    }
}

TEST_CASE("bounded shapes")
{
    auto sh = bounded_shapes(2, 4);
    // (1), (1/2,1/2), (2/3,1/3), (3/4,1/4)
    CHECK(sh.size() == 4);
    for (const auto& s : sh) {
        Rational m = 0;
        for (const auto& w : s) {
            CHECK(w > 0);
            CHECK(w.get_den() <= 4);
            m += w;
        }
        CHECK(m == 1);
        CHECK(std::is_sorted(s.rbegin(), s.rend()));
    }
    CHECK(bounded_shapes(1, 6).size() == 1);
}
