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

const char* leaves = "op s/0; op u/0;\n"
                     "=> s -a-> dirac(s);\n";

Term example_term(const PtsSpec& spec) { return parse_term("pchoice[2/5](x, par(y, z))", {&spec.signature(), false}); }

// Structural conditions every ruloid must meet.
void check_shape(const LiteralRule& r, Term t, const std::string& a)
{
    VarSet tv = vars(t);
    CHECK(r.conclusion.source == t);
    CHECK(r.conclusion.action == a);
    std::set<std::string> rhs;
    for (const auto& p : r.premises) {
        REQUIRE(p.source.is_var());
        CHECK(tv.state.count(p.source.name()));
        if (p.positive()) {
            REQUIRE(p.target.kind() == DistTerm::Kind::Var);
            CHECK(rhs.insert(p.target.name()).second);
        }
    }
    VarSet target = vars(r.conclusion.target);
    for (const auto& x : target.state) CHECK(tv.state.count(x));
    for (const auto& m : target.dist) CHECK(rhs.count(m));
}

} // namespace

TEST_CASE("the four ruloids of the example term")
{
    PtsSpec spec = corpus_spec("par_choice.pgsos");
    Term t = example_term(spec);
    auto rs = derive_ruloids(spec, t, "a");
    REQUIRE(rs.size() == 4);
    std::size_t negative = 0;
    for (const auto& r : rs) {
        check_shape(r, t, "a");
        if (!r.is_positive()) ++negative;
    }
    CHECK(negative == 3);
    CHECK_FALSE(rs[0] == rs[1]);
}

TEST_CASE("a variable has the single identity ruloid")
{
    PtsSpec spec = corpus_spec("par_choice.pgsos");
    auto rs = derive_ruloids(spec, var("x"), "a");
    REQUIRE(rs.size() == 1);
    REQUIRE(rs[0].premises.size() == 1);
    CHECK(rs[0].premises[0].source == var("x"));
    CHECK(rs[0].premises[0].target == rs[0].conclusion.target);
    CHECK(rs[0].conclusion.target.kind() == DistTerm::Kind::Var);
}

TEST_CASE("contradictory premise sets are pruned unless requested")
{
    // x must move and not move in the same ruloid of pchoice(x, x).
    PtsSpec spec = corpus_spec("par_choice.pgsos");
    Term t = parse_term("pchoice[2/5](x, x)", {&spec.signature(), false});
    auto pruned = derive_ruloids(spec, t, "a");
    auto kept = derive_ruloids(spec, t, "a", RuloidOptions{false, 200000});
    CHECK(pruned.size() == 1);
    // The two contradictory rule instances coincide up to renaming.
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].contradictory() != kept[1].contradictory());
    for (const auto& r : pruned) CHECK_FALSE(r.contradictory());
}

TEST_CASE("positive specifications yield positive ruloids")
{
    Gen g(9);
    SpecShape shape;
    shape.negative = false;
    for (int i = 0; i < 100; ++i) {
        PtsSpec spec = random_spec(g, shape);
        REQUIRE(spec.is_positive());
        Term t = random_open_term(g, spec.signature(), 3, {"x", "y"});
        for (const auto& a : spec.signature().actions())
            for (const auto& r : derive_ruloids(spec, t, a)) {
                CHECK(r.is_positive());
                check_shape(r, t, a);
            }
    }
}

TEST_CASE("ruloids of random specifications are well formed")
{
    Gen g(21);
    for (int i = 0; i < 100; ++i) {
        PtsSpec spec = random_spec(g);
        Term t = random_open_term(g, spec.signature(), 3, {"x", "y", "z"});
        for (const auto& a : spec.signature().actions()) {
            auto rs = derive_ruloids(spec, t, a);
            for (const auto& r : rs) check_shape(r, t, a);
            for (std::size_t k = 1; k < rs.size(); ++k) CHECK(rs[k - 1] < rs[k]);
        }
    }
}

TEST_CASE("ruloid witnesses")
{
    PtsSpec spec = leaves_spec(leaves);
    Term t = example_term(spec);
    RuloidEngine engine(spec);
    Semantics sem(spec);

    Substitution s;
    s.bind_state("x", con("s"));
    s.bind_state("y", con("u"));
    s.bind_state("z", con("u"));
    auto w = ruloid_witness(engine, sem, t, s, "a", dist({{q(1), con("s")}}));
    REQUIRE(w);
    // x moves and one of y, z is blocked.
    LiteralRule first{{Literal::pos(var("x"), "a", dvar("m")), Literal::neg(var("y"), "a")},
                      Literal::pos(t, "a", dvar("m"))};
    LiteralRule second{{Literal::pos(var("x"), "a", dvar("m")), Literal::neg(var("z"), "a")},
                       Literal::pos(t, "a", dvar("m"))};
    CHECK((alpha_equivalent(w->ruloid, first) || alpha_equivalent(w->ruloid, second)));
    CHECK(eval_dist(apply(w->sigma, w->ruloid.conclusion.target)) == dist({{q(1), con("s")}}));
    int satisfied = 0;
    for_each_instance(engine, sem, t, s, "a", [&](const LiteralRule& r, const Substitution&, const Distribution& d) {
        CHECK(d == dist({{q(1), con("s")}}));
        CHECK((alpha_equivalent(r, first) || alpha_equivalent(r, second)));
        ++satisfied;
        return true;
    });
    CHECK(satisfied == 2);

    auto idw = ruloid_witness(engine, sem, var("x"), s, "a", dist({{q(1), con("s")}}));
    REQUIRE(idw);
    const DistTerm* mu = idw->sigma.dist(idw->ruloid.premises[0].target.name());
    REQUIRE(mu);
    CHECK(eval_dist(*mu) == dist({{q(1), con("s")}}));

    Substitution none;
    none.bind_state("x", con("u"));
    none.bind_state("y", con("u"));
    none.bind_state("z", con("s"));
    CHECK(sem.derivatives(apply(none, t), "a").empty());
    CHECK_FALSE(ruloid_witness(engine, sem, t, none, "a", dist({{q(1), con("s")}})));
    int any = 0;
    for_each_instance(engine, sem, t, none, "a", [&](const LiteralRule&, const Substitution&, const Distribution&) {
        ++any;
        return true;
    });
    CHECK(any == 0);
}
