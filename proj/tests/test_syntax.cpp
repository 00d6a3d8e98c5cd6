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

TEST_CASE("printing and parsing round trip")
{
    Gen g(61);
    PtsSpec spec = corpus_spec("coins.pgsos");
    TermContext ctx{&spec.signature(), false};
    const std::vector<std::string> xs{"x", "y", "z"}, mus{"mu", "nu"};
    const std::vector<std::string>& acts = spec.signature().actions();
    for (int i = 0; i < 10000; ++i) {
        Term t = random_open_term(g, spec.signature(), 3, xs);
        CHECK(parse_term(to_string(t), ctx) == t);
        DistTerm d = random_open_dist_term(g, spec.signature(), 2, xs, mus);
        CHECK(parse_dist_term(to_string(d), ctx) == d);
        Formula f = random_formula(g, acts, LogicClass::Full, 3);
        CHECK(parse_formula(to_string(f)) == f);
    }
    for (int i = 0; i < 1000; ++i) {
        PtsSpec s = random_spec(g);
        std::string text = print_spec(s);
        CHECK(print_spec(parse_spec(text)) == text);
    }
    CHECK(print_spec(parse_spec(print_spec(spec))) == print_spec(spec));
}

TEST_CASE("syntax errors point at the offending character")
{
    const std::string text = print_spec(corpus_spec("par_choice.pgsos"));
    Gen g(67);
    for (int i = 0; i < 300; ++i) {
        std::size_t pos = g.below(text.size());
        std::string bad = text.substr(0, pos) + "@" + text.substr(pos);
        try {
            parse_spec(bad);
            FAIL("accepted " << bad);
        } catch (const SyntaxError& e) {
            CHECK(e.span().offset <= pos);
            CHECK(pos < e.span().offset + std::max<std::size_t>(e.span().length, 1));
        }
    }

    try {
        parse_spec("actions a;\nop nil/0;\nx -a-> mu => foo(x) -a-> mu;\n");
        FAIL("accepted an undeclared operator");
    } catch (const SyntaxError& e) {
        CHECK(e.span().line == 3);
        CHECK(e.span().column == 14);
    }
    CHECK_THROWS_AS(parse_dist_formula("oplus{0.5: tt, 0.5: tt}"), SyntaxError);
    CHECK_THROWS_AS(parse_formula("<a> oplus{1/2: tt}"), Error);
}

TEST_CASE("specifications")
{
    PtsSpec ex = corpus_spec("par_choice.pgsos");
    CHECK(ex.rules().size() == 4);
    CHECK_FALSE(ex.is_positive());
    CHECK(corpus_spec("positive.pgsos").is_positive());

    PtsSpec ax = parse_spec("actions a; op nil/0; op one/0; => one -a-> dirac(nil);");
    REQUIRE(ax.rules().size() == 1);
    CHECK(ax.rules()[0].positives().empty());
    CHECK(ax.rules()[0].negatives().empty());

    try {
        parse_spec("actions a;\nop f/1;\nx -a-> mu => f(x) -a-> f(y);\n");
        FAIL("accepted an unbound target variable");
    } catch (const ValidationError& e) {
        CHECK(e.constraint() == "UnboundTargetVar");
        REQUIRE(e.span());
        CHECK(e.span()->line == 3);
    }
}

TEST_CASE("formulas and distribution terms")
{
    CHECK(parse_formula("tt") == Formula::top());
    Formula f = parse_formula("<a> oplus{1/2: <a> tt, 1/2: neg <a> tt}");
    REQUIRE(f.kind() == Formula::Kind::Diam);
    CHECK(f.action() == "a");
    REQUIRE(f.dist().branches().size() == 2);
    CHECK(f.dist().branches()[1].second == Formula::cannot("a"));
    CHECK(parse_formula("bar a") == Formula::cannot("a"));

    PtsSpec spec = corpus_spec("par_choice.pgsos");
    TermContext ctx{&spec.signature(), false};
    DistTerm d = parse_dist_term("2/5*mu + 3/5*(par(nu, up))", ctx);
    CHECK(d == parse_dist_term("2/5*mu + 3/5*par(nu, up)", ctx));
    CHECK(to_string(d) == "2/5*mu + 3/5*par(nu, up)");
    CHECK_THROWS_AS(parse_dist_term("1/2*mu + 1/3*nu", ctx), SyntaxError);
    CHECK_THROWS_AS(parse_dist_term("1/2*mu + nu", ctx), SyntaxError);
}

TEST_CASE("systems, shapes and substitutions")
{
    Pts p = corpus_pts("twins.pts");
    CHECK(p.size() == 6);
    CHECK(p.action_list().size() == 2);
    CHECK(p.complete());
    CHECK(print_pts(parse_pts(print_pts(p))) == print_pts(p));
    CHECK_THROWS_AS(parse_pts("actions a; states s; s -a-> {s: 1/2};"), Error);

    Shapes sh = parse_shapes("mu: 1/4, 3/4; nu: 1/3, 2/3");
    CHECK(sh.at("mu") == std::vector<Rational>{q(1, 4), q(3, 4)});
    CHECK(parse_shapes(print_shapes(sh)) == sh);

    PtsSpec spec = corpus_spec("par_choice.pgsos");
    TermContext ctx{&spec.signature(), false};
    Substitution s = parse_substitution("x = par(nil, nil), mu = {nil: 1/2, par(nil, nil): 1/2}", ctx);
    REQUIRE(s.state("x"));
    CHECK(to_string(*s.state("x")) == "par(nil, nil)");
    REQUIRE(s.dist("mu"));
    CHECK(eval_dist(*s.dist("mu")).weights().size() == 2);

    auto ws = parse_weighted_terms("{nil: 1/10, par(nil, nil): 9/10}", ctx);
    CHECK(ws.size() == 2);
    CHECK_THROWS(parse_weighted_terms("{nil: 1/2, nil: 1/2}", ctx));
}
