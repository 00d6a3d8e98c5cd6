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

TEST_CASE("reports do not depend on the thread count")
{
    for (Theorem th : {Theorem::Proof, Theorem::Ruloid, Theorem::Decomposition, Theorem::Characterization}) {
        HarnessConfig one;
        one.seed = 11;
        one.samples = 40;
        one.threads = 1;
        HarnessConfig four = one;
        four.threads = 4;
        Report a = run_harness(th, one), b = run_harness(th, four);
        CHECK_MESSAGE(a.to_json().dump() == b.to_json().dump(), to_string(th));
        CHECK(a.ok());
    }
}

TEST_CASE("seeds and replay")
{
    HarnessConfig c;
    c.seed = 3;
    c.samples = 20;
    c.threads = 2;
    Report a = run_harness(Theorem::Ruloid, c);
    c.seed = 4;
    Report b = run_harness(Theorem::Ruloid, c);
    REQUIRE(a.cases.size() == b.cases.size());
    CHECK(a.cases[0].seed != b.cases[0].seed);
    CHECK(a.cases[5].seed == case_seed(3, 5));
    CHECK(case_seed(3, 5) != case_seed(3, 6));

    HarnessConfig r = c;
    r.seed = 3;
    r.replay = a.cases[7].seed;
    Report one = run_harness(Theorem::Ruloid, r);
    REQUIRE(one.cases.size() == 1);
    CHECK(one.cases[0].seed == a.cases[7].seed);
    CHECK(one.cases[0].checks == a.cases[7].checks);
    CHECK(one.cases[0].verdict == a.cases[7].verdict);
}

TEST_CASE("theorem names")
{
    for (Theorem th : {Theorem::Proof, Theorem::Ruloid, Theorem::DistRuloid, Theorem::Decomposition,
                       Theorem::Characterization, Theorem::Congruence, Theorem::Invariants})
        CHECK(theorem_from_string(to_string(th)) == th);
    CHECK_FALSE(theorem_from_string("nonsense"));
}

TEST_CASE("json encoding")
{
    Json e = envelope("ruloids");
    CHECK(e["schema"] == schema_version);
    CHECK(e["kind"] == "ruloids");

    Rational big(mpz_class("123456789012345678901234567891"), mpz_class(2));
    Json j = to_json(big);
    CHECK(j["num"] == "123456789012345678901234567891");
    CHECK(j["den"] == 2);
    CHECK(rational_from_json(j) == big);
    CHECK(to_json(q(-1, 2)).dump() == R"({"num":-1,"den":2})");

    HarnessConfig c;
    c.samples = 5;
    c.threads = 1;
    Json r = run_harness(Theorem::Invariants, c).to_json();
    CHECK(r["schema"] == schema_version);
    CHECK(r["kind"] == "verify-report");
    CHECK(r["summary"]["cases"] == 5);
    CHECK(r["cases"].size() == 5);
}

TEST_CASE("random generators")
{
    Gen g(71);
    for (int i = 0; i < 500; ++i) {
        auto ws = g.weights(1 + g.below(4), 6);
        Rational sum = 0;
        for (const auto& w : ws) {
            CHECK(w > 0);
            sum += w;
        }
        CHECK(sum == 1);
        PtsSpec s = random_spec(g);
        Term t = random_closed_term(g, s.signature(), 3);
        CHECK(t.closed());
    }
}
