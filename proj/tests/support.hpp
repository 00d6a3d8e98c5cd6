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

#pragma once

#include "rforge/decomposition.hpp"
#include "rforge/harness.hpp"
#include "rforge/syntax.hpp"

#include <string>

namespace rforge::testing {

inline PtsSpec corpus_spec(const std::string& name)
{
    return parse_spec(read_file(std::string(RFORGE_CORPUS_DIR) + "/" + name));
}

inline Pts corpus_pts(const std::string& name)
{
    return parse_pts(read_file(std::string(RFORGE_CORPUS_DIR) + "/" + name));
}

inline Rational q(long n, long d = 1) { return make_rational(n, d); }
inline Term var(const std::string& x) { return Term::var(x); }
inline DistTerm dvar(const std::string& m) { return DistTerm::var(m); }
inline Term con(const std::string& c) { return Term::constant(Op::make(c, {}, 0)); }

inline Distribution dist(std::vector<std::pair<Rational, Term>> bs)
{
    Distribution d;
    for (const auto& [w, t] : bs) d.add(t, w);
    return d;
}

// Spec built from text, with the operators of par_choice and a few leaves.
inline PtsSpec leaves_spec(const std::string& extra)
{
    std::string text = "actions a, b;\n"
                       "op nil/0; op par/2; op pchoice[2/5]/2;\n" +
                       extra +
                       "x -a-> mu, y -a-> nu => par(x, y) -a-> par(mu, nu);\n"
                       "x -a-> mu, y -a-| => pchoice[2/5](x, y) -a-> mu;\n"
                       "x -a-|, y -a-> nu => pchoice[2/5](x, y) -a-> nu;\n"
                       "x -a-> mu, y -a-> nu => pchoice[2/5](x, y) -a-> 2/5*mu + 3/5*nu;\n";
    return parse_spec(text);
}

} // namespace rforge::testing
