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

#include <set>

using namespace rforge;
using namespace rforge::testing;

namespace {

using Pattern = std::vector<std::vector<char>>;

// Gale's condition: a plan on the allowed cells exists iff every row subset
// fits into the columns it reaches.
bool gale_feasible(const std::vector<Rational>& q, const std::vector<Rational>& r, const Pattern& allowed)
{
    const std::size_t n = q.size(), m = r.size();
    Rational sq = 0, sr = 0;
    for (const auto& x : q) sq += x;
    for (const auto& x : r) sr += x;
    if (sq != sr) return false;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Rational need = 0, have = 0;
        std::vector<char> reach(m, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) {
                need += q[i];
                for (std::size_t j = 0; j < m; ++j)
                    if (allowed[i][j]) reach[j] = 1;
            }
        for (std::size_t j = 0; j < m; ++j)
            if (reach[j]) have += r[j];
        if (need > have) return false;
    }
    return true;
}

// S is realized exactly iff reserving delta on each cell of S still leaves a
// plan within S, for delta below every positive gap of the rational data.
bool exact_pattern(const std::vector<Rational>& q, const std::vector<Rational>& r, const Pattern& s)
{
    const std::size_t n = q.size(), m = r.size();
    mpz_class den = 1;
    for (const auto& x : q) den = lcm(den, x.get_den());
    for (const auto& x : r) den = lcm(den, x.get_den());
    std::size_t cells = 0;
    for (const auto& row : s)
        for (char c : row) cells += c != 0;
    Rational delta(mpz_class(1), den * mpz_class(static_cast<unsigned long>(cells + 1)));
    delta.canonicalize();
    std::vector<Rational> q2 = q, r2 = r;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (s[i][j]) {
                q2[i] -= delta;
                r2[j] -= delta;
            }
    for (const auto& x : q2)
        if (x < 0) return false;
    for (const auto& x : r2)
        if (x < 0) return false;
    return gale_feasible(q2, r2, s);
}

std::set<Pattern> brute_patterns(const std::vector<Rational>& q, const std::vector<Rational>& r)
{
    const std::size_t n = q.size(), m = r.size();
    std::set<Pattern> out;
    for (unsigned mask = 1; mask < (1u << (n * m)); ++mask) {
        Pattern p(n, std::vector<char>(m, 0));
        for (std::size_t c = 0; c < n * m; ++c)
            if (mask >> c & 1u) p[c / m][c % m] = 1;
        if (exact_pattern(q, r, p)) out.insert(p);
    }
    return out;
}

void check_plan(const std::vector<Rational>& q, const std::vector<Rational>& r, const Matching& mt)
{
    for (std::size_t i = 0; i < q.size(); ++i) {
        Rational row = 0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            CHECK((mt.weights[i][j] > 0) == (mt.pattern[i][j] != 0));
            CHECK(mt.weights[i][j] >= 0);
            row += mt.weights[i][j];
        }
        CHECK(row == q[i]);
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
        Rational col = 0;
        for (std::size_t i = 0; i < q.size(); ++i) col += mt.weights[i][j];
        CHECK(col == r[j]);
    }
}

std::set<Pattern> patterns_of(const std::vector<Matching>& ms)
{
    std::set<Pattern> out;
    for (const auto& m : ms) out.insert(m.pattern);
    return out;
}

} // namespace

TEST_CASE("small matchings")
{
    std::vector<Rational> half{q(1, 2), q(1, 2)};
    auto two = enumerate_matchings(half, half, 1000);
    CHECK(two.size() == 3);
    for (const auto& m : two) check_plan(half, half, m);

    auto row = enumerate_matchings({q(1)}, {q(1, 3), q(2, 3)}, 1000);
    REQUIRE(row.size() == 1);
    CHECK(row[0].weights[0][0] == q(1, 3));
    CHECK(row[0].weights[0][1] == q(2, 3));
}

TEST_CASE("matching of a split")
{
    std::vector<Rational> rows{q(1, 10), q(3, 10), q(1, 5), q(2, 5)}, cols{q(1, 2), q(1, 2)};
    Pattern want{{1, 0}, {0, 1}, {1, 0}, {1, 1}};
    auto ms = enumerate_matchings(rows, cols, 100000);
    bool found = false;
    for (const auto& m : ms) {
        check_plan(rows, cols, m);
        if (m.pattern == want) {
            found = true;
            CHECK(m.weights[3][0] == q(1, 5));
            CHECK(m.weights[3][1] == q(1, 5));
        }
    }
    CHECK(found);
    CHECK(patterns_of(ms) == brute_patterns(rows, cols));
}

TEST_CASE("matchings agree with exhaustive pattern search")
{
    Gen g(53);
    for (int i = 0; i < 400; ++i) {
        const std::size_t n = 1 + g.below(3), m = 1 + g.below(3);
        std::vector<Rational> rows = g.weights(n, 6), cols = g.weights(m, 6);
        bool truncated = true;
        auto ms = enumerate_matchings(rows, cols, 100000, &truncated);
        CHECK_FALSE(truncated);
        for (const auto& mt : ms) check_plan(rows, cols, mt);
        CHECK(ms.size() == patterns_of(ms).size());
        CHECK(patterns_of(ms) == brute_patterns(rows, cols));
    }
}

TEST_CASE("matching enumeration respects its limit")
{
    std::vector<Rational> third{q(1, 3), q(1, 3), q(1, 3)};
    bool truncated = false;
    auto ms = enumerate_matchings(third, third, 5, &truncated);
    CHECK(ms.size() == 5);
    CHECK(truncated);
}
