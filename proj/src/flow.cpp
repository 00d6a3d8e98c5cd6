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

#include "rforge/flow.hpp"

#include <algorithm>
#include <deque>

namespace rforge {

FlowResult max_transport(const Transport& t)
{
    const std::size_t m = t.supply.size(), k = t.demand.size();
    const std::size_t n = m + k + 2, src = m + k, snk = m + k + 1;
    std::vector<std::vector<Rational>> cap(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        cap[src][i] = t.supply[i];
        for (std::size_t j = 0; j < k; ++j)
            if (t.allowed[i][j]) cap[i][m + j] = t.supply[i];
    }
    for (std::size_t j = 0; j < k; ++j) cap[m + j][snk] = t.demand[j];
    auto orig = cap;

    FlowResult res;
    res.value = 0;
    std::vector<std::size_t> prev(n);
    for (;;) {
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> q{src};
        seen[src] = 1;
        while (!q.empty() && !seen[snk]) {
            std::size_t u = q.front();
            q.pop_front();
            for (std::size_t v = 0; v < n; ++v)
                if (!seen[v] && cap[u][v] > 0) {
                    seen[v] = 1;
                    prev[v] = u;
                    q.push_back(v);
                }
        }
        if (!seen[snk]) break;
        Rational b = cap[prev[snk]][snk];
        for (std::size_t v = snk; v != src; v = prev[v])
            if (cap[prev[v]][v] < b) b = cap[prev[v]][v];
        for (std::size_t v = snk; v != src; v = prev[v]) {
            cap[prev[v]][v] -= b;
            cap[v][prev[v]] += b;
        }
        res.value += b;
    }
    res.plan.assign(m, std::vector<Rational>(k, Rational(0)));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (t.allowed[i][j]) res.plan[i][j] = orig[i][m + j] - cap[i][m + j];
    return res;
}

bool feasible(const Transport& t, std::vector<std::vector<Rational>>* plan)
{
    Rational s = 0, d = 0;
    for (const auto& x : t.supply) s += x;
    for (const auto& x : t.demand) d += x;
    if (s != d) return false;
    FlowResult r = max_transport(t);
    if (r.value != s) return false;
    if (plan) *plan = std::move(r.plan);
    return true;
}

bool feasible_int(const std::vector<long>& supply, const std::vector<long>& demand,
                  const std::vector<std::vector<char>>& allowed, std::vector<std::vector<long>>* plan)
{
    const std::size_t m = supply.size(), k = demand.size();
    const std::size_t n = m + k + 2, src = m + k, snk = m + k + 1;
    long total = 0, dtotal = 0;
    for (long x : supply) total += x;
    for (long x : demand) dtotal += x;
    if (total != dtotal) return false;
    if (!plan && k <= 8) {
        // Hall's condition on column sets: each set must be fed by the rows
        // reaching it.
        std::vector<long> feed(std::size_t(1) << k, 0);
        for (std::size_t i = 0; i < m; ++i) {
            unsigned row = 0;
            for (std::size_t j = 0; j < k; ++j)
                if (allowed[i][j]) row |= 1u << j;
            for (unsigned set = 1; set < feed.size(); ++set)
                if (set & row) feed[set] += supply[i];
        }
        for (unsigned set = 1; set < feed.size(); ++set) {
            long need = 0;
            for (std::size_t j = 0; j < k; ++j)
                if (set >> j & 1u) need += demand[j];
            if (need > feed[set]) return false;
        }
        return true;
    }
    std::vector<long> cap(n * n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        cap[src * n + i] = supply[i];
        for (std::size_t j = 0; j < k; ++j)
            if (allowed[i][j]) cap[i * n + m + j] = supply[i];
    }
    for (std::size_t j = 0; j < k; ++j) cap[(m + j) * n + snk] = demand[j];
    long flow = 0;
    std::vector<std::size_t> prev(n), queue(n);
    std::vector<char> seen(n);
    for (;;) {
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t head = 0, tail = 0;
        queue[tail++] = src;
        seen[src] = 1;
        while (head < tail && !seen[snk]) {
            std::size_t u = queue[head++];
            for (std::size_t v = 0; v < n; ++v)
                if (!seen[v] && cap[u * n + v] > 0) {
                    seen[v] = 1;
                    prev[v] = u;
                    queue[tail++] = v;
                }
        }
        if (!seen[snk]) break;
        long b = cap[prev[snk] * n + snk];
        for (std::size_t v = snk; v != src; v = prev[v]) b = std::min(b, cap[prev[v] * n + v]);
        for (std::size_t v = snk; v != src; v = prev[v]) {
            cap[prev[v] * n + v] -= b;
            cap[v * n + prev[v]] += b;
        }
        flow += b;
    }
    if (flow != total) return false;
    if (plan) {
        plan->assign(m, std::vector<long>(k, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (allowed[i][j]) (*plan)[i][j] = supply[i] - cap[i * n + m + j];
    }
    return true;
}

bool scale_to_int(const std::vector<Rational>& supply, const std::vector<Rational>& demand, std::vector<long>& s,
                  std::vector<long>& d)
{
    mpz_class l = 1;
    for (const auto* v : {&supply, &demand})
        for (const auto& x : *v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    if (l > mpz_class(1L << 40)) return false;
    auto conv = [&](const std::vector<Rational>& in, std::vector<long>& out) {
        out.clear();
        for (const auto& x : in) {
            mpz_class v = x.get_num() * (l / x.get_den());
            if (!v.fits_slong_p() || v < 0) return false;
            out.push_back(v.get_si());
        }
        return true;
    };
    return conv(supply, s) && conv(demand, d);
}

} // namespace rforge
