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

#include "rforge/decomposition.hpp"

#include "rforge/flow.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

namespace rforge {

namespace {

std::vector<std::vector<char>> full_rows(std::size_t m, std::size_t k) { return {m, std::vector<char>(k, 1)}; }

// Path col i -> row m in the residual graph of plan f restricted to pattern s.
template <class T>
std::vector<std::pair<std::size_t, std::size_t>> residual_path(const std::vector<std::vector<char>>& s,
                                                               const std::vector<std::vector<T>>& f, std::size_t col,
                                                               std::size_t row)
{
    const std::size_t m = s.size(), k = s.empty() ? 0 : s[0].size();
    // Nodes: rows 0..m-1, cols m..m+k-1.
    std::vector<long> prev(m + k, -1);
    std::vector<char> seen(m + k, 0);
    std::deque<std::size_t> q{m + col};
    seen[m + col] = 1;
    while (!q.empty()) {
        std::size_t u = q.front();
        q.pop_front();
        if (u == row) break;
        if (u < m) {
            for (std::size_t j = 0; j < k; ++j)
                if (s[u][j] && !seen[m + j]) {
                    seen[m + j] = 1;
                    prev[m + j] = static_cast<long>(u);
                    q.push_back(m + j);
                }
        } else {
            std::size_t j = u - m;
            for (std::size_t i = 0; i < m; ++i)
                if (s[i][j] && f[i][j] > 0 && !seen[i]) {
                    seen[i] = 1;
                    prev[i] = static_cast<long>(u);
                    q.push_back(i);
                }
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> path;
    if (!seen[row]) return path;
    for (std::size_t v = row; v != m + col; v = static_cast<std::size_t>(prev[v])) path.emplace_back(prev[v], v);
    std::reverse(path.begin(), path.end());
    return path;
}

// Average of f and one plan per unused edge of s, each obtained by pushing
// flow around a residual cycle through that edge. Positive exactly on s if
// every edge of s can carry flow; false otherwise.
template <class T>
bool representative(const std::vector<std::vector<char>>& s, const std::vector<std::vector<T>>& f,
                    std::vector<std::vector<Rational>>& out)
{
    const std::size_t m = s.size(), k = m ? s[0].size() : 0;
    std::vector<std::vector<T>> sum = f;
    long count = 1;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            if (!s[i][j] || f[i][j] > 0) continue;
            auto path = residual_path(s, f, j, i);
            if (path.empty()) return false;
            T eps = -1;
            for (auto [u, v] : path)
                if (u >= m) { // backward edge col u-m -> row v
                    const T& fv = f[v][u - m];
                    if (eps < 0 || fv < eps) eps = fv;
                }
            sum[i][j] += eps;
            for (auto [u, v] : path) {
                if (u < m)
                    sum[u][v - m] += eps;
                else
                    sum[v][u - m] -= eps;
            }
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    if (!(a == i && b == j)) sum[a][b] += f[a][b];
            ++count;
        }
    out.assign(m, std::vector<Rational>(k, Rational(0)));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < k; ++b) out[a][b] = Rational(sum[a][b]) / count;
    return true;
}

} // namespace

std::vector<Matching> enumerate_matchings(const std::vector<Rational>& q, const std::vector<Rational>& r,
                                          std::size_t limit, bool* truncated)
{
    const std::size_t m = q.size(), k = r.size();
    std::vector<Matching> out;
    if (truncated) *truncated = false;
    if (m == 0 || k == 0) return out;
    Transport t{q, r, full_rows(m, k)};
    std::vector<long> qi, ri;
    const bool scaled = scale_to_int(q, r, qi, ri);
    Rational scale = 1;
    if (scaled) {
        long total = 0;
        for (long x : qi) total += x;
        scale = Rational(total) / std::accumulate(q.begin(), q.end(), Rational(0));
    }
    // Rows before `fixed` keep their pattern exactly. Summing one integer
    // vertex per cell shows a plan positive on those cells exists iff the
    // marginals scaled by m*k admit one with every such cell at least 1.
    const long cells = static_cast<long>(m * k);
    auto possible = [&](std::size_t fixed, std::vector<std::vector<long>>* plan = nullptr) {
        if (!scaled) return feasible(t);
        std::vector<long> qs(qi), rs(ri);
        for (auto& x : qs) x *= cells;
        for (auto& x : rs) x *= cells;
        for (std::size_t i = 0; i < fixed; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (t.allowed[i][j]) {
                    if (--qs[i] < 0 || --rs[j] < 0) return false;
                }
        return feasible_int(qs, rs, t.allowed, plan);
    };
    if (!possible(0)) return out;

    bool stop = false;
    auto rec = [&](auto&& self, std::size_t row) -> void {
        if (stop) return;
        if (row == m) {
            Matching mt;
            mt.pattern = t.allowed;
            bool exact = false;
            if (scaled) {
                std::vector<std::vector<long>> f;
                if (!possible(m, &f)) return;
                const Rational unit = 1 / (scale * cells);
                mt.weights.assign(m, std::vector<Rational>(k, Rational(0)));
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        if (t.allowed[i][j]) mt.weights[i][j] = (f[i][j] + 1) * unit;
                exact = true;
            } else {
                std::vector<std::vector<Rational>> f;
                if (!feasible(t, &f)) return;
                exact = representative(t.allowed, f, mt.weights);
            }
            if (!exact) return;
            out.push_back(std::move(mt));
            if (out.size() >= limit) {
                stop = true;
                if (truncated) *truncated = true;
            }
            return;
        }
        for (unsigned mask = 1; mask < (1u << k) && !stop; ++mask) {
            for (std::size_t j = 0; j < k; ++j) t.allowed[row][j] = (mask >> j) & 1u;
            if (possible(row + 1)) self(self, row + 1);
        }
        for (std::size_t j = 0; j < k; ++j) t.allowed[row][j] = 1;
    };
    rec(rec, 0);
    return out;
}

int compare(const StateMapping& a, const StateMapping& b)
{
    auto i = a.begin(), j = b.begin();
    for (; i != a.end() && j != b.end(); ++i, ++j) {
        if (int c = i->first.compare(j->first)) return c < 0 ? -1 : 1;
        if (int c = compare(i->second, j->second)) return c;
    }
    if (i == a.end() && j == b.end()) return 0;
    return i == a.end() ? -1 : 1;
}

int compare(const DistMapping& a, const DistMapping& b)
{
    if (int c = compare(a.state, b.state)) return c;
    auto i = a.dist.begin(), j = b.dist.begin();
    for (; i != a.dist.end() && j != b.dist.end(); ++i, ++j) {
        if (int c = i->first.compare(j->first)) return c < 0 ? -1 : 1;
        if (int c = compare(i->second, j->second)) return c;
    }
    if (i == a.dist.end() && j == b.dist.end()) return 0;
    return i == a.dist.end() ? -1 : 1;
}

std::string to_string(const StateMapping& m)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [x, f] : m) {
        if (!first) out += ", ";
        first = false;
        out += x + ": " + to_string(f);
    }
    return out + "}";
}

std::string to_string(const DistMapping& m)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [mu, d] : m.dist) {
        if (!first) out += ", ";
        first = false;
        out += mu + ": " + to_string(d);
    }
    for (const auto& [x, f] : m.state) {
        if (!first) out += ", ";
        first = false;
        out += x + ": " + to_string(f);
    }
    return out + "}";
}

Formula lookup(const StateMapping& m, const std::string& x)
{
    auto it = m.find(x);
    return it == m.end() ? Formula::top() : it->second;
}

DistFormula lookup(const DistMapping& m, const std::string& mu)
{
    auto it = m.dist.find(mu);
    return it == m.dist.end() ? DistFormula::unit(Formula::top()) : it->second;
}

namespace {

struct StateMappingLess {
    bool operator()(const StateMapping& a, const StateMapping& b) const { return compare(a, b) < 0; }
};
struct DistMappingLess {
    bool operator()(const DistMapping& a, const DistMapping& b) const { return compare(a, b) < 0; }
};

void put(StateMapping& m, const std::string& x, Formula f)
{
    f = simplify(f);
    if (f.is_top()) return;
    auto it = m.find(x);
    if (it == m.end())
        m.emplace(x, f);
    else
        it->second = conjoin({it->second, f});
}

void merge_into(StateMapping& m, const StateMapping& other)
{
    for (const auto& [x, f] : other) put(m, x, f);
}

std::vector<Formula> conjuncts_of(Formula f)
{
    if (f.is_top()) return {};
    if (f.kind() == Formula::Kind::Conj) return f.conjuncts();
    return {f};
}

// Mappings not entailed conjunct-wise by another one. Falsifying the weaker
// mapping falsifies the stronger, so negations only need these.
std::vector<const StateMapping*> weakest(const std::vector<StateMapping>& ms)
{
    auto below = [](const StateMapping& a, const StateMapping& b) {
        for (const auto& [x, f] : a) {
            std::vector<Formula> have = conjuncts_of(lookup(b, x));
            for (Formula c : conjuncts_of(f))
                if (std::find(have.begin(), have.end(), c) == have.end()) return false;
        }
        return true;
    };
    std::vector<const StateMapping*> out;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < ms.size() && !dominated; ++j)
            if (j != i && below(ms[j], ms[i]) && (!below(ms[i], ms[j]) || j < i)) dominated = true;
        if (!dominated) out.push_back(&ms[i]);
    }
    return out;
}

// Each variable occurrence of t replaced by a fresh variable.
Term rename_occurrences(Term t, std::map<std::string, std::string>& occ, std::size_t& counter)
{
    if (t.closed()) return t;
    if (t.is_var()) {
        std::string o = "_o" + std::to_string(counter++);
        occ[o] = t.name();
        return Term::var(o);
    }
    std::vector<Term> args;
    for (Term a : t.args()) args.push_back(rename_occurrences(a, occ, counter));
    return Term::app(t.op(), std::move(args));
}

std::vector<std::string> state_vars(Term t)
{
    VarSet v = vars(t);
    return {v.state.begin(), v.state.end()};
}

unsigned long denominator_of(const Rational& r)
{
    return r.get_den().fits_ulong_p() ? r.get_den().get_ui() : static_cast<unsigned long>(-1);
}

} // namespace

Decomposer::Decomposer(const PtsSpec& spec, LogicClass cls, DecompBounds bounds)
    : spec_(&spec), cls_(cls), bounds_(bounds), ruloids_(spec), sem_(spec), mc_(sem_)
{
    if (cls == LogicClass::Positive && !spec.is_positive())
        throw Error(ErrorKind::NonPositiveSpec, "positive decomposition requires a specification without negative premises");
    shapes_ = bounded_shapes(bounds.k, bounds.d);
}

void Decomposer::check_formula(Formula phi) const
{
    if (!in_class(phi, cls_))
        throw Error(ErrorKind::Unsupported, "formula " + to_string(phi) + " is not in the " + to_string(cls_) + " class");
}

const StateDecomposition& Decomposer::state(Term t, Formula phi)
{
    Key key{t.id(), phi.id()};
    auto it = state_memo_.find(key);
    if (it != state_memo_.end()) return it->second;
    check_formula(phi);
    StateDecomposition r = compute_state(t, phi);
    return state_memo_.emplace(key, std::move(r)).first->second;
}

StateDecomposition Decomposer::compute_state(Term t, Formula phi)
{
    if (!is_univariate(t)) {
        std::map<std::string, std::string> occ;
        std::size_t counter = 0;
        Term tp = rename_occurrences(t, occ, counter);
        const StateDecomposition& sub = state(tp, phi);
        std::set<StateMapping, StateMappingLess> seen;
        StateDecomposition out;
        out.truncated = sub.truncated;
        for (const auto& xi : sub.mappings) {
            StateMapping m;
            for (const auto& [o, f] : xi) put(m, occ.at(o), f);
            if (seen.insert(m).second) out.mappings.push_back(std::move(m));
        }
        return out;
    }
    Renamer ren(RenameScope::StateOnly, "_v");
    ren.visit(t);
    Term tc = ren.apply(t);
    if (tc != t) {
        std::map<std::string, std::string> back;
        for (const auto& x : vars(t).state) back[ren.state(x)] = x;
        const StateDecomposition& sub = state(tc, phi);
        StateDecomposition out;
        out.truncated = sub.truncated;
        for (const auto& xi : sub.mappings) {
            StateMapping m;
            for (const auto& [x, f] : xi) m.emplace(back.at(x), f);
            out.mappings.push_back(std::move(m));
        }
        return out;
    }
    return compute_univariate(t, phi);
}

StateDecomposition Decomposer::compute_univariate(Term t, Formula phi)
{
    StateDecomposition out;
    std::set<StateMapping, StateMappingLess> seen;
    auto add = [&](StateMapping m) {
        if (out.mappings.size() >= bounds_.max_mappings) {
            out.truncated = true;
            return false;
        }
        if (seen.insert(m).second) out.mappings.push_back(std::move(m));
        return true;
    };

    switch (phi.kind()) {
    case Formula::Kind::Top: out.mappings.emplace_back(); return out;

    case Formula::Kind::Conj: {
        std::vector<StateMapping> acc{StateMapping{}};
        for (Formula c : phi.conjuncts()) {
            const StateDecomposition& d = state(t, c);
            out.truncated = out.truncated || d.truncated;
            std::set<StateMapping, StateMappingLess> next_seen;
            std::vector<StateMapping> next;
            for (const auto& a : acc)
                for (const auto& b : d.mappings) {
                    StateMapping m = a;
                    merge_into(m, b);
                    if (next_seen.insert(m).second) next.push_back(std::move(m));
                    if (next.size() > bounds_.max_mappings) {
                        out.truncated = true;
                        break;
                    }
                }
            acc = std::move(next);
        }
        for (auto& m : acc)
            if (!add(std::move(m))) break;
        return out;
    }

    case Formula::Kind::Neg: {
        std::vector<std::string> vs = state_vars(t);
        if (cls_ == LogicClass::Full) {
            const StateDecomposition& b = state(t, phi.sub());
            if (b.truncated) {
                out.truncated = true;
                return out;
            }
            if (vs.empty()) {
                if (b.mappings.empty()) out.mappings.emplace_back();
                return out;
            }
            const std::vector<const StateMapping*> bs = weakest(b.mappings);
            double count = 1;
            for (std::size_t i = 0; i < bs.size(); ++i) count *= static_cast<double>(vs.size());
            if (count > static_cast<double>(bounds_.max_mappings)) {
                out.truncated = true;
                return out;
            }
            std::vector<std::size_t> f(bs.size(), 0);
            for (;;) {
                StateMapping m;
                for (std::size_t j = 0; j < f.size(); ++j) put(m, vs[f[j]], Formula::neg(lookup(*bs[j], vs[f[j]])));
                add(std::move(m));
                std::size_t j = 0;
                while (j < f.size() && ++f[j] == vs.size()) f[j++] = 0;
                if (j == f.size()) break;
            }
            return out;
        }
        // Ready class: the negated formula is <a> tt; negate one conjunct per mapping.
        const StateDecomposition& b = state(t, Formula::can(phi.sub().action()));
        if (b.truncated) {
            out.truncated = true;
            return out;
        }
        std::vector<std::vector<std::pair<std::string, Formula>>> options;
        double count = 1;
        for (const StateMapping* xi : weakest(b.mappings)) {
            std::vector<std::pair<std::string, Formula>> o;
            for (const auto& [x, f] : *xi)
                for (Formula c : conjuncts_of(f)) o.emplace_back(x, simplify(Formula::neg(c)));
            if (o.empty()) return out;
            count *= static_cast<double>(o.size());
            options.push_back(std::move(o));
        }
        if (count > static_cast<double>(bounds_.max_mappings)) {
            out.truncated = true;
            return out;
        }
        std::vector<std::size_t> idx(options.size(), 0);
        for (;;) {
            StateMapping m;
            for (std::size_t j = 0; j < idx.size(); ++j) put(m, options[j][idx[j]].first, options[j][idx[j]].second);
            add(std::move(m));
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == options[j].size()) idx[j++] = 0;
            if (j == idx.size()) break;
        }
        return out;
    }

    case Formula::Kind::Diam: {
        std::vector<std::string> vs = state_vars(t);
        for (const auto& rho : ruloids_.ruloids(t, phi.action())) {
            const DistDecomposition& d = dist(rho.conclusion.target, phi.dist());
            out.truncated = out.truncated || d.truncated;
            for (const auto& eta : d.mappings) {
                StateMapping m;
                for (const auto& p : rho.premises) {
                    if (p.positive())
                        put(m, p.source.name(), Formula::diam(p.action, lookup(eta, p.target.name())));
                    else
                        put(m, p.source.name(), Formula::cannot(p.action));
                }
                for (const auto& x : vs) {
                    auto it = eta.state.find(x);
                    if (it != eta.state.end()) put(m, x, it->second);
                }
                if (!add(std::move(m))) return out;
            }
        }
        return out;
    }
    }
    return out;
}

const DistDecomposition& Decomposer::dist(DistTerm theta, DistFormula psi)
{
    Key key{theta.id(), psi.id()};
    auto it = dist_memo_.find(key);
    if (it != dist_memo_.end()) return it->second;
    DistDecomposition r = compute_dist(theta, psi);
    return dist_memo_.emplace(key, std::move(r)).first->second;
}

DistDecomposition Decomposer::compute_dist(DistTerm theta, DistFormula psi)
{
    DistDecomposition out;
    std::set<DistMapping, DistMappingLess> seen;
    std::vector<std::string> mus, xs;
    for (const Var& v : ordered_vars(theta)) (v.sort == Sort::Distribution ? mus : xs).push_back(v.name);
    std::vector<Rational> cols;
    for (const auto& [r, f] : psi.branches()) cols.push_back(r);
    const std::size_t budget = bounds_.max_mappings;
    const DistFormula unit_top = DistFormula::unit(Formula::top());
    std::size_t work = 0;

    std::vector<std::size_t> shape_idx(mus.size(), 0);
    for (;;) {
        Shapes shapes;
        for (std::size_t j = 0; j < mus.size(); ++j) shapes[mus[j]] = shapes_[shape_idx[j]];
        DistRuloid r = build_dist_ruloid(theta, shapes, "_y");
        std::vector<Rational> rows;
        std::vector<Term> targets;
        for (const auto& [q, tm] : r.conclusion.branches) {
            rows.push_back(q);
            targets.push_back(tm);
        }
        // Premises over distribution variables, their target variables and
        // the conclusion targets those variables occur in.
        std::vector<std::size_t> premise_index;
        std::vector<std::string> p_name;
        std::vector<std::vector<std::string>> premise_vars;
        std::vector<std::vector<std::size_t>> relevant;
        std::vector<VarSet> target_vars;
        for (Term tm : targets) target_vars.push_back(vars(tm));
        auto occurring = [&](const std::vector<std::string>& names) {
            std::vector<std::size_t> rel;
            for (std::size_t m = 0; m < targets.size(); ++m)
                for (const auto& x : names)
                    if (target_vars[m].state.count(x)) {
                        rel.push_back(m);
                        break;
                    }
            return rel;
        };
        for (std::size_t i = 0; i < r.premises.size(); ++i) {
            const auto& p = r.premises[i];
            if (p.source.kind() != DistTerm::Kind::Var) continue;
            premise_index.push_back(i);
            p_name.push_back(p.source.name());
            std::vector<std::string> names;
            for (const auto& [q, x] : p.branches) names.push_back(x.name());
            relevant.push_back(occurring(names));
            premise_vars.push_back(std::move(names));
        }
        const std::vector<std::size_t> state_relevant = occurring(xs);
        // Formulas read off the chosen list entries of the relevant targets.
        // List entries are stable for this shape assignment, so their
        // addresses key the caches.
        using CacheKey = std::vector<const StateMapping*>;
        std::vector<std::map<CacheKey, DistFormula>> df_cache(relevant.size());
        std::map<CacheKey, std::vector<Formula>> state_cache;

        bool trunc = false;
        if (work >= 20 * budget) {
            out.truncated = true;
            return out;
        }
        auto matchings = enumerate_matchings(rows, cols, std::min(budget, 20 * budget - work), &trunc);
        work += matchings.size();
        out.truncated = out.truncated || trunc;

        std::map<std::pair<std::size_t, unsigned>, std::vector<StateMapping>> comb;
        auto combined = [&](std::size_t m, unsigned mask) -> const std::vector<StateMapping>& {
            auto key = std::make_pair(m, mask);
            auto it = comb.find(key);
            if (it != comb.end()) return it->second;
            std::vector<StateMapping> acc{StateMapping{}};
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (!((mask >> i) & 1u)) continue;
                const StateDecomposition& d = state(targets[m], psi.branches()[i].second);
                out.truncated = out.truncated || d.truncated;
                std::set<StateMapping, StateMappingLess> s;
                std::vector<StateMapping> next;
                for (const auto& a : acc)
                    for (const auto& b : d.mappings) {
                        StateMapping x = a;
                        merge_into(x, b);
                        if (s.insert(x).second) next.push_back(std::move(x));
                    }
                acc = std::move(next);
            }
            return comb.emplace(key, std::move(acc)).first->second;
        };

        for (const auto& mt : matchings) {
            std::vector<const std::vector<StateMapping>*> lists;
            bool empty = false;
            for (std::size_t m = 0; m < targets.size(); ++m) {
                unsigned mask = 0;
                for (std::size_t i = 0; i < cols.size(); ++i)
                    if (mt.pattern[m][i]) mask |= 1u << i;
                lists.push_back(&combined(m, mask));
                if (lists.back()->empty()) {
                    empty = true;
                    break;
                }
            }
            if (empty) continue;
            std::vector<std::size_t> idx(lists.size(), 0);
            auto key_of = [&](const std::vector<std::size_t>& rel) {
                CacheKey key;
                for (std::size_t m : rel) key.emplace_back(&(*lists[m])[idx[m]]);
                return key;
            };
            auto formulas_for = [&](const std::vector<std::size_t>& rel, const std::vector<std::string>& names) {
                StateMapping part;
                for (std::size_t m : rel) merge_into(part, (*lists[m])[idx[m]]);
                std::vector<Formula> fs;
                for (const auto& x : names) fs.push_back(lookup(part, x));
                return fs;
            };
            for (;;) {
                if (++work > 20 * budget || out.mappings.size() >= budget) {
                    out.truncated = true;
                    return out;
                }
                DistMapping eta;
                for (std::size_t pi = 0; pi < premise_vars.size(); ++pi) {
                    CacheKey key = key_of(relevant[pi]);
                    auto it = df_cache[pi].find(key);
                    if (it == df_cache[pi].end()) {
                        auto fs = formulas_for(relevant[pi], premise_vars[pi]);
                        const auto& p = r.premises[premise_index[pi]];
                        std::vector<std::pair<Rational, Formula>> b;
                        for (std::size_t i = 0; i < fs.size(); ++i) b.emplace_back(p.branches[i].first, fs[i]);
                        it = df_cache[pi].emplace(std::move(key), simplify(DistFormula::make(std::move(b)))).first;
                    }
                    if (!(it->second == unit_top)) eta.dist.emplace(p_name[pi], it->second);
                }
                if (!xs.empty()) {
                    CacheKey key = key_of(state_relevant);
                    auto it = state_cache.find(key);
                    if (it == state_cache.end())
                        it = state_cache.emplace(std::move(key), formulas_for(state_relevant, xs)).first;
                    const auto& fs = it->second;
                    for (std::size_t i = 0; i < xs.size(); ++i)
                        if (!fs[i].is_top()) eta.state.emplace(xs[i], fs[i]);
                }
                if (seen.insert(eta).second) out.mappings.push_back(std::move(eta));
                std::size_t j = 0;
                while (j < idx.size() && ++idx[j] == lists[j]->size()) idx[j++] = 0;
                if (j == idx.size()) break;
            }
        }

        std::size_t j = 0;
        while (j < shape_idx.size() && ++shape_idx[j] == shapes_.size()) shape_idx[j++] = 0;
        if (j == shape_idx.size()) break;
    }
    return out;
}

bool Decomposer::satisfies(const StateMapping& m, const Substitution& s)
{
    for (const auto& [x, f] : m) {
        const Term* u = s.state(x);
        if (!u) throw Error(ErrorKind::NonClosed, "substitution does not close " + x);
        if (!mc_.sat(*u, f)) return false;
    }
    return true;
}

std::optional<StateMapping> Decomposer::guided(Term t, Formula phi, const Substitution& s, GuidedInfo* info)
{
    check_formula(phi);
    GuidedInfo local;
    GuidedInfo& inf = info ? *info : local;
    std::optional<StateMapping> out;
    if (!is_univariate(t)) {
        std::map<std::string, std::string> occ;
        std::size_t counter = 0;
        Term tp = rename_occurrences(t, occ, counter);
        Substitution sp;
        for (const auto& [o, x] : occ) {
            const Term* u = s.state(x);
            if (!u) throw Error(ErrorKind::NonClosed, "substitution does not close " + x);
            sp.bind_state(o, *u);
        }
        auto sub = guided_univariate(tp, phi, sp, inf);
        if (sub) {
            StateMapping m;
            for (const auto& [o, f] : *sub) put(m, occ.at(o), f);
            out = std::move(m);
        }
    } else {
        out = guided_univariate(t, phi, s, inf);
    }
    if (out && !satisfies(*out, s)) return std::nullopt;
    return out;
}

std::optional<StateMapping> Decomposer::guided_univariate(Term t, Formula phi, const Substitution& s, GuidedInfo& info)
{
    switch (phi.kind()) {
    case Formula::Kind::Top: return StateMapping{};
    case Formula::Kind::Conj: {
        StateMapping m;
        for (Formula c : phi.conjuncts()) {
            auto sub = guided(t, c, s, &info);
            if (!sub) return std::nullopt;
            merge_into(m, *sub);
        }
        return m;
    }
    case Formula::Kind::Neg: {
        Term u = apply(s, t);
        if (mc_.sat(u, phi.sub())) return std::nullopt;
        std::vector<std::string> vs = state_vars(t);
        StateMapping m;
        if (cls_ == LogicClass::Full) {
            const StateDecomposition& b = state(t, phi.sub());
            info.truncated = info.truncated || b.truncated;
            for (const StateMapping* xi : weakest(b.mappings)) {
                bool placed = false;
                for (const auto& x : vs) {
                    Formula f = lookup(*xi, x);
                    if (!mc_.sat(*s.state(x), f)) {
                        put(m, x, Formula::neg(f));
                        placed = true;
                        break;
                    }
                }
                if (!placed) {
                    info.soundness_violation = true;
                    return std::nullopt;
                }
            }
            return m;
        }
        const StateDecomposition& b = state(t, Formula::can(phi.sub().action()));
        info.truncated = info.truncated || b.truncated;
        for (const StateMapping* xi : weakest(b.mappings)) {
            bool placed = false;
            for (const auto& [x, f] : *xi) {
                for (Formula c : conjuncts_of(f))
                    if (!mc_.sat(*s.state(x), c)) {
                        put(m, x, Formula::neg(c));
                        placed = true;
                        break;
                    }
                if (placed) break;
            }
            if (!placed) {
                info.soundness_violation = true;
                return std::nullopt;
            }
        }
        return m;
    }
    case Formula::Kind::Diam: return guided_diam(t, phi, s, info);
    }
    return std::nullopt;
}

std::optional<StateMapping> Decomposer::guided_diam(Term t, Formula phi, const Substitution& s, GuidedInfo& info)
{
    std::optional<StateMapping> result;
    std::vector<std::string> vs = state_vars(t);
    for_each_instance(ruloids_, sem_, t, s, phi.action(),
                      [&](const LiteralRule& rho, const Substitution& sp, const Distribution& pi) {
                          if (!mc_.sat(pi, phi.dist())) return true;
                          auto eta = guided_dist(rho.conclusion.target, phi.dist(), sp, &info);
                          if (!eta) return true;
                          StateMapping m;
                          for (const auto& p : rho.premises) {
                              if (p.positive())
                                  put(m, p.source.name(), Formula::diam(p.action, lookup(*eta, p.target.name())));
                              else
                                  put(m, p.source.name(), Formula::cannot(p.action));
                          }
                          for (const auto& x : vs) {
                              auto it = eta->state.find(x);
                              if (it != eta->state.end()) put(m, x, it->second);
                          }
                          result = std::move(m);
                          return false;
                      });
    return result;
}

std::optional<DistMapping> Decomposer::guided_dist(DistTerm theta, DistFormula psi, const Substitution& sigma,
                                                   GuidedInfo* info)
{
    GuidedInfo local;
    GuidedInfo& inf = info ? *info : local;
    DistRuloidWitness w = dist_ruloid_witness(theta, sigma);
    for (const auto& p : w.ruloid.premises) {
        if (p.source.kind() != DistTerm::Kind::Var) continue;
        inf.max_support = std::max(inf.max_support, p.branches.size());
        for (const auto& [q, x] : p.branches) inf.max_denominator = std::max(inf.max_denominator, denominator_of(q));
    }
    Distribution pi = eval_dist(apply(sigma, theta));
    auto split = mc_.split(pi, psi);
    if (!split) return std::nullopt;
    std::map<Term, std::size_t, TermLess> row;
    for (const auto& [u, q] : pi.weights()) row.emplace(u, row.size());

    StateMapping total;
    for (const auto& [q, tm] : w.ruloid.conclusion.branches) {
        Term u = apply(w.sigma, tm);
        std::size_t ri = row.at(u);
        Substitution sub;
        for (const auto& x : vars(tm).state) sub.bind_state(x, *w.sigma.state(x));
        for (std::size_t i = 0; i < psi.branches().size(); ++i) {
            Rational wm = q / pi(u) * (*split)[ri][i];
            if (wm == 0) continue;
            auto xi = guided(tm, psi.branches()[i].second, sub, &inf);
            if (!xi) return std::nullopt;
            merge_into(total, *xi);
        }
    }

    DistMapping eta;
    for (const auto& p : w.ruloid.premises) {
        if (p.source.kind() != DistTerm::Kind::Var) continue;
        std::vector<std::pair<Rational, Formula>> b;
        for (const auto& [q, x] : p.branches) b.emplace_back(q, lookup(total, x.name()));
        DistFormula df = simplify(DistFormula::make(std::move(b)));
        if (!(df == DistFormula::unit(Formula::top()))) eta.dist.emplace(p.source.name(), df);
    }
    for (const Var& v : ordered_vars(theta)) {
        if (v.sort != Sort::State) continue;
        Formula f = lookup(total, v.name);
        if (!f.is_top()) eta.state.emplace(v.name, f);
    }
    for (const auto& [mu, df] : eta.dist)
        if (!mc_.sat(eval_dist(*sigma.dist(mu)), df)) return std::nullopt;
    for (const auto& [x, f] : eta.state)
        if (!mc_.sat(*sigma.state(x), f)) return std::nullopt;
    return eta;
}

} // namespace rforge
