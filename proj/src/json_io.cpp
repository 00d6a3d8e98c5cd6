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

#include "rforge/json_io.hpp"

namespace rforge {

Json envelope(const std::string& kind)
{
    Json j;
    j["schema"] = schema_version;
    j["kind"] = kind;
    return j;
}

Json to_json(const Rational& r)
{
    Json j;
    auto part = [](const mpz_class& z) -> Json {
        if (z.fits_slong_p()) return z.get_si();
        return z.get_str();
    };
    j["num"] = part(r.get_num());
    j["den"] = part(r.get_den());
    return j;
}

Rational rational_from_json(const Json& j)
{
    auto part = [&](const char* key) -> std::string {
        const Json& v = j.at(key);
        return v.is_string() ? v.get<std::string>() : std::to_string(v.get<long long>());
    };
    auto r = parse_rational(part("num") + "/" + part("den"));
    if (!r) throw Error(ErrorKind::Input, "malformed rational in JSON");
    return *r;
}

Json to_json(const Distribution& d)
{
    Json out = Json::array();
    for (const auto& [t, w] : d.weights()) out.push_back({{"term", to_string(t)}, {"weight", to_json(w)}});
    return out;
}

Json to_json(const Literal& l)
{
    Json j;
    j["source"] = to_string(l.source);
    j["action"] = l.action;
    j["positive"] = l.positive();
    if (l.positive()) j["target"] = to_string(l.target);
    return j;
}

Json to_json(const LiteralRule& r)
{
    Json j;
    Json ps = Json::array();
    for (const auto& p : r.premises) ps.push_back(to_json(p));
    j["premises"] = ps;
    j["conclusion"] = to_json(r.conclusion);
    j["text"] = to_string(r);
    return j;
}

Json to_json(const DistOverTerms& l)
{
    Json j;
    j["source"] = to_string(l.source);
    Json bs = Json::array();
    for (const auto& [q, t] : l.branches) bs.push_back({{"weight", to_json(q)}, {"target", to_string(t)}});
    j["branches"] = bs;
    return j;
}

namespace {
const char* kind_name(DistRuleKind k)
{
    switch (k) {
    case DistRuleKind::Axiom: return "axiom";
    case DistRuleKind::Lift: return "lift";
    case DistRuleKind::Convex: return "convex";
    }
    return "?";
}
} // namespace

Json to_json(const DistRule& r)
{
    Json j;
    j["rule"] = kind_name(r.kind);
    if (r.kind == DistRuleKind::Lift) j["operator"] = r.op.display();
    if (r.kind == DistRuleKind::Convex) {
        Json ws = Json::array();
        for (const auto& w : r.convex_weights) ws.push_back(to_json(w));
        j["weights"] = ws;
    }
    Json ps = Json::array();
    for (const auto& p : r.premises) ps.push_back(to_json(p));
    j["premises"] = ps;
    j["conclusion"] = to_json(r.conclusion);
    return j;
}

Json to_json(const ProofNode& p)
{
    Json j;
    j["rule"] = to_json(p.rule);
    j["substitution"] = to_json(p.sigma);
    j["instance"] = to_json(p.instance.conclusion);
    Json cs = Json::array();
    for (const auto& c : p.children) cs.push_back(to_json(c));
    j["children"] = cs;
    return j;
}

Json to_json(const DistRuloid& r)
{
    Json j;
    Json ps = Json::array();
    for (const auto& p : r.premises) ps.push_back(to_json(p));
    j["premises"] = ps;
    j["conclusion"] = to_json(r.conclusion);
    return j;
}

Json to_json(const Substitution& s)
{
    Json j = Json::object();
    for (const auto& [x, t] : s.states()) j[x] = to_string(t);
    for (const auto& [mu, d] : s.dists()) j[mu] = to_string(d);
    return j;
}

Json to_json(const StateMapping& m)
{
    Json j = Json::object();
    for (const auto& [x, f] : m) j[x] = to_string(f);
    return j;
}

Json to_json(const DistMapping& m)
{
    Json j = Json::object();
    for (const auto& [mu, d] : m.dist) j[mu] = to_string(d);
    for (const auto& [x, f] : m.state) j[x] = to_string(f);
    return j;
}

Json relation_json(const Pts& pts, const RefinementTrace& trace)
{
    Json out = Json::array();
    for (std::size_t s = 0; s < pts.size(); ++s)
        for (std::size_t t = 0; t < pts.size(); ++t)
            if (trace.related(s, t)) out.push_back({to_string(pts.state(s)), to_string(pts.state(t))});
    return out;
}

Json partition_json(const Pts& pts, const RefinementTrace& trace)
{
    Json out = Json::array();
    std::vector<char> done(pts.size(), 0);
    for (std::size_t s = 0; s < pts.size(); ++s) {
        if (done[s]) continue;
        Json block = Json::array();
        for (std::size_t t = s; t < pts.size(); ++t)
            if (!done[t] && trace.related(s, t) && trace.related(t, s)) {
                done[t] = 1;
                block.push_back(to_string(pts.state(t)));
            }
        out.push_back(block);
    }
    return out;
}

Json to_json(const Pts& pts)
{
    Json j;
    j["actions"] = pts.action_list();
    Json states = Json::array();
    for (Term t : pts.states()) states.push_back(to_string(t));
    j["states"] = states;
    Json tr = Json::array();
    for (std::size_t s = 0; s < pts.size(); ++s)
        for (std::size_t a = 0; a < pts.action_list().size(); ++a) {
            if (!pts.explored(s, a)) continue;
            for (const auto& d : pts.successors(s, a)) {
                Json dj = Json::array();
                for (const auto& [u, w] : d) dj.push_back({{"state", to_string(pts.state(u))}, {"weight", to_json(w)}});
                tr.push_back({{"source", to_string(pts.state(s))}, {"action", pts.action_list()[a]}, {"target", dj}});
            }
        }
    j["transitions"] = tr;
    return j;
}

} // namespace rforge
