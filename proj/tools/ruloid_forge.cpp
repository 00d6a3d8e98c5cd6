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

#include "rforge/harness.hpp"
#include "rforge/syntax.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace rforge;

namespace {

enum Exit { Ok = 0, Counterexample = 1, InputError = 2, BudgetExceeded = 3 };

bool json_out = false;

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// Argument text, or the contents of the file it names.
std::string text_or_file(const std::string& arg)
{
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return read_file(arg);
    return arg;
}

bool has_extension(const std::string& path, const char* ext)
{
    return std::filesystem::path(path).extension() == ext;
}

PtsSpec load_spec(const std::string& path)
{
    try {
        return parse_spec(read_file(path));
    } catch (const SyntaxError& e) {
        throw SyntaxError(e.span(), path + ": " + e.message());
    }
}

Term closed_term(const std::string& text, const Signature& sig)
{
    Term t = parse_term(text, TermContext{&sig, false});
    if (!t.closed()) throw Error(ErrorKind::NonClosed, "term " + to_string(t) + " is not closed");
    return t;
}

std::string rule_block(const std::vector<std::string>& premises, const std::string& conclusion, const std::string& label,
                       const std::string& indent = "")
{
    std::string top;
    for (const auto& p : premises) top += (top.empty() ? "" : "    ") + p;
    std::size_t width = std::max({top.size(), conclusion.size(), std::size_t(4)});
    std::string out;
    if (!top.empty()) out += indent + top + "\n";
    out += indent + std::string(width, '-') + (label.empty() ? "" : "  " + label) + "\n";
    out += indent + conclusion + "\n";
    return out;
}

std::string pretty(const LiteralRule& r)
{
    std::vector<std::string> ps;
    for (const auto& p : r.premises) ps.push_back(to_string(p));
    return rule_block(ps, to_string(r.conclusion), "");
}

std::string rule_label(const DistRule& r)
{
    switch (r.kind) {
    case DistRuleKind::Axiom: return "(dirac)";
    case DistRuleKind::Lift: return "(lift " + r.op.display() + ")";
    case DistRuleKind::Convex: {
        std::string w;
        for (const auto& q : r.convex_weights) w += (w.empty() ? "" : ",") + to_string(q);
        return "(convex " + w + ")";
    }
    }
    return {};
}

void pretty_proof(const ProofNode& p, std::size_t depth, std::string& out)
{
    for (const auto& c : p.children) pretty_proof(c, depth + 1, out);
    std::vector<std::string> ps;
    for (const auto& q : p.instance.premises) ps.push_back(to_string(q));
    out += rule_block(ps, to_string(p.instance.conclusion), rule_label(p.rule), std::string(2 * depth, ' '));
    out += "\n";
}

int cmd_derive(const std::string& spec_path, const std::string& term)
{
    PtsSpec spec = load_spec(spec_path);
    Term t = closed_term(term, spec.signature());
    Semantics sem(spec);
    auto tr = sem.transitions(t);
    if (json_out) {
        Json j = envelope("transitions");
        j["term"] = to_string(t);
        Json arr = Json::array();
        for (const auto& [a, d] : tr) arr.push_back({{"action", a}, {"distribution", to_json(d)}});
        j["transitions"] = arr;
        emit(j);
    } else {
        for (const auto& [a, d] : tr) std::cout << to_string(t) << " -" << a << "-> " << to_string(d) << "\n";
        if (tr.empty()) std::cout << to_string(t) << " has no transitions\n";
    }
    return Ok;
}

int cmd_ruloids(const std::string& spec_path, const std::string& term, const std::string& action, bool keep)
{
    PtsSpec spec = load_spec(spec_path);
    Term t = parse_term(term, TermContext{&spec.signature(), false});
    if (!spec.signature().has_action(action)) throw Error(ErrorKind::Input, "unknown action " + action);
    RuloidOptions opts;
    opts.prune_contradictory = !keep;
    auto rs = derive_ruloids(spec, t, action, opts);
    if (json_out) {
        Json j = envelope("ruloids");
        j["term"] = to_string(t);
        j["action"] = action;
        Json arr = Json::array();
        for (const auto& r : rs) arr.push_back(to_json(r));
        j["ruloids"] = arr;
        emit(j);
    } else {
        std::cout << rs.size() << " ruloid" << (rs.size() == 1 ? "" : "s") << "\n\n";
        for (const auto& r : rs) std::cout << pretty(r) << "\n";
    }
    return Ok;
}

int cmd_dist_ruloids(const std::string& spec_path, const std::string& dterm, const std::string& shapes_text)
{
    PtsSpec spec = load_spec(spec_path);
    DistTerm theta = parse_dist_term(dterm, TermContext{&spec.signature(), false});
    Shapes shapes = parse_shapes(shapes_text);
    DistRuloid r = build_dist_ruloid(theta, shapes);
    if (json_out) {
        Json j = envelope("dist-ruloid");
        j["term"] = to_string(theta);
        j["ruloid"] = to_json(r);
        emit(j);
    } else {
        std::vector<std::string> ps;
        for (const auto& p : r.premises) ps.push_back(to_string(p));
        std::cout << rule_block(ps, to_string(r.conclusion), "");
    }
    return Ok;
}

TermContext closed_context(const std::optional<PtsSpec>& spec)
{
    if (spec) return TermContext{&spec->signature(), false};
    return TermContext{nullptr, true};
}

int cmd_eval_dist(const std::string& dterm, const std::optional<PtsSpec>& spec)
{
    DistTerm theta = parse_dist_term(dterm, closed_context(spec));
    Distribution d = eval_dist(theta);
    if (json_out) {
        Json j = envelope("distribution");
        j["term"] = to_string(theta);
        j["distribution"] = to_json(d);
        emit(j);
    } else {
        std::cout << to_string(d) << "\n";
    }
    return Ok;
}

int cmd_prove_dist(const std::string& dterm, const std::string& claim, const std::optional<PtsSpec>& spec)
{
    TermContext ctx = closed_context(spec);
    DistTerm theta = parse_dist_term(dterm, ctx);
    DistOverTerms l = DistOverTerms::make(theta, parse_weighted_terms(claim, ctx));
    ProofOutcome o = prove_dist(l);
    if (json_out) {
        Json j = envelope("proof");
        j["claim"] = to_json(l);
        j["provable"] = o.provable;
        if (o.proof) {
            j["nodes"] = o.proof->size();
            j["proof"] = to_json(*o.proof);
        } else {
            j["reason"] = o.reason;
            j["semantics"] = to_json(o.semantics);
        }
        emit(j);
    } else if (o.proof) {
        std::string out;
        pretty_proof(*o.proof, 0, out);
        std::cout << out << "proof with " << o.proof->size() << " nodes\n";
    } else {
        std::cout << "not provable: " << o.reason << "\n";
    }
    return o.provable ? Ok : Counterexample;
}

int cmd_check(const std::string& source, const std::string& term, const std::string& formula)
{
    Formula f = parse_formula(text_or_file(formula));
    bool sat = false;
    std::string shown;
    if (has_extension(source, ".pts")) {
        Pts pts = parse_pts(read_file(source));
        Term t = Term::constant(Op::make(term, {}, 0));
        if (!pts.find(t)) throw Error(ErrorKind::Input, "unknown state " + term);
        ModelChecker mc(pts);
        sat = mc.sat(t, f);
        shown = term;
    } else {
        PtsSpec spec = load_spec(source);
        Term t = closed_term(term, spec.signature());
        Semantics sem(spec);
        ModelChecker mc(sem);
        sat = mc.sat(t, f);
        shown = to_string(t);
    }
    if (json_out) {
        Json j = envelope("check");
        j["term"] = shown;
        j["formula"] = to_string(f);
        j["satisfied"] = sat;
        emit(j);
    } else {
        std::cout << shown << (sat ? " satisfies " : " does not satisfy ") << to_string(f) << "\n";
    }
    return sat ? Ok : Counterexample;
}

RelationKind relation_kind(const std::string& k)
{
    if (k == "bisim") return RelationKind::Bisimilarity;
    if (k == "sim") return RelationKind::Similarity;
    if (k == "ready") return RelationKind::ReadySimilarity;
    throw Error(ErrorKind::Input, "unknown relation kind " + k);
}

int cmd_equiv(const std::string& path, const std::string& kind, const std::vector<std::string>& pair)
{
    Pts pts = parse_pts(read_file(path));
    RefinementTrace tr = compute_relation(pts, relation_kind(kind));
    if (pair.empty()) {
        if (json_out) {
            Json j = envelope("relation");
            j["relation"] = to_string(tr.kind);
            j["rounds"] = tr.iterations();
            j["pairs"] = relation_json(pts, tr);
            if (tr.kind == RelationKind::Bisimilarity) j["blocks"] = partition_json(pts, tr);
            emit(j);
        } else {
            for (std::size_t s = 0; s < pts.size(); ++s) {
                std::cout << to_string(pts.state(s)) << ":";
                for (std::size_t t = 0; t < pts.size(); ++t)
                    if (tr.related(s, t)) std::cout << " " << to_string(pts.state(t));
                std::cout << "\n";
            }
        }
        return Ok;
    }
    auto state = [&](const std::string& n) {
        auto i = pts.find(Term::constant(Op::make(n, {}, 0)));
        if (!i) throw Error(ErrorKind::Input, "unknown state " + n);
        return *i;
    };
    std::size_t s = state(pair[0]), t = state(pair[1]);
    bool related = tr.related(s, t);
    std::optional<Formula> f;
    if (!related) f = distinguishing_formula(pts, tr, s, t);
    if (json_out) {
        Json j = envelope("distinguish");
        j["relation"] = to_string(tr.kind);
        j["pair"] = pair;
        j["related"] = related;
        if (f) j["formula"] = to_string(*f);
        emit(j);
    } else if (f) {
        std::cout << to_string(*f) << "\n";
    } else {
        std::cout << pair[0] << " and " << pair[1] << " are related by " << to_string(tr.kind) << "\n";
    }
    return Ok;
}

LogicClass logic_class(const std::string& c)
{
    if (c == "full") return LogicClass::Full;
    if (c == "ready") return LogicClass::Ready;
    if (c == "positive") return LogicClass::Positive;
    throw Error(ErrorKind::Input, "unknown class " + c);
}

int cmd_decompose(const std::string& spec_path, const std::string& term, const std::string& formula,
                  const std::string& cls, const std::string& guided, const DecompBounds& bounds)
{
    PtsSpec spec = load_spec(spec_path);
    TermContext ctx{&spec.signature(), false};
    Term t = parse_term(term, ctx);
    Formula f = parse_formula(text_or_file(formula));
    Decomposer dec(spec, logic_class(cls), bounds);
    if (!guided.empty()) {
        Substitution s = parse_substitution(guided, ctx);
        for (const auto& x : vars(t).state)
            if (!s.state(x)) throw Error(ErrorKind::Input, "substitution does not bind " + x);
        GuidedInfo info;
        auto m = dec.guided(t, f, s, &info);
        if (json_out) {
            Json j = envelope("guided-decomposition");
            j["term"] = to_string(t);
            j["formula"] = to_string(f);
            j["class"] = cls;
            j["satisfied"] = m.has_value();
            if (m) j["mapping"] = to_json(*m);
            emit(j);
        } else if (m) {
            std::cout << to_string(*m) << "\n";
        } else {
            std::cout << to_string(apply(s, t)) << " does not satisfy " << to_string(f) << "\n";
        }
        return m ? Ok : Counterexample;
    }
    const StateDecomposition& d = dec.state(t, f);
    if (json_out) {
        Json j = envelope("decomposition");
        j["term"] = to_string(t);
        j["formula"] = to_string(f);
        j["class"] = cls;
        j["bounds"] = {{"k", bounds.k}, {"d", bounds.d}, {"max_mappings", bounds.max_mappings}};
        j["truncated"] = d.truncated;
        Json arr = Json::array();
        for (const auto& m : d.mappings) arr.push_back(to_json(m));
        j["mappings"] = arr;
        emit(j);
    } else {
        for (const auto& m : d.mappings) std::cout << to_string(m) << "\n";
        std::cout << d.mappings.size() << " mapping" << (d.mappings.size() == 1 ? "" : "s") << " (k=" << bounds.k
                  << ", d=" << bounds.d << ")" << (d.truncated ? ", truncated by the mapping budget" : "") << "\n";
    }
    return d.truncated ? BudgetExceeded : Ok;
}

int cmd_verify(const std::string& spec_path, const std::string& theorem, const HarnessConfig& base,
               const std::string& output)
{
    auto th = theorem_from_string(theorem);
    if (!th) throw Error(ErrorKind::Input, "unknown theorem " + theorem);
    HarnessConfig cfg = base;
    std::optional<PtsSpec> spec;
    if (!spec_path.empty()) {
        spec = load_spec(spec_path);
        cfg.spec = &*spec;
    }
    Report rep = run_harness(*th, cfg);
    Json j = rep.to_json();
    if (!output.empty()) {
        std::ofstream out(output);
        if (!out) throw Error(ErrorKind::Input, "cannot write " + output);
        out << j.dump(2) << "\n";
    }
    if (json_out) {
        emit(j);
    } else {
        const Json& s = j["summary"];
        std::cout << to_string(*th) << ": " << s["cases"] << " cases, " << s["passed"] << " passed, " << s["failed"]
                  << " failed, " << s["skipped"] << " skipped, " << s["checks"] << " checks\n";
        for (const auto& c : rep.cases)
            if (c.verdict == CaseResult::Verdict::Fail)
                std::cout << "  case " << c.index << " (seed " << c.seed << "): " << c.reason << "\n";
    }
    return rep.ok() ? Ok : Counterexample;
}

int report_error(const Error& e)
{
    int code = e.kind() == ErrorKind::Budget ? BudgetExceeded : InputError;
    if (json_out) {
        Json j = envelope("error");
        j["error"] = to_string(e.kind());
        j["message"] = e.what();
        if (auto* se = dynamic_cast<const SyntaxError*>(&e)) j["span"] = {{"line", se->span().line}, {"column", se->span().column}};
        if (auto* ve = dynamic_cast<const ValidationError*>(&e)) {
            j["constraint"] = ve->constraint();
            if (ve->span()) j["span"] = {{"line", ve->span()->line}, {"column", ve->span()->column}};
        }
        emit(j);
    } else {
        std::cerr << "error: " << e.what() << "\n";
    }
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ruloid-forge: probabilistic GSOS specifications, ruloids and modal decomposition"};
    app.require_subcommand(1);
    app.add_flag("--json", json_out, "Machine-readable output");

    std::string spec, term, action, dterm, shapes, claim, formula, kind = "bisim", cls = "full", guided, theorem, output,
                                                                     spec_opt;
    std::vector<std::string> pair;
    bool keep = false;
    DecompBounds bounds{2, 2, 100000};
    HarnessConfig hc;
    hc.samples = 200;
    std::uint64_t replay = 0;

    auto* derive = app.add_subcommand("derive", "Transitions of a closed term");
    derive->add_option("SPEC", spec)->required();
    derive->add_option("TERM", term)->required();

    auto* ruloids = app.add_subcommand("ruloids", "Ruloids for a term and an action");
    ruloids->add_option("SPEC", spec)->required();
    ruloids->add_option("TERM", term)->required();
    ruloids->add_option("ACTION", action)->required();
    ruloids->add_flag("--keep-contradictory", keep, "Keep premise sets with x -b-> mu and x -b-|");

    auto* dist_ruloids = app.add_subcommand("dist-ruloids", "Distribution ruloid for given premise shapes");
    dist_ruloids->add_option("SPEC", spec)->required();
    dist_ruloids->add_option("DTERM", dterm)->required();
    dist_ruloids->add_option("--shapes", shapes, "e.g. \"mu: 1/4, 3/4; nu: 1/3, 2/3\"")->required();

    auto* eval = app.add_subcommand("eval-dist", "Distribution denoted by a closed distribution term");
    eval->add_option("DTERM", dterm)->required();
    eval->add_option("--spec", spec_opt, "Resolve operators against this specification");

    auto* prove = app.add_subcommand("prove-dist", "Proof of a distribution over terms");
    prove->add_option("DTERM", dterm)->required();
    prove->add_option("CLAIM", claim, "e.g. \"{t1: 1/10, t2: 9/10}\"")->required();
    prove->add_option("--spec", spec_opt, "Resolve operators against this specification");

    auto* check = app.add_subcommand("check", "Model check a formula");
    check->add_option("SOURCE", spec, "Specification (.pgsos) or explicit system (.pts)")->required();
    check->add_option("TERM", term)->required();
    check->add_option("FORMULA", formula, "Formula text or .mf file")->required();

    auto* equiv = app.add_subcommand("equiv", "Bisimilarity, similarity or ready similarity on an explicit system");
    equiv->add_option("PTS", spec)->required();
    equiv->add_option("--kind", kind)->check(CLI::IsMember({"bisim", "sim", "ready"}));
    equiv->add_option("--distinguish", pair, "Two states")->expected(2);

    auto* decompose = app.add_subcommand("decompose", "Decompose a formula over an open term");
    decompose->add_option("SPEC", spec)->required();
    decompose->add_option("TERM", term)->required();
    decompose->add_option("FORMULA", formula, "Formula text or .mf file")->required();
    decompose->add_option("--class", cls)->check(CLI::IsMember({"full", "ready", "positive"}));
    decompose->add_option("--guided", guided, "Closed substitution, e.g. \"x = c1, y = c2\"");
    decompose->add_option("-k", bounds.k, "Support bound of distribution shapes")->check(CLI::PositiveNumber);
    decompose->add_option("-d", bounds.d, "Denominator bound of distribution shapes")->check(CLI::PositiveNumber);
    decompose->add_option("--max-mappings", bounds.max_mappings)->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify", "Randomized verification harness");
    verify->add_option("SPEC", spec, "Specification; random specifications when omitted");
    verify->add_option("--theorem", theorem, "ruloid|dist-ruloid|decomposition|characterization|congruence|proof|invariants")
        ->required();
    verify->add_option("--samples", hc.samples)->check(CLI::PositiveNumber);
    verify->add_option("--seed", hc.seed);
    verify->add_option("--threads", hc.threads);
    verify->add_option("--replay", replay, "Run the single case with this seed");
    verify->add_option("-k", hc.bounds.k)->check(CLI::PositiveNumber);
    verify->add_option("-d", hc.bounds.d)->check(CLI::PositiveNumber);
    verify->add_option("--max-states", hc.max_states)->check(CLI::PositiveNumber);
    verify->add_option("--output", output, "Also write the JSON report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : InputError;
    }

    try {
        auto opt_spec = [&]() -> std::optional<PtsSpec> {
            if (spec_opt.empty()) return std::nullopt;
            return load_spec(spec_opt);
        };
        if (*derive) return cmd_derive(spec, term);
        if (*ruloids) return cmd_ruloids(spec, term, action, keep);
        if (*dist_ruloids) return cmd_dist_ruloids(spec, dterm, shapes);
        if (*eval) return cmd_eval_dist(dterm, opt_spec());
        if (*prove) return cmd_prove_dist(dterm, claim, opt_spec());
        if (*check) return cmd_check(spec, term, formula);
        if (*equiv) return cmd_equiv(spec, kind, pair);
        if (*decompose) return cmd_decompose(spec, term, formula, cls, guided, bounds);
        if (*verify) {
            if (verify->count("--replay")) hc.replay = replay;
            return cmd_verify(spec, theorem, hc, output);
        }
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        return report_error(Error(ErrorKind::Internal, e.what()));
    }
    return InputError;
}
