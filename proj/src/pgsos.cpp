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

#include "rforge/pgsos.hpp"

#include <algorithm>
#include <set>

namespace rforge {

int compare(const Literal& a, const Literal& b)
{
    if (int c = compare(a.source, b.source)) return c;
    if (int c = a.action.compare(b.action)) return c < 0 ? -1 : 1;
    if (a.positive() != b.positive()) return a.positive() ? -1 : 1;
    if (a.positive()) return compare(a.target, b.target);
    return 0;
}

bool denies(const Literal& a, const Literal& b)
{
    return a.positive() && !b.positive() && a.source == b.source && a.action == b.action;
}

Literal opposite(const Literal& l, const std::string& fresh_dist_var)
{
    if (l.positive()) return Literal::neg(l.source, l.action);
    return Literal::pos(l.source, l.action, DistTerm::var(fresh_dist_var));
}

std::string to_string(const Literal& l)
{
    std::string out = to_string(l.source) + " -" + l.action;
    if (l.positive()) return out + "-> " + to_string(l.target);
    return out + "-|";
}

bool LiteralRule::is_positive() const
{
    return std::all_of(premises.begin(), premises.end(), [](const Literal& l) { return l.positive(); });
}

bool LiteralRule::contradictory() const
{
    for (const auto& p : premises)
        for (const auto& q : premises)
            if (denies(p, q)) return true;
    return false;
}

int compare(const LiteralRule& a, const LiteralRule& b)
{
    if (int c = compare(a.conclusion, b.conclusion)) return c;
    if (a.premises.size() != b.premises.size()) return a.premises.size() < b.premises.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.premises.size(); ++i)
        if (int c = compare(a.premises[i], b.premises[i])) return c;
    return 0;
}

std::string to_string(const LiteralRule& r)
{
    std::string out;
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
        if (i) out += ", ";
        out += to_string(r.premises[i]);
    }
    return out + (out.empty() ? "=> " : " => ") + to_string(r.conclusion);
}

LiteralRule canonical(const LiteralRule& r, RenameScope scope)
{
    Renamer ren(scope);
    ren.visit(r.conclusion.source);
    if (r.conclusion.positive()) ren.visit(r.conclusion.target);

    // Premise sources first, then remaining targets grouped by (source, action).
    std::vector<const Literal*> order;
    for (const auto& p : r.premises) {
        ren.visit(p.source);
        order.push_back(&p);
    }
    auto key_less = [&](const Literal* a, const Literal* b) {
        Term sa = ren.apply(a->source), sb = ren.apply(b->source);
        if (int c = compare(sa, sb)) return c < 0;
        if (a->action != b->action) return a->action < b->action;
        return a->positive() && !b->positive();
    };
    std::stable_sort(order.begin(), order.end(), key_less);
    for (const Literal* p : order)
        if (p->positive()) ren.visit(p->target);

    Substitution s = ren.substitution();
    LiteralRule out;
    out.conclusion = r.conclusion;
    out.conclusion.source = apply(s, r.conclusion.source);
    if (r.conclusion.positive()) out.conclusion.target = apply(s, r.conclusion.target);
    for (const auto& p : r.premises) {
        Literal q = p;
        q.source = apply(s, p.source);
        if (p.positive()) q.target = apply(s, p.target);
        out.premises.push_back(q);
    }
    std::sort(out.premises.begin(), out.premises.end());
    out.premises.erase(std::unique(out.premises.begin(), out.premises.end()), out.premises.end());
    return out;
}

bool alpha_equivalent(const LiteralRule& a, const LiteralRule& b, RenameScope scope)
{
    return canonical(a, scope) == canonical(b, scope);
}

static void check_ops(const Signature& sig, Term t)
{
    if (t.is_var()) return;
    if (!sig.contains(t.op())) throw Error(ErrorKind::UnknownOperator, "undeclared operator " + t.op().display());
    for (Term a : t.args()) check_ops(sig, a);
}

static void check_ops(const Signature& sig, DistTerm d)
{
    switch (d.kind()) {
    case DistTerm::Kind::Var: return;
    case DistTerm::Kind::Dirac: check_ops(sig, d.term()); return;
    case DistTerm::Kind::Lift:
        if (!sig.contains(d.op())) throw Error(ErrorKind::UnknownOperator, "undeclared operator " + d.op().display());
        break;
    case DistTerm::Kind::Convex: break;
    }
    for (DistTerm a : d.args()) check_ops(sig, a);
}

PgsosRule PgsosRule::validate(const Signature& sig, const LiteralRule& c)
{
    const Literal& concl = c.conclusion;
    if (!concl.positive()) throw ValidationError("NegativeConclusion", "conclusion must be a positive literal");
    if (concl.source.is_var())
        throw ValidationError("NonOperatorSource", "conclusion source must be an operator application");
    check_ops(sig, concl.source);
    if (!sig.has_action(concl.action)) throw ValidationError("UnknownAction", "undeclared action " + concl.action);

    PgsosRule r;
    r.op_ = concl.source.op();
    r.action_ = concl.action;
    r.target_ = concl.target;
    std::set<std::string> xs;
    for (Term a : concl.source.args()) {
        if (!a.is_var()) throw ValidationError("NonVariableSourceArg", "conclusion source arguments must be variables");
        if (!xs.insert(a.name()).second)
            throw ValidationError("DuplicateSourceVar", "source variable " + a.name() + " repeated");
        r.source_vars_.push_back(a.name());
    }
    auto arg_index = [&](const std::string& x) {
        return static_cast<std::size_t>(std::find(r.source_vars_.begin(), r.source_vars_.end(), x) -
                                        r.source_vars_.begin());
    };

    std::set<std::string> mus;
    for (const auto& p : c.premises) {
        if (!p.source.is_var())
            throw ValidationError("NonVariablePremiseSource", "premise source " + to_string(p.source) + " is not a variable");
        if (!xs.count(p.source.name()))
            throw ValidationError("UnboundPremiseSource", "premise source " + p.source.name() + " is not a source argument");
        if (!sig.has_action(p.action)) throw ValidationError("UnknownAction", "undeclared action " + p.action);
        if (p.positive()) {
            if (p.target.kind() != DistTerm::Kind::Var)
                throw ValidationError("NonVariablePremiseTarget", "premise target must be a distribution variable");
            const std::string& mu = p.target.name();
            if (xs.count(mu))
                throw ValidationError("SortClash", mu + " used both as state and distribution variable");
            if (!mus.insert(mu).second)
                throw ValidationError("DuplicateDistVar", "distribution variable " + mu + " repeated");
            r.positives_.push_back({arg_index(p.source.name()), p.action, mu});
        } else {
            r.negatives_.push_back({arg_index(p.source.name()), p.action});
        }
    }

    check_ops(sig, concl.target);
    VarSet tv = vars(concl.target);
    for (const auto& x : tv.state)
        if (!xs.count(x)) throw ValidationError("UnboundTargetVar", "target state variable " + x + " not in source");
    for (const auto& m : tv.dist)
        if (!mus.count(m)) throw ValidationError("UnboundTargetVar", "target distribution variable " + m + " not bound by a premise");
    return r;
}

Term PgsosRule::source() const
{
    std::vector<Term> args;
    for (const auto& x : source_vars_) args.push_back(Term::var(x));
    return Term::app(op_, std::move(args));
}

LiteralRule PgsosRule::as_literal_rule() const
{
    LiteralRule out;
    for (const auto& p : positives_)
        out.premises.push_back(Literal::pos(Term::var(source_vars_[p.arg]), p.action, DistTerm::var(p.dist_var)));
    for (const auto& n : negatives_) out.premises.push_back(Literal::neg(Term::var(source_vars_[n.arg]), n.action));
    out.conclusion = Literal::pos(source(), action_, target_);
    return out;
}

PtsSpec::PtsSpec(Signature sig, std::vector<PgsosRule> rules) : sig_(std::move(sig)), rules_(std::move(rules))
{
    reindex();
}

void PtsSpec::reindex()
{
    index_.clear();
    for (const auto& r : rules_) index_[r.op()][r.action()].push_back(&r);
}

const std::vector<const PgsosRule*>& PtsSpec::rules_for(Op op, const std::string& action) const
{
    static const std::vector<const PgsosRule*> none;
    auto it = index_.find(op);
    if (it == index_.end()) return none;
    auto jt = it->second.find(action);
    return jt == it->second.end() ? none : jt->second;
}

bool PtsSpec::is_positive() const
{
    return std::all_of(rules_.begin(), rules_.end(), [](const PgsosRule& r) { return r.is_positive(); });
}

} // namespace rforge
