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

#include "rforge/syntax.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rforge {

namespace {

enum class Tok {
    End,
    Ident,
    Number,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Star,
    Plus,
    Slash,
    Eq,
    Minus,
    Arrow,
    Block,
    Implies,
    Lt,
    Gt,
};

const char* describe(Tok t)
{
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Star: return "'*'";
    case Tok::Plus: return "'+'";
    case Tok::Slash: return "'/'";
    case Tok::Eq: return "'='";
    case Tok::Minus: return "'-'";
    case Tok::Arrow: return "'->'";
    case Tok::Block: return "'-|'";
    case Tok::Implies: return "'=>'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80; }

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0, line = 1, col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        unsigned char c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.span = Span{line, col, i, 1};
        std::size_t n = 1;
        if (ident_start(c)) {
            while (i + n < src.size() && ident_char(static_cast<unsigned char>(src[i + n]))) ++n;
            t.kind = Tok::Ident;
        } else if (std::isdigit(c)) {
            while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
            t.kind = Tok::Number;
        } else {
            char d = i + 1 < src.size() ? src[i + 1] : '\0';
            switch (c) {
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '[': t.kind = Tok::LBrack; break;
            case ']': t.kind = Tok::RBrack; break;
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case ',': t.kind = Tok::Comma; break;
            case ';': t.kind = Tok::Semi; break;
            case ':': t.kind = Tok::Colon; break;
            case '*': t.kind = Tok::Star; break;
            case '+': t.kind = Tok::Plus; break;
            case '/': t.kind = Tok::Slash; break;
            case '<': t.kind = Tok::Lt; break;
            case '>': t.kind = Tok::Gt; break;
            case '=':
                if (d == '>') {
                    t.kind = Tok::Implies;
                    n = 2;
                } else {
                    t.kind = Tok::Eq;
                }
                break;
            case '-':
                if (d == '>') {
                    t.kind = Tok::Arrow;
                    n = 2;
                } else if (d == '|') {
                    t.kind = Tok::Block;
                    n = 2;
                } else {
                    t.kind = Tok::Minus;
                }
                break;
            default: throw SyntaxError(t.span, std::string("unexpected character '") + static_cast<char>(c) + "'");
            }
        }
        t.text = std::string(src.substr(i, n));
        t.span.length = n;
        advance(n);
        out.push_back(std::move(t));
    }
    Token end;
    end.span = Span{line, col, i, 0};
    out.push_back(end);
    return out;
}

const std::set<std::string> keywords{"tt", "neg", "bar", "and", "oplus", "dirac", "actions", "op", "states"};

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k)
    {
        if (!at(k)) return false;
        take();
        return true;
    }
    const Token& expect(Tok k, const char* what = nullptr)
    {
        if (!at(k))
            throw SyntaxError(peek().span, std::string("expected ") + (what ? what : describe(k)) + ", found " +
                                               (at(Tok::End) ? "end of input" : "'" + peek().text + "'"));
        return take();
    }
    void expect_word(std::string_view w)
    {
        if (!at_word(w)) throw SyntaxError(peek().span, "expected '" + std::string(w) + "'");
        take();
    }
    std::string name()
    {
        const Token& t = expect(Tok::Ident);
        if (keywords.count(t.text)) throw SyntaxError(t.span, "reserved word '" + t.text + "' used as a name");
        return t.text;
    }
    void finish() { expect(Tok::End); }

    Rational rational()
    {
        const Token& n = expect(Tok::Number, "rational");
        std::string text = n.text;
        if (accept(Tok::Slash)) text += "/" + expect(Tok::Number).text;
        auto r = parse_rational(text);
        if (!r) throw SyntaxError(n.span, "malformed rational '" + text + "'");
        return *r;
    }

    std::vector<Rational> params()
    {
        std::vector<Rational> ps;
        if (!accept(Tok::LBrack)) return ps;
        ps.push_back(rational());
        while (accept(Tok::Comma)) ps.push_back(rational());
        expect(Tok::RBrack);
        return ps;
    }

    Op resolve(const TermContext& ctx, const Token& at_tok, const std::string& nm, const std::vector<Rational>& ps,
               std::size_t rank)
    {
        if (!ctx.sig) return Op::make(nm, ps, static_cast<unsigned>(rank));
        Op op = ctx.sig->find(nm, ps);
        if (!op.valid()) {
            std::string shown = nm;
            if (!ps.empty()) shown = Op::make(nm, ps, static_cast<unsigned>(rank)).display();
            throw SyntaxError(at_tok.span, "unknown operator '" + shown + "'");
        }
        if (op.rank() != rank)
            throw SyntaxError(at_tok.span, "operator '" + op.display() + "' expects " + std::to_string(op.rank()) +
                                               " arguments, got " + std::to_string(rank));
        return op;
    }

    // Declared or inferred nullary operator for a bare identifier.
    std::optional<Op> bare_constant(const TermContext& ctx, const std::string& nm)
    {
        if (ctx.sig) {
            Op op = ctx.sig->find(nm, {});
            if (op.valid() && op.rank() == 0) return op;
            return std::nullopt;
        }
        if (ctx.bare_constants) return Op::make(nm, {}, 0);
        return std::nullopt;
    }

    Term term(const TermContext& ctx)
    {
        const Token& head = peek();
        std::string nm = name();
        std::vector<Rational> ps = params();
        if (accept(Tok::LParen)) {
            std::vector<Term> args;
            if (!at(Tok::RParen)) {
                args.push_back(term(ctx));
                while (accept(Tok::Comma)) args.push_back(term(ctx));
            }
            expect(Tok::RParen);
            Op op = resolve(ctx, head, nm, ps, args.size());
            return Term::app(op, std::move(args));
        }
        if (!ps.empty()) return Term::constant(resolve(ctx, head, nm, ps, 0));
        if (auto c = bare_constant(ctx, nm)) return Term::constant(*c);
        return Term::var(nm);
    }

    DistTerm dist_atom(const TermContext& ctx)
    {
        if (accept(Tok::LParen)) {
            DistTerm d = dist_term(ctx);
            expect(Tok::RParen);
            return d;
        }
        if (at_word("dirac")) {
            take();
            expect(Tok::LParen);
            Term t = term(ctx);
            expect(Tok::RParen);
            return DistTerm::dirac(t);
        }
        const Token& head = peek();
        std::string nm = name();
        std::vector<Rational> ps = params();
        if (accept(Tok::LParen)) {
            std::vector<DistTerm> args;
            if (!at(Tok::RParen)) {
                args.push_back(dist_term(ctx));
                while (accept(Tok::Comma)) args.push_back(dist_term(ctx));
            }
            expect(Tok::RParen);
            Op op = resolve(ctx, head, nm, ps, args.size());
            return DistTerm::lift(op, std::move(args));
        }
        if (!ps.empty()) return DistTerm::lift(resolve(ctx, head, nm, ps, 0), {});
        if (auto c = bare_constant(ctx, nm)) return DistTerm::lift(*c, {});
        return DistTerm::var(nm);
    }

    DistTerm dist_term(const TermContext& ctx)
    {
        const Span start = peek().span;
        std::vector<std::pair<Rational, DistTerm>> parts;
        bool weighted = false, unweighted = false;
        do {
            if (at(Tok::Number)) {
                Rational w = rational();
                expect(Tok::Star);
                parts.emplace_back(w, dist_atom(ctx));
                weighted = true;
            } else {
                parts.emplace_back(Rational(1), dist_atom(ctx));
                unweighted = true;
            }
        } while (accept(Tok::Plus));
        if (!weighted) return parts[0].second;
        if (unweighted) throw SyntaxError(start, "every summand of a convex combination needs a weight");
        try {
            return DistTerm::convex(std::move(parts));
        } catch (const ValidationError& e) {
            throw SyntaxError(start, e.what());
        }
    }

    Formula formula()
    {
        const Token& t = peek();
        if (at(Tok::Lt)) {
            take();
            std::string a = name();
            expect(Tok::Gt);
            return Formula::diam(a, dist_formula());
        }
        if (!at(Tok::Ident)) throw SyntaxError(t.span, "expected a formula");
        if (t.text == "tt") {
            take();
            return Formula::top();
        }
        if (t.text == "neg") {
            take();
            return Formula::neg(formula());
        }
        if (t.text == "bar") {
            take();
            return Formula::cannot(name());
        }
        if (t.text == "and") {
            take();
            expect(Tok::LBrace);
            std::vector<Formula> fs;
            if (!at(Tok::RBrace)) {
                fs.push_back(formula());
                while (accept(Tok::Comma)) fs.push_back(formula());
            }
            expect(Tok::RBrace);
            return Formula::conj(std::move(fs));
        }
        throw SyntaxError(t.span, "expected a formula, found '" + t.text + "'");
    }

    DistFormula dist_formula()
    {
        if (!at_word("oplus")) return DistFormula::unit(formula());
        take();
        const Span start = expect(Tok::LBrace).span;
        std::vector<std::pair<Rational, Formula>> bs;
        do {
            Rational r = rational();
            expect(Tok::Colon);
            bs.emplace_back(r, formula());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
        try {
            return DistFormula::make(std::move(bs));
        } catch (const Error& e) {
            throw SyntaxError(start, e.what());
        }
    }

    std::vector<std::pair<Term, Rational>> weighted_terms(const TermContext& ctx, const Span& start)
    {
        std::vector<std::pair<Term, Rational>> out;
        std::set<Term, TermLess> seen;
        expect(Tok::LBrace);
        Rational sum = 0;
        do {
            const Span at_span = peek().span;
            Term t = term(ctx);
            if (!t.closed()) throw SyntaxError(at_span, "term " + to_string(t) + " is not closed");
            if (!seen.insert(t).second) throw SyntaxError(at_span, "target " + to_string(t) + " repeated");
            expect(Tok::Colon);
            const Span w_span = peek().span;
            Rational w = rational();
            if (!is_probability(w)) throw SyntaxError(w_span, "weight " + to_string(w) + " not in (0,1]");
            sum += w;
            out.emplace_back(t, w);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
        if (sum != 1) throw SyntaxError(start, "weights sum to " + to_string(sum));
        return out;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string strip_constraint(const ValidationError& e)
{
    std::string w = e.what();
    std::string prefix = e.constraint() + ": ";
    if (w.compare(0, prefix.size(), prefix) == 0) return w.substr(prefix.size());
    return w;
}

} // namespace

PtsSpec parse_spec(std::string_view text)
{
    Parser p(text);
    Signature sig;
    std::vector<PgsosRule> rules;
    TermContext ctx{&sig, false};
    while (!p.at(Tok::End)) {
        if (p.accept(Tok::Semi)) continue;
        if (p.at_word("actions")) {
            p.take();
            do {
                const Token& t = p.peek();
                std::string a = p.name();
                if (sig.has_action(a)) throw SyntaxError(t.span, "action '" + a + "' declared twice");
                sig.add_action(a);
            } while (p.accept(Tok::Comma));
            p.expect(Tok::Semi);
            continue;
        }
        if (p.at_word("op")) {
            p.take();
            const Token& t = p.peek();
            std::string nm = p.name();
            std::vector<Rational> ps = p.params();
            p.expect(Tok::Slash, "'/' and arity");
            const Token& n = p.expect(Tok::Number, "arity");
            unsigned rank = static_cast<unsigned>(std::stoul(n.text));
            p.expect(Tok::Semi);
            try {
                sig.add_operator(nm, ps, rank);
            } catch (const Error& e) {
                throw SyntaxError(t.span, e.what());
            }
            continue;
        }
        const Span start = p.peek().span;
        LiteralRule r;
        if (!p.at(Tok::Implies)) {
            do {
                Term src = p.term(ctx);
                p.expect(Tok::Minus, "'-action->' or '-action-|'");
                std::string a = p.name();
                if (p.accept(Tok::Block)) {
                    r.premises.push_back(Literal::neg(src, a));
                } else {
                    p.expect(Tok::Arrow, "'->' or '-|'");
                    r.premises.push_back(Literal::pos(src, a, DistTerm::var(p.name())));
                }
            } while (p.accept(Tok::Comma));
        }
        p.expect(Tok::Implies);
        Term src = p.term(ctx);
        p.expect(Tok::Minus, "'-action->'");
        std::string a = p.name();
        p.expect(Tok::Arrow);
        DistTerm target = p.dist_term(ctx);
        p.expect(Tok::Semi);
        r.conclusion = Literal::pos(src, a, target);
        try {
            rules.push_back(PgsosRule::validate(sig, r));
        } catch (const ValidationError& e) {
            throw ValidationError(e.constraint(), strip_constraint(e), start);
        }
    }
    return PtsSpec(std::move(sig), std::move(rules));
}

Term parse_term(std::string_view text, const TermContext& ctx)
{
    Parser p(text);
    Term t = p.term(ctx);
    p.finish();
    return t;
}

DistTerm parse_dist_term(std::string_view text, const TermContext& ctx)
{
    Parser p(text);
    DistTerm d = p.dist_term(ctx);
    p.finish();
    return d;
}

Formula parse_formula(std::string_view text)
{
    Parser p(text);
    Formula f = p.formula();
    p.finish();
    return f;
}

DistFormula parse_dist_formula(std::string_view text)
{
    Parser p(text);
    DistFormula d = p.dist_formula();
    p.finish();
    return d;
}

Pts parse_pts(std::string_view text)
{
    Parser p(text);
    Pts pts;
    std::vector<std::string> actions;
    std::map<std::string, Term> states;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<IndexDist>> succ;
    TermContext ctx{nullptr, true};
    while (!p.at(Tok::End)) {
        if (p.accept(Tok::Semi)) continue;
        if (p.at_word("actions")) {
            p.take();
            do {
                const Token& t = p.peek();
                std::string a = p.name();
                if (pts.action_index(a)) throw SyntaxError(t.span, "action '" + a + "' declared twice");
                pts.add_action(a);
            } while (p.accept(Tok::Comma));
            p.expect(Tok::Semi);
            continue;
        }
        if (p.at_word("states")) {
            p.take();
            do {
                const Token& t = p.peek();
                std::string s = p.name();
                if (states.count(s)) throw SyntaxError(t.span, "state '" + s + "' declared twice");
                Term c = Term::constant(Op::make(s, {}, 0));
                states.emplace(s, c);
                pts.add_state(c);
            } while (p.accept(Tok::Comma));
            p.expect(Tok::Semi);
            continue;
        }
        const Token& st = p.peek();
        std::string s = p.name();
        if (!states.count(s)) throw SyntaxError(st.span, "undeclared state '" + s + "'");
        p.expect(Tok::Minus, "'-action->'");
        const Token& at = p.peek();
        std::string a = p.name();
        auto ai = pts.action_index(a);
        if (!ai) throw SyntaxError(at.span, "undeclared action '" + a + "'");
        p.expect(Tok::Arrow);
        const Span dspan = p.peek().span;
        auto ws = p.weighted_terms(ctx, dspan);
        IndexDist d;
        for (const auto& [t, w] : ws) {
            if (!states.count(to_string(t)) || !t.args().empty())
                throw SyntaxError(dspan, "undeclared state '" + to_string(t) + "'");
            d.emplace_back(*pts.find(t), w);
        }
        std::sort(d.begin(), d.end());
        p.expect(Tok::Semi);
        succ[{*pts.find(states.at(s)), *ai}].push_back(std::move(d));
    }
    for (std::size_t s = 0; s < pts.size(); ++s)
        for (std::size_t a = 0; a < pts.action_list().size(); ++a) {
            auto it = succ.find({s, a});
            pts.set_successors(s, a, it == succ.end() ? std::vector<IndexDist>{} : std::move(it->second));
        }
    return pts;
}

Shapes parse_shapes(std::string_view text)
{
    Parser p(text);
    Shapes out;
    while (!p.at(Tok::End)) {
        const Token& t = p.peek();
        std::string mu = p.name();
        if (out.count(mu)) throw SyntaxError(t.span, "shape for '" + mu + "' given twice");
        p.expect(Tok::Colon);
        std::vector<Rational> ws;
        Rational sum = 0;
        do {
            const Span ws_span = p.peek().span;
            Rational w = p.rational();
            if (!is_probability(w)) throw SyntaxError(ws_span, "weight " + to_string(w) + " not in (0,1]");
            sum += w;
            ws.push_back(w);
        } while (p.accept(Tok::Comma));
        if (sum != 1) throw SyntaxError(t.span, "shape for '" + mu + "' sums to " + to_string(sum));
        out.emplace(mu, std::move(ws));
        if (!p.accept(Tok::Semi)) break;
    }
    p.finish();
    return out;
}

std::vector<std::pair<Rational, Term>> parse_weighted_terms(std::string_view text, const TermContext& ctx)
{
    Parser p(text);
    auto ws = p.weighted_terms(ctx, p.peek().span);
    p.finish();
    std::vector<std::pair<Rational, Term>> out;
    for (auto& [t, w] : ws) out.emplace_back(w, t);
    return out;
}

Substitution parse_substitution(std::string_view text, const TermContext& ctx)
{
    Parser p(text);
    Substitution s;
    std::set<std::string> seen;
    while (!p.at(Tok::End)) {
        const Token& t = p.peek();
        std::string x = p.name();
        if (!seen.insert(x).second) throw SyntaxError(t.span, "variable '" + x + "' bound twice");
        p.expect(Tok::Eq);
        if (p.at(Tok::LBrace)) {
            Distribution d;
            for (const auto& [u, w] : p.weighted_terms(ctx, p.peek().span)) d.add(u, w);
            s.bind_dist(x, d.to_dist_term());
        } else {
            const Span vspan = p.peek().span;
            Term u = p.term(ctx);
            if (!u.closed()) throw SyntaxError(vspan, "value of '" + x + "' is not closed");
            s.bind_state(x, u);
        }
        if (!p.accept(Tok::Comma)) break;
    }
    p.finish();
    return s;
}

std::string print_spec(const PtsSpec& spec)
{
    std::ostringstream out;
    const Signature& sig = spec.signature();
    if (!sig.actions().empty()) {
        out << "actions ";
        for (std::size_t i = 0; i < sig.actions().size(); ++i) out << (i ? ", " : "") << sig.actions()[i];
        out << ";\n";
    }
    for (Op op : sig.operators()) out << "op " << op.display() << "/" << op.rank() << ";\n";
    for (const auto& r : spec.rules()) out << to_string(r.as_literal_rule()) << ";\n";
    return out.str();
}

std::string print_pts(const Pts& pts)
{
    std::ostringstream out;
    out << "actions ";
    for (std::size_t i = 0; i < pts.action_list().size(); ++i) out << (i ? ", " : "") << pts.action_list()[i];
    out << ";\nstates ";
    for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? ", " : "") << to_string(pts.state(i));
    out << ";\n";
    for (std::size_t s = 0; s < pts.size(); ++s)
        for (std::size_t a = 0; a < pts.action_list().size(); ++a) {
            if (!pts.explored(s, a)) continue;
            for (const auto& d : pts.successors(s, a)) {
                out << to_string(pts.state(s)) << " -" << pts.action_list()[a] << "-> {";
                for (std::size_t j = 0; j < d.size(); ++j)
                    out << (j ? ", " : "") << to_string(pts.state(d[j].first)) << ": " << to_string(d[j].second);
                out << "};\n";
            }
        }
    return out.str();
}

std::string print_shapes(const Shapes& shapes)
{
    std::string out;
    for (const auto& [mu, ws] : shapes) {
        if (!out.empty()) out += "; ";
        out += mu + ": ";
        for (std::size_t i = 0; i < ws.size(); ++i) out += (i ? ", " : "") + to_string(ws[i]);
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Input, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace rforge
