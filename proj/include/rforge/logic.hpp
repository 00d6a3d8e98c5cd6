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

#include "rforge/semantics.hpp"

#include <optional>
#include <unordered_map>

namespace rforge {

namespace detail {
struct FormulaNode;
struct DistFormulaNode;
} // namespace detail

class DistFormula;

// Hash-consed state formula.
class Formula {
public:
    enum class Kind { Top, Neg, Conj, Diam };

    Formula() = default;
    static Formula top();
    static Formula neg(Formula f);
    // Sorted and deduplicated; empty gives top, a single conjunct is returned as is.
    static Formula conj(std::vector<Formula> fs);
    static Formula diam(std::string_view a, DistFormula d);
    // <a> with the single branch 1: tt.
    static Formula can(std::string_view a);
    // neg <a> tt, written "bar a".
    static Formula cannot(std::string_view a);

    Kind kind() const;
    Formula sub() const;
    const std::vector<Formula>& conjuncts() const;
    const std::string& action() const;
    DistFormula dist() const;
    bool is_top() const { return kind() == Kind::Top; }
    bool is_cannot() const;
    std::size_t hash() const;
    const void* id() const { return n_; }
    explicit operator bool() const { return n_ != nullptr; }

    friend bool operator==(Formula a, Formula b) { return a.n_ == b.n_; }

private:
    explicit Formula(const detail::FormulaNode* n) : n_(n) {}
    const detail::FormulaNode* n_ = nullptr;
};

// Weighted branches r_i : phi_i with r_i in (0,1] summing to 1; order kept.
class DistFormula {
public:
    DistFormula() = default;
    static DistFormula make(std::vector<std::pair<Rational, Formula>> branches);
    static DistFormula unit(Formula f) { return make({{Rational(1), f}}); }

    const std::vector<std::pair<Rational, Formula>>& branches() const;
    std::size_t hash() const;
    const void* id() const { return n_; }
    explicit operator bool() const { return n_ != nullptr; }

    friend bool operator==(DistFormula a, DistFormula b) { return a.n_ == b.n_; }

private:
    explicit DistFormula(const detail::DistFormulaNode* n) : n_(n) {}
    const detail::DistFormulaNode* n_ = nullptr;
};

namespace detail {
struct FormulaNode {
    Formula::Kind kind = Formula::Kind::Top;
    std::string action;
    Formula sub;
    std::vector<Formula> conjuncts;
    DistFormula dist;
    std::size_t hash = 0;
};
struct DistFormulaNode {
    std::vector<std::pair<Rational, Formula>> branches;
    std::size_t hash = 0;
};
} // namespace detail

inline Formula::Kind Formula::kind() const { return n_->kind; }
inline Formula Formula::sub() const { return n_->sub; }
inline const std::vector<Formula>& Formula::conjuncts() const { return n_->conjuncts; }
inline const std::string& Formula::action() const { return n_->action; }
inline DistFormula Formula::dist() const { return n_->dist; }
inline std::size_t Formula::hash() const { return n_->hash; }
inline const std::vector<std::pair<Rational, Formula>>& DistFormula::branches() const { return n_->branches; }
inline std::size_t DistFormula::hash() const { return n_->hash; }

int compare(Formula a, Formula b);
int compare(DistFormula a, DistFormula b);
struct FormulaLess {
    bool operator()(Formula a, Formula b) const { return compare(a, b) < 0; }
};

enum class LogicClass { Positive, Ready, Full };

const char* to_string(LogicClass c);
bool in_class(Formula f, LogicClass c);
bool in_class(DistFormula d, LogicClass c);
LogicClass classify(Formula f);
std::size_t modal_depth(Formula f);

// Semantics-preserving normal form: flattened conjunctions without tt,
// double negations removed, equal distribution branches merged and sorted.
Formula simplify(Formula f);
DistFormula simplify(DistFormula d);
// Conjunction of simplified parts, flattened.
Formula conjoin(const std::vector<Formula>& fs);

std::string to_string(Formula f);
std::string to_string(DistFormula d);

class ModelChecker {
public:
    explicit ModelChecker(Lts& lts) : lts_(&lts) {}

    bool sat(Term s, Formula f);
    bool sat(const Distribution& pi, DistFormula d);
    // Split of pi over the branches of d: rows follow the support order.
    std::optional<std::vector<std::vector<Rational>>> split(const Distribution& pi, DistFormula d);
    Lts& lts() { return *lts_; }

private:
    struct Key {
        const void* s;
        const void* f;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const
        {
            return std::hash<const void*>()(k.s) * 131 + std::hash<const void*>()(k.f);
        }
    };

    Lts* lts_;
    std::unordered_map<Key, bool, KeyHash> memo_;
};

} // namespace rforge

template <>
struct std::hash<rforge::Formula> {
    std::size_t operator()(rforge::Formula f) const noexcept { return f.hash(); }
};
template <>
struct std::hash<rforge::DistFormula> {
    std::size_t operator()(rforge::DistFormula d) const noexcept { return d.hash(); }
};
