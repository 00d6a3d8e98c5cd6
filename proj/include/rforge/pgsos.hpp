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

#include "rforge/term.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace rforge {

// t -a-> theta, or t -a-| when target is null.
struct Literal {
    Term source;
    std::string action;
    DistTerm target;

    static Literal pos(Term source, std::string action, DistTerm target)
    {
        return {source, std::move(action), target};
    }
    static Literal neg(Term source, std::string action) { return {source, std::move(action), DistTerm()}; }

    bool positive() const { return static_cast<bool>(target); }
    friend bool operator==(const Literal&, const Literal&) = default;
};

int compare(const Literal& a, const Literal& b);
inline bool operator<(const Literal& a, const Literal& b) { return compare(a, b) < 0; }
bool denies(const Literal& a, const Literal& b);
Literal opposite(const Literal& l, const std::string& fresh_dist_var);
std::string to_string(const Literal& l);

// Premises over a conclusion; used for rule candidates and for ruloids.
struct LiteralRule {
    std::vector<Literal> premises;
    Literal conclusion;

    bool is_positive() const;
    // Some x -b-> mu and x -b-| both present.
    bool contradictory() const;
    friend bool operator==(const LiteralRule&, const LiteralRule&) = default;
};

int compare(const LiteralRule& a, const LiteralRule& b);
inline bool operator<(const LiteralRule& a, const LiteralRule& b) { return compare(a, b) < 0; }
std::string to_string(const LiteralRule& r);

// Alpha-canonical form: variables renamed in visit order of conclusion
// source, conclusion target, then premises; premises sorted.
LiteralRule canonical(const LiteralRule& r, RenameScope scope = RenameScope::All);
bool alpha_equivalent(const LiteralRule& a, const LiteralRule& b, RenameScope scope = RenameScope::All);

class PgsosRule {
public:
    struct Positive {
        std::size_t arg;
        std::string action;
        std::string dist_var;
    };
    struct Negative {
        std::size_t arg;
        std::string action;
    };

    // Throws ValidationError naming the violated constraint.
    static PgsosRule validate(const Signature& sig, const LiteralRule& candidate);

    Op op() const { return op_; }
    const std::vector<std::string>& source_vars() const { return source_vars_; }
    const std::vector<Positive>& positives() const { return positives_; }
    const std::vector<Negative>& negatives() const { return negatives_; }
    const std::string& action() const { return action_; }
    DistTerm target() const { return target_; }
    bool is_positive() const { return negatives_.empty(); }

    Term source() const;
    LiteralRule as_literal_rule() const;

private:
    Op op_;
    std::vector<std::string> source_vars_;
    std::vector<Positive> positives_;
    std::vector<Negative> negatives_;
    std::string action_;
    DistTerm target_;
};

inline PgsosRule validate_rule(const Signature& sig, const LiteralRule& candidate)
{
    return PgsosRule::validate(sig, candidate);
}

class PtsSpec {
public:
    PtsSpec() = default;
    PtsSpec(Signature sig, std::vector<PgsosRule> rules);
    PtsSpec(const PtsSpec& o) : sig_(o.sig_), rules_(o.rules_) { reindex(); }
    PtsSpec& operator=(const PtsSpec& o)
    {
        sig_ = o.sig_;
        rules_ = o.rules_;
        reindex();
        return *this;
    }

    const Signature& signature() const { return sig_; }
    const std::vector<PgsosRule>& rules() const { return rules_; }
    const std::vector<const PgsosRule*>& rules_for(Op op, const std::string& action) const;
    bool is_positive() const;

private:
    void reindex();

    Signature sig_;
    std::vector<PgsosRule> rules_;
    std::unordered_map<Op, std::unordered_map<std::string, std::vector<const PgsosRule*>>> index_;
};

} // namespace rforge
