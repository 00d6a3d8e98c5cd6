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

#include "rforge/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace rforge {

Rational make_rational(long num, long den)
{
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r)
{
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

static bool all_digits(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

std::optional<Rational> parse_rational(std::string_view text)
{
    bool neg = false;
    if (!text.empty() && text.front() == '-') {
        neg = true;
        text.remove_prefix(1);
    }
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    Rational r(n, d);
    r.canonicalize();
    if (neg) r = -r;
    return r;
}

std::size_t hash_value(const Rational& r)
{
    auto limb = [](const mpz_class& z) -> std::size_t {
        std::size_t h = mpz_size(z.get_mpz_t());
        if (h) h = h * 31 + mpz_getlimbn(z.get_mpz_t(), 0);
        return h * 2 + (sgn(z) < 0);
    };
    return limb(r.get_num()) * 1000003u ^ limb(r.get_den());
}

} // namespace rforge
