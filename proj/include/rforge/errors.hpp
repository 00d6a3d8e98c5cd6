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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rforge {

enum class ErrorKind {
    Input,
    Syntax,
    Validation,
    SortMismatch,
    UnknownOperator,
    ArityMismatch,
    NonClosed,
    IncompletePts,
    Budget,
    NonPositiveSpec,
    NotSatisfied,
    Unsupported,
    Internal,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct Span {
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

class SyntaxError : public Error {
public:
    SyntaxError(Span span, const std::string& what)
        : Error(ErrorKind::Syntax, std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + what),
          span_(span), message_(what)
    {
    }
    const Span& span() const { return span_; }
    const std::string& message() const { return message_; }

private:
    Span span_;
    std::string message_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string constraint, const std::string& what)
        : Error(ErrorKind::Validation, constraint + ": " + what), constraint_(std::move(constraint))
    {
    }
    ValidationError(std::string constraint, const std::string& what, Span span)
        : Error(ErrorKind::Validation, std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
                                           constraint + ": " + what),
          constraint_(std::move(constraint)), span_(span)
    {
    }
    const std::string& constraint() const { return constraint_; }
    const std::optional<Span>& span() const { return span_; }

private:
    std::string constraint_;
    std::optional<Span> span_;
};

} // namespace rforge
