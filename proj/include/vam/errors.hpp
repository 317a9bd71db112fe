// Copyright 2026 The VAM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace vam {

/// Malformed or inconsistent input data (bad field values, schema problems).
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A valid input that violates a precondition of the valuation arithmetic,
/// e.g. depreciation exceeding replacement cost. The CLI maps this to exit code 1.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Schema violation in a structured input file; carries the JSON-pointer-style
/// path of the offending field.
class SchemaError : public ValidationError {
public:
    SchemaError(std::string path, const std::string& message)
        : ValidationError(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace vam
