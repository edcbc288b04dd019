// Copyright 2026 The QGCL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qgcl {

enum class ErrorKind {
    Capacity,     // dimension cap exceeded
    Layout,       // unknown variable, dimension mismatch between layouts
    Shape,        // non-square / incompatible matrix shapes
    Contract,     // violated operation precondition
    DomainClash,  // overlapping classical-state domains
    Arity,        // empty superposition and similar
    Key,          // lookup of a missing classical state
    Unsupported,  // construct without semantics at the requested level
    Syntax,       // source text errors
    Io,           // file or format errors
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Capacity: return "capacity";
        case ErrorKind::Layout: return "layout";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::DomainClash: return "domain-clash";
        case ErrorKind::Arity: return "arity";
        case ErrorKind::Key: return "key";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace qgcl
