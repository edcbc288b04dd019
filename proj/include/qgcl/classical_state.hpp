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

// Classical states: the labels that index the branches of a program's
// semi-classical meaning. Values are immutable and kept in a canonical form
// (flattened, sorted concatenations) so that equal states compare and hash
// equal; each node caches its rendering and hash at construction.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qgcl/error.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl {

class ClassicalState {
public:
    enum class Kind { Empty, Bind, Concat, Oplus };

    ClassicalState() : ClassicalState(empty()) {}

    static ClassicalState empty() {
        static const ClassicalState eps(make(Kind::Empty, {}, 0, {}));
        return eps;
    }

    static ClassicalState bind(std::string var, std::int64_t value) {
        if (var.empty()) throw Error(ErrorKind::Contract, "classical variable name is empty");
        return ClassicalState(make(Kind::Bind, std::move(var), value, {}));
    }

    /// Formal superposition of the given states; arity is significant, so a
    /// single child still yields a 1-ary node.
    static ClassicalState oplus(std::vector<ClassicalState> children) {
        if (children.empty()) throw Error(ErrorKind::Arity, "superposition of zero classical states");
        return ClassicalState(make(Kind::Oplus, {}, 0, std::move(children)));
    }

    /// Concatenation of states with disjoint domains.
    friend ClassicalState concat(const ClassicalState& a, const ClassicalState& b) {
        for (const auto& x : a.domain()) {
            if (b.domain().count(x)) {
                throw Error(ErrorKind::DomainClash,
                            "classical variable '" + x + "' bound in both " + a.str() + " and " + b.str());
            }
        }
        std::vector<ClassicalState> parts;
        auto push = [&parts](const ClassicalState& s) {
            switch (s.kind()) {
                case Kind::Empty: break;
                case Kind::Concat:
                    parts.insert(parts.end(), s.children().begin(), s.children().end());
                    break;
                default: parts.push_back(s);
            }
        };
        push(a);
        push(b);
        if (parts.empty()) return empty();
        if (parts.size() == 1) return parts.front();
        std::sort(parts.begin(), parts.end(), canonical_less);
        return ClassicalState(make(Kind::Concat, {}, 0, std::move(parts)));
    }

    Kind kind() const noexcept { return node_->kind; }
    const std::string& variable() const noexcept { return node_->var; }
    std::int64_t value() const noexcept { return node_->value; }
    const std::vector<ClassicalState>& children() const noexcept { return node_->children; }
    const VariableSet& domain() const noexcept { return node_->domain; }
    const std::string& str() const noexcept { return node_->key; }
    std::size_t hash() const noexcept { return node_->hash; }

    bool is_assignment() const noexcept { return node_->assignment; }

    /// Value of x in a superposition-free state.
    std::optional<std::int64_t> value_of(std::string_view x) const {
        if (!is_assignment()) {
            throw Error(ErrorKind::Contract, "superposed classical state " + str() + " is not an assignment");
        }
        if (kind() == Kind::Bind) return variable() == x ? std::optional<std::int64_t>(value()) : std::nullopt;
        for (const auto& c : children()) {
            if (auto v = c.value_of(x)) return v;
        }
        return std::nullopt;
    }

    friend bool operator==(const ClassicalState& a, const ClassicalState& b) noexcept {
        return a.node_ == b.node_ || (a.hash() == b.hash() && a.str() == b.str());
    }

private:
    struct Node {
        Kind kind;
        std::string var;
        std::int64_t value;
        std::vector<ClassicalState> children;
        VariableSet domain;
        std::string key;
        std::size_t hash;
        bool assignment;
    };

    explicit ClassicalState(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static bool canonical_less(const ClassicalState& a, const ClassicalState& b) {
        // Bindings first, ordered by variable; superpositions after, by rendering.
        const bool ab = a.kind() == Kind::Bind, bb = b.kind() == Kind::Bind;
        if (ab != bb) return ab;
        if (ab) return a.variable() < b.variable();
        return a.str() < b.str();
    }

    static std::shared_ptr<const Node> make(Kind kind, std::string var, std::int64_t value,
                                            std::vector<ClassicalState> children) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->var = std::move(var);
        n->value = value;
        n->children = std::move(children);
        n->assignment = kind != Kind::Oplus;
        switch (kind) {
            case Kind::Empty: n->key = "eps"; break;
            case Kind::Bind:
                n->key = "[" + n->var + "<-" + std::to_string(value) + "]";
                n->domain.insert(n->var);
                break;
            case Kind::Concat:
                for (std::size_t i = 0; i < n->children.size(); ++i) {
                    if (i) n->key += "*";
                    n->key += n->children[i].str();
                }
                break;
            case Kind::Oplus:
                n->key = "(+";
                for (const auto& c : n->children) n->key += " " + c.str();
                n->key += ")";
                break;
        }
        for (const auto& c : n->children) {
            n->domain.insert(c.domain().begin(), c.domain().end());
            n->assignment = n->assignment && c.is_assignment();
        }
        n->hash = std::hash<std::string>{}(n->key);
        return n;
    }

    std::shared_ptr<const Node> node_;
};

struct ClassicalStateHash {
    std::size_t operator()(const ClassicalState& s) const noexcept { return s.hash(); }
};

/// Pairwise concatenations a·b, in order a-major, duplicates dropped.
inline std::vector<ClassicalState> state_set_product(const std::vector<ClassicalState>& a,
                                                     const std::vector<ClassicalState>& b) {
    std::vector<ClassicalState> out;
    std::unordered_set<ClassicalState, ClassicalStateHash> seen;
    out.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            auto s = concat(x, y);
            if (seen.insert(s).second) out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace qgcl
