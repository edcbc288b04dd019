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

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "qgcl/program.hpp"

namespace qgcl {

enum class DiagnosticCode {
    // lexical / resolution problems, reported by the parser
    SyntaxError,
    UndeclaredVariable,
    UnknownOperator,
    DuplicateVariable,
    UnreadableFile,
    // well-formedness
    ClassicalVariableReuse,
    MeasureVariableInBranch,
    IncompleteMeasurement,
    BranchMismatch,
    GuardVariableInBranch,
    NonOrthonormalBasis,
    NonUnitary,
    DimensionMismatch,
    VariableDimensionConflict,
    ClassicalQuantumClash,
    LocalNotInBody,
    InvalidInitialState,
    InvalidProbabilities,
    RecursionScope,
};

inline std::string_view to_string(DiagnosticCode c) {
    switch (c) {
        case DiagnosticCode::SyntaxError: return "syntax error";
        case DiagnosticCode::UndeclaredVariable: return "undeclared variable";
        case DiagnosticCode::UnknownOperator: return "unknown operator";
        case DiagnosticCode::DuplicateVariable: return "duplicate variable";
        case DiagnosticCode::UnreadableFile: return "unreadable file";
        case DiagnosticCode::ClassicalVariableReuse: return "classical variable reuse";
        case DiagnosticCode::MeasureVariableInBranch: return "measurement variable reused in branch";
        case DiagnosticCode::IncompleteMeasurement: return "incomplete measurement";
        case DiagnosticCode::BranchMismatch: return "branch mismatch";
        case DiagnosticCode::GuardVariableInBranch: return "guard variable used in branch";
        case DiagnosticCode::NonOrthonormalBasis: return "non-orthonormal guard basis";
        case DiagnosticCode::NonUnitary: return "non-unitary operator";
        case DiagnosticCode::DimensionMismatch: return "dimension mismatch";
        case DiagnosticCode::VariableDimensionConflict: return "variable dimension conflict";
        case DiagnosticCode::ClassicalQuantumClash: return "classical/quantum name clash";
        case DiagnosticCode::LocalNotInBody: return "local variable not used in block body";
        case DiagnosticCode::InvalidInitialState: return "invalid initial state";
        case DiagnosticCode::InvalidProbabilities: return "invalid probabilities";
        case DiagnosticCode::RecursionScope: return "recursion body escapes declared variables";
    }
    return "unknown";
}

struct Diagnostic {
    DiagnosticCode code;
    std::string message;
    SourceLoc loc;
    std::string path;  // position in the syntax tree, e.g. "seq.2/guard.1"

    std::string str() const {
        std::string out;
        if (loc.known()) out += std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": ";
        out += std::string(to_string(code)) + ": " + message;
        if (!path.empty()) out += " [at " + path + "]";
        return out;
    }
};

namespace detail {

class WellFormedChecker {
public:
    explicit WellFormedChecker(double tol) : tol_(tol) {}

    std::vector<Diagnostic> run(const Program& p) {
        check_dimensions(p);
        if (diags_.empty()) {
            // layout_of is safe once dimensions are consistent
            const auto q = qvar(p);
            for (const auto& x : var(p)) {
                if (q.count(x)) report(DiagnosticCode::ClassicalQuantumClash, p, "root",
                                       "'" + x + "' is used as both a classical and a quantum variable");
            }
        }
        visit(p, "root");
        return std::move(diags_);
    }

private:
    void report(DiagnosticCode code, const Program& at, const std::string& path, std::string msg) {
        diags_.push_back({code, std::move(msg), at.loc(), path});
    }

    void check_dimensions(const Program& p) {
        std::vector<RegisterLayout::Variable> seen;
        walk_dims(p, seen, "root");
    }

    void walk_dims(const Program& p, std::vector<RegisterLayout::Variable>& seen, const std::string& path) {
        auto add = [&](const RegisterLayout& l) {
            for (const auto& v : l.variables()) {
                auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& w) { return w.name == v.name; });
                if (it == seen.end()) {
                    seen.push_back(v);
                } else if (it->dim != v.dim) {
                    report(DiagnosticCode::VariableDimensionConflict, p, path,
                           "quantum variable '" + v.name + "' used with dimensions " + std::to_string(it->dim) +
                               " and " + std::to_string(v.dim));
                }
            }
        };
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, UnitaryStmt>) {
                    add(s.qvars);
                } else if constexpr (std::is_same_v<T, MeasureStmt>) {
                    add(s.qvars);
                    for (const auto& [m, b] : s.branches) walk_dims(b, seen, path + "/measure." + std::to_string(m));
                } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                    add(s.qvars);
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        walk_dims(s.branches[i], seen, path + "/guard." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, SeqStmt>) {
                    walk_dims(s.first, seen, path + "/seq.1");
                    walk_dims(s.second, seen, path + "/seq.2");
                } else if constexpr (std::is_same_v<T, BlockStmt>) {
                    add(s.locals);
                    walk_dims(s.body, seen, path + "/block");
                } else if constexpr (std::is_same_v<T, ProbChoiceStmt>) {
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        walk_dims(s.branches[i], seen, path + "/pchoice." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                    walk_dims(s.coin, seen, path + "/qchoice.coin");
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        walk_dims(s.branches[i], seen, path + "/qchoice." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, NameStmt>) {
                    add(s.qvars);
                } else if constexpr (std::is_same_v<T, MuStmt>) {
                    add(s.name.qvars);
                    walk_dims(s.body, seen, path + "/mu");
                }
            },
            p.node().stmt);
    }

    static std::string join(const VariableSet& s) {
        std::string out;
        for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
        return out;
    }

    static VariableSet intersect(const VariableSet& a, const VariableSet& b) {
        VariableSet out;
        for (const auto& x : a) {
            if (b.count(x)) out.insert(x);
        }
        return out;
    }

    // qvar that tolerates dimension conflicts (already reported)
    static VariableSet safe_qvar(const Program& p) {
        try {
            return qvar(p);
        } catch (const Error&) {
            return {};
        }
    }

    void check_guard(const Program& at, const std::string& path, const RegisterLayout& guard,
                     const GuardBasis& basis, const std::vector<Program>& branches) {
        const auto d = static_cast<Eigen::Index>(guard.dimension());
        if (basis.matrix.rows() != d || basis.matrix.cols() != d) {
            report(DiagnosticCode::DimensionMismatch, at, path,
                   "guard basis is " + std::to_string(basis.matrix.rows()) + "x" +
                       std::to_string(basis.matrix.cols()) + " but the guard register has dimension " +
                       std::to_string(d));
        } else if (!is_unitary(basis.matrix, tol_)) {
            report(DiagnosticCode::NonOrthonormalBasis, at, path, "guard basis columns are not orthonormal");
        }
        if (static_cast<Eigen::Index>(branches.size()) != d) {
            report(DiagnosticCode::BranchMismatch, at, path,
                   std::to_string(branches.size()) + " branches for " + std::to_string(d) + " guard states");
        }
        for (std::size_t i = 0; i < branches.size(); ++i) {
            auto clash = intersect(guard.name_set(), safe_qvar(branches[i]));
            if (!clash.empty()) {
                report(DiagnosticCode::GuardVariableInBranch, at, path,
                       "guard variable(s) " + join(clash) + " used in branch " + std::to_string(i));
            }
        }
    }

    void visit(const Program& p, const std::string& path) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, UnitaryStmt>) {
                    const auto d = static_cast<Eigen::Index>(s.qvars.dimension());
                    if (s.u.rows() != d || s.u.cols() != d) {
                        report(DiagnosticCode::DimensionMismatch, p, path,
                               "operator is " + std::to_string(s.u.rows()) + "x" + std::to_string(s.u.cols()) +
                                   " but its variables have dimension " + std::to_string(d));
                    } else if (!is_unitary(s.u, tol_)) {
                        report(DiagnosticCode::NonUnitary, p, path,
                               "operator" + (s.label.empty() ? std::string() : " '" + s.label + "'") +
                                   " is not unitary");
                    }
                } else if constexpr (std::is_same_v<T, MeasureStmt>) {
                    const auto d = static_cast<Eigen::Index>(s.qvars.dimension());
                    bool shapes_ok = !s.measurement.operators.empty();
                    for (const auto& [m, op] : s.measurement.operators) {
                        if (op.rows() != d || op.cols() != d) shapes_ok = false;
                    }
                    if (!shapes_ok) {
                        report(DiagnosticCode::DimensionMismatch, p, path,
                               "measurement operators do not act on dimension " + std::to_string(d));
                    } else if (!s.measurement.is_complete(tol_)) {
                        report(DiagnosticCode::IncompleteMeasurement, p, path,
                               "measurement operators do not satisfy sum M^dagger M = I");
                    }
                    if (s.measurement.outcomes().size() != s.branches.size()) {
                        report(DiagnosticCode::BranchMismatch, p, path,
                               std::to_string(s.branches.size()) + " branches for " +
                                   std::to_string(s.measurement.operators.size()) + " outcomes");
                    } else {
                        auto outs = s.measurement.outcomes();
                        for (std::size_t i = 0; i < outs.size(); ++i) {
                            if (s.branches[i].first != outs[i]) {
                                report(DiagnosticCode::BranchMismatch, p, path,
                                       "branch outcome " + std::to_string(s.branches[i].first) +
                                           " is not an outcome of the measurement");
                                break;
                            }
                        }
                    }
                    for (const auto& [m, b] : s.branches) {
                        if (var(b).count(s.var)) {
                            report(DiagnosticCode::MeasureVariableInBranch, p, path,
                                   "'" + s.var + "' is assigned again inside branch " + std::to_string(m));
                        }
                        visit(b, path + "/measure." + std::to_string(m));
                    }
                } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                    check_guard(p, path, s.qvars, s.basis, s.branches);
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        visit(s.branches[i], path + "/guard." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, SeqStmt>) {
                    auto clash = intersect(var(s.first), var(s.second));
                    if (!clash.empty()) {
                        report(DiagnosticCode::ClassicalVariableReuse, p, path,
                               "classical variable(s) " + join(clash) + " assigned in both parts of a sequence");
                    }
                    visit(s.first, path + "/seq.1");
                    visit(s.second, path + "/seq.2");
                } else if constexpr (std::is_same_v<T, BlockStmt>) {
                    const auto body_q = safe_qvar(s.body);
                    for (const auto& v : s.locals.variables()) {
                        if (!body_q.count(v.name)) {
                            report(DiagnosticCode::LocalNotInBody, p, path,
                                   "local '" + v.name + "' is not a quantum variable of the body");
                        }
                    }
                    const auto d = static_cast<Eigen::Index>(s.locals.dimension());
                    if (s.init.rows() != d || s.init.cols() != d) {
                        report(DiagnosticCode::DimensionMismatch, p, path,
                               "initial state is " + std::to_string(s.init.rows()) + "x" +
                                   std::to_string(s.init.cols()) + " but the locals have dimension " +
                                   std::to_string(d));
                    } else if (!all_finite(s.init) || !is_positive(s.init, tol_) ||
                               s.init.trace().real() > 1.0 + tol_) {
                        report(DiagnosticCode::InvalidInitialState, p, path,
                               "initial state is not a (partial) density operator");
                    }
                    visit(s.body, path + "/block");
                } else if constexpr (std::is_same_v<T, ProbChoiceStmt>) {
                    double total = 0.0;
                    bool ok = s.weights.size() == s.branches.size() && !s.branches.empty();
                    for (double w : s.weights) {
                        if (!(w >= 0.0) || !std::isfinite(w)) ok = false;
                        total += w;
                    }
                    if (!ok || total > 1.0 + tol_) {
                        report(DiagnosticCode::InvalidProbabilities, p, path,
                               "weights must be non-negative, one per branch, and sum to at most 1");
                    }
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        visit(s.branches[i], path + "/pchoice." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                    RegisterLayout guard;
                    try {
                        guard = guard_layout(s);
                    } catch (const Error&) {
                    }
                    check_guard(p, path, guard, s.basis, s.branches);
                    VariableSet branch_vars;
                    for (const auto& b : s.branches) {
                        auto v = var(b);
                        branch_vars.insert(v.begin(), v.end());
                    }
                    auto clash = intersect(var(s.coin), branch_vars);
                    if (!clash.empty()) {
                        report(DiagnosticCode::ClassicalVariableReuse, p, path,
                               "classical variable(s) " + join(clash) + " assigned in both coin and branches");
                    }
                    visit(s.coin, path + "/qchoice.coin");
                    for (std::size_t i = 0; i < s.branches.size(); ++i)
                        visit(s.branches[i], path + "/qchoice." + std::to_string(i));
                } else if constexpr (std::is_same_v<T, MuStmt>) {
                    for (const auto& x : var(s.body)) {
                        if (!s.name.vars.count(x)) {
                            report(DiagnosticCode::RecursionScope, p, path,
                                   "classical variable '" + x + "' not declared for " + s.name.id);
                        }
                    }
                    for (const auto& q : safe_qvar(s.body)) {
                        if (!s.name.qvars.contains(q)) {
                            report(DiagnosticCode::RecursionScope, p, path,
                                   "quantum variable '" + q + "' not declared for " + s.name.id);
                        }
                    }
                    visit(s.body, path + "/mu");
                }
            },
            p.node().stmt);
    }

    double tol_;
    std::vector<Diagnostic> diags_;
};

}  // namespace detail

/// Every violated side condition of p, in tree order. Empty means well formed.
inline std::vector<Diagnostic> check_well_formed(const Program& p, double tol = kDefaultTol) {
    return detail::WellFormedChecker(tol).run(p);
}

inline bool well_formed(const Program& p, double tol = kDefaultTol) { return check_well_formed(p, tol).empty(); }

}  // namespace qgcl
