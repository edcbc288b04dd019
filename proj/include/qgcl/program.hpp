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

// Abstract syntax of quantum guarded-command programs.
//
// Programs are immutable trees of shared nodes. Construction never validates
// the quantum data (unitarity, completeness, ...); that is the job of
// check_well_formed(), which reports every violation as a diagnostic.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "qgcl/error.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl {

struct SourceLoc {
    int line = 0;
    int col = 0;
    bool known() const noexcept { return line > 0; }
};

/// A quantum measurement {M_m} on the variables it is applied to, keyed by
/// integer outcome (sorted ascending).
struct Measurement {
    std::vector<std::pair<std::int64_t, Matrix>> operators;
    std::string label;

    std::size_t dimension() const {
        return operators.empty() ? 0 : static_cast<std::size_t>(operators.front().second.rows());
    }
    std::vector<std::int64_t> outcomes() const {
        std::vector<std::int64_t> out;
        for (const auto& [m, _] : operators) out.push_back(m);
        return out;
    }
    const Matrix& at(std::int64_t outcome) const {
        for (const auto& [m, op] : operators) {
            if (m == outcome) return op;
        }
        throw Error(ErrorKind::Key, "measurement has no outcome " + std::to_string(outcome));
    }
    /// Sum_m M_m^dagger M_m == I within tol.
    bool is_complete(double tol = kDefaultTol) const {
        const auto d = dimension();
        if (d == 0) return false;
        Matrix g = Matrix::Zero(d, d);
        for (const auto& [_, op] : operators) {
            if (static_cast<std::size_t>(op.rows()) != d || op.rows() != op.cols()) return false;
            g += op.adjoint() * op;
        }
        return max_abs_diff(g, identity(d)) <= tol;
    }
};

/// Orthonormal guard basis; column i is the guard state |i>.
struct GuardBasis {
    Matrix matrix;
    std::string label;  // empty for the computational basis or an inline literal

    static GuardBasis computational(std::size_t d) { return {identity(d), {}}; }
    bool is_computational() const {
        return matrix.rows() == matrix.cols() && matrix == identity(matrix.rows());
    }
    std::size_t arity() const noexcept { return static_cast<std::size_t>(matrix.cols()); }
    Vector state(std::size_t i) const { return matrix.col(static_cast<Eigen::Index>(i)); }
};

class Program;
struct ProgramNode;

struct AbortStmt {};
struct SkipStmt {};

struct UnitaryStmt {
    RegisterLayout qvars;
    Matrix u;
    std::string label;
};

struct MeasureStmt {
    std::string var;
    RegisterLayout qvars;
    Measurement measurement;
    std::vector<std::pair<std::int64_t, Program>> branches;  // by outcome
};

struct GuardedStmt {
    RegisterLayout qvars;
    GuardBasis basis;
    std::vector<Program> branches;  // branch i is guarded by basis column i
};

struct SeqStmt;
struct BlockStmt;
struct ProbChoiceStmt;
struct QChoiceStmt;
struct NameStmt;
struct MuStmt;

class Program {
public:
    enum class Kind { Abort, Skip, Unitary, Measure, Guarded, Seq, Block, ProbChoice, QChoice, Name, Mu };

    Program();
    Program(AbortStmt s, SourceLoc loc = {});
    Program(SkipStmt s, SourceLoc loc = {});
    Program(UnitaryStmt s, SourceLoc loc = {});
    Program(MeasureStmt s, SourceLoc loc = {});
    Program(GuardedStmt s, SourceLoc loc = {});
    Program(SeqStmt s, SourceLoc loc = {});
    Program(BlockStmt s, SourceLoc loc = {});
    Program(ProbChoiceStmt s, SourceLoc loc = {});
    Program(QChoiceStmt s, SourceLoc loc = {});
    Program(NameStmt s, SourceLoc loc = {});
    Program(MuStmt s, SourceLoc loc = {});

    Kind kind() const noexcept;
    SourceLoc loc() const noexcept;
    const ProgramNode& node() const noexcept { return *node_; }

    template <class T>
    const T* as() const noexcept;

    template <class T>
    const T& get() const {
        const T* p = as<T>();
        if (!p) throw Error(ErrorKind::Contract, "program node has a different kind");
        return *p;
    }

    friend bool operator==(const Program& a, const Program& b);

private:
    std::shared_ptr<const ProgramNode> node_;
};

struct SeqStmt {
    Program first;
    Program second;
};

struct BlockStmt {
    RegisterLayout locals;
    Matrix init;  // density operator on locals
    std::string init_label;
    Program body;
};

struct ProbChoiceStmt {
    std::vector<double> weights;
    std::vector<Program> branches;
};

/// Coin program followed by a guard over the coin's quantum variables.
struct QChoiceStmt {
    Program coin;
    GuardBasis basis;
    std::vector<Program> branches;
};

/// A program name with its a-priori classical and quantum variables.
struct NameStmt {
    std::string id;
    VariableSet vars;
    RegisterLayout qvars;
};

struct MuStmt {
    NameStmt name;
    Program body;
};

struct ProgramNode {
    std::variant<AbortStmt, SkipStmt, UnitaryStmt, MeasureStmt, GuardedStmt, SeqStmt, BlockStmt,
                 ProbChoiceStmt, QChoiceStmt, NameStmt, MuStmt>
        stmt;
    SourceLoc loc;
};

inline Program::Program() : Program(SkipStmt{}) {}

#define QGCL_PROGRAM_CTOR(T)                                                         \
    inline Program::Program(T s, SourceLoc loc)                                      \
        : node_(std::make_shared<const ProgramNode>(ProgramNode{std::move(s), loc})) {}
QGCL_PROGRAM_CTOR(AbortStmt)
QGCL_PROGRAM_CTOR(SkipStmt)
QGCL_PROGRAM_CTOR(UnitaryStmt)
QGCL_PROGRAM_CTOR(MeasureStmt)
QGCL_PROGRAM_CTOR(GuardedStmt)
QGCL_PROGRAM_CTOR(SeqStmt)
QGCL_PROGRAM_CTOR(BlockStmt)
QGCL_PROGRAM_CTOR(ProbChoiceStmt)
QGCL_PROGRAM_CTOR(QChoiceStmt)
QGCL_PROGRAM_CTOR(NameStmt)
QGCL_PROGRAM_CTOR(MuStmt)
#undef QGCL_PROGRAM_CTOR

inline Program::Kind Program::kind() const noexcept { return static_cast<Kind>(node_->stmt.index()); }
inline SourceLoc Program::loc() const noexcept { return node_->loc; }

template <class T>
const T* Program::as() const noexcept {
    return std::get_if<T>(&node_->stmt);
}

// ---------------------------------------------------------------------------
// Structural equality (source locations ignored, matrices compared exactly)

namespace detail {

inline bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

inline bool same_measurement(const Measurement& a, const Measurement& b) {
    if (a.label != b.label || a.operators.size() != b.operators.size()) return false;
    for (std::size_t i = 0; i < a.operators.size(); ++i) {
        if (a.operators[i].first != b.operators[i].first) return false;
        if (!same_matrix(a.operators[i].second, b.operators[i].second)) return false;
    }
    return true;
}

inline bool same_basis(const GuardBasis& a, const GuardBasis& b) {
    return a.label == b.label && same_matrix(a.matrix, b.matrix);
}

inline bool same_name(const NameStmt& a, const NameStmt& b) {
    return a.id == b.id && a.vars == b.vars && a.qvars == b.qvars;
}

}  // namespace detail

inline bool operator==(const Program& a, const Program& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    using detail::same_basis;
    using detail::same_matrix;
    switch (a.kind()) {
        case Program::Kind::Abort:
        case Program::Kind::Skip: return true;
        case Program::Kind::Unitary: {
            const auto &x = a.get<UnitaryStmt>(), &y = b.get<UnitaryStmt>();
            return x.qvars == y.qvars && x.label == y.label && same_matrix(x.u, y.u);
        }
        case Program::Kind::Measure: {
            const auto &x = a.get<MeasureStmt>(), &y = b.get<MeasureStmt>();
            return x.var == y.var && x.qvars == y.qvars &&
                   detail::same_measurement(x.measurement, y.measurement) && x.branches == y.branches;
        }
        case Program::Kind::Guarded: {
            const auto &x = a.get<GuardedStmt>(), &y = b.get<GuardedStmt>();
            return x.qvars == y.qvars && same_basis(x.basis, y.basis) && x.branches == y.branches;
        }
        case Program::Kind::Seq: {
            const auto &x = a.get<SeqStmt>(), &y = b.get<SeqStmt>();
            return x.first == y.first && x.second == y.second;
        }
        case Program::Kind::Block: {
            const auto &x = a.get<BlockStmt>(), &y = b.get<BlockStmt>();
            return x.locals == y.locals && x.init_label == y.init_label && same_matrix(x.init, y.init) &&
                   x.body == y.body;
        }
        case Program::Kind::ProbChoice: {
            const auto &x = a.get<ProbChoiceStmt>(), &y = b.get<ProbChoiceStmt>();
            return x.weights == y.weights && x.branches == y.branches;
        }
        case Program::Kind::QChoice: {
            const auto &x = a.get<QChoiceStmt>(), &y = b.get<QChoiceStmt>();
            return x.coin == y.coin && same_basis(x.basis, y.basis) && x.branches == y.branches;
        }
        case Program::Kind::Name: return detail::same_name(a.get<NameStmt>(), b.get<NameStmt>());
        case Program::Kind::Mu: {
            const auto &x = a.get<MuStmt>(), &y = b.get<MuStmt>();
            return detail::same_name(x.name, y.name) && x.body == y.body;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Builders

namespace prog {

inline Program abort() { return Program(AbortStmt{}); }
inline Program skip() { return Program(SkipStmt{}); }

inline Program unitary(RegisterLayout qvars, Matrix u, std::string label = {}) {
    return Program(UnitaryStmt{std::move(qvars), std::move(u), std::move(label)});
}

inline Program measure(std::string x, RegisterLayout qvars, Measurement m,
                       std::vector<std::pair<std::int64_t, Program>> branches) {
    std::sort(branches.begin(), branches.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return Program(MeasureStmt{std::move(x), std::move(qvars), std::move(m), std::move(branches)});
}

/// Measurement whose every branch is skip.
inline Program measure_discard(std::string x, RegisterLayout qvars, Measurement m) {
    std::vector<std::pair<std::int64_t, Program>> branches;
    for (auto o : m.outcomes()) branches.emplace_back(o, skip());
    return measure(std::move(x), std::move(qvars), std::move(m), std::move(branches));
}

inline Program guarded(RegisterLayout qvars, GuardBasis basis, std::vector<Program> branches) {
    return Program(GuardedStmt{std::move(qvars), std::move(basis), std::move(branches)});
}

inline Program guarded(RegisterLayout qvars, std::vector<Program> branches) {
    auto d = qvars.dimension();
    return guarded(std::move(qvars), GuardBasis::computational(d), std::move(branches));
}

inline Program seq(Program a, Program b) { return Program(SeqStmt{std::move(a), std::move(b)}); }

/// Right-nested sequence P1; (P2; (...)).
inline Program seq(std::vector<Program> ps) {
    if (ps.empty()) return skip();
    Program acc = ps.back();
    for (std::size_t i = ps.size() - 1; i-- > 0;) acc = seq(ps[i], acc);
    return acc;
}

inline Program block(RegisterLayout locals, Matrix init, Program body, std::string label = {}) {
    return Program(BlockStmt{std::move(locals), std::move(init), std::move(label), std::move(body)});
}

inline Program pchoice(std::vector<double> weights, std::vector<Program> branches) {
    return Program(ProbChoiceStmt{std::move(weights), std::move(branches)});
}

inline Program qchoice(Program coin, GuardBasis basis, std::vector<Program> branches) {
    return Program(QChoiceStmt{std::move(coin), std::move(basis), std::move(branches)});
}

inline Program name(std::string id, VariableSet vars, RegisterLayout qvars) {
    return Program(NameStmt{std::move(id), std::move(vars), std::move(qvars)});
}

inline Program mu(NameStmt name, Program body) { return Program(MuStmt{std::move(name), std::move(body)}); }

}  // namespace prog

// ---------------------------------------------------------------------------
// Variable accounting

namespace detail {

// Quantum variables (with dimensions) in first-occurrence order; conflicting
// dimensions are reported by check_well_formed and rejected here.
inline void collect_layout(const Program& p, std::vector<RegisterLayout::Variable>& out) {
    auto add = [&out](const RegisterLayout& l) {
        for (const auto& v : l.variables()) {
            auto it = std::find_if(out.begin(), out.end(), [&](const auto& w) { return w.name == v.name; });
            if (it == out.end()) {
                out.push_back(v);
            } else if (it->dim != v.dim) {
                throw Error(ErrorKind::Layout, "quantum variable '" + v.name + "' used with dimensions " +
                                                   std::to_string(it->dim) + " and " + std::to_string(v.dim));
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
                for (const auto& [_, b] : s.branches) collect_layout(b, out);
            } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                add(s.qvars);
                for (const auto& b : s.branches) collect_layout(b, out);
            } else if constexpr (std::is_same_v<T, SeqStmt>) {
                collect_layout(s.first, out);
                collect_layout(s.second, out);
            } else if constexpr (std::is_same_v<T, BlockStmt>) {
                std::vector<RegisterLayout::Variable> inner;
                collect_layout(s.body, inner);
                std::vector<RegisterLayout::Variable> outer;
                for (auto& v : inner) {
                    if (!s.locals.contains(v.name)) outer.push_back(v);
                }
                add(RegisterLayout(std::move(outer)));
            } else if constexpr (std::is_same_v<T, ProbChoiceStmt>) {
                for (const auto& b : s.branches) collect_layout(b, out);
            } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                collect_layout(s.coin, out);
                for (const auto& b : s.branches) collect_layout(b, out);
            } else if constexpr (std::is_same_v<T, NameStmt>) {
                add(s.qvars);
            } else if constexpr (std::is_same_v<T, MuStmt>) {
                add(s.name.qvars);
            }
        },
        p.node().stmt);
}

}  // namespace detail

/// qvar(P) as a layout, in first-occurrence order. This is the register on
/// which every semantic object for P is expressed.
inline RegisterLayout layout_of(const Program& p) {
    std::vector<RegisterLayout::Variable> vars;
    detail::collect_layout(p, vars);
    return RegisterLayout(std::move(vars));
}

inline VariableSet qvar(const Program& p) { return layout_of(p).name_set(); }

inline VariableSet var(const Program& p) {
    VariableSet out;
    auto merge = [&out](const VariableSet& s) { out.insert(s.begin(), s.end()); };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MeasureStmt>) {
                out.insert(s.var);
                for (const auto& [_, b] : s.branches) merge(var(b));
            } else if constexpr (std::is_same_v<T, GuardedStmt> || std::is_same_v<T, ProbChoiceStmt>) {
                for (const auto& b : s.branches) merge(var(b));
            } else if constexpr (std::is_same_v<T, SeqStmt>) {
                merge(var(s.first));
                merge(var(s.second));
            } else if constexpr (std::is_same_v<T, BlockStmt>) {
                merge(var(s.body));
            } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                merge(var(s.coin));
                for (const auto& b : s.branches) merge(var(b));
            } else if constexpr (std::is_same_v<T, NameStmt>) {
                merge(s.vars);
            } else if constexpr (std::is_same_v<T, MuStmt>) {
                merge(s.name.vars);
            }
        },
        p.node().stmt);
    return out;
}

/// Guard register of a quantum choice: the coin's quantum variables.
inline RegisterLayout guard_layout(const QChoiceStmt& q) { return layout_of(q.coin); }

/// coin; guard coin-vars { |i> -> P_i }.
inline Program desugar_qchoice(const QChoiceStmt& q, SourceLoc loc = {}) {
    return Program(SeqStmt{q.coin, Program(GuardedStmt{guard_layout(q), q.basis, q.branches}, loc)}, loc);
}

inline Program desugar_qchoice(const Program& p) { return desugar_qchoice(p.get<QChoiceStmt>(), p.loc()); }

/// True when P uses only abort, skip, unitaries, measurements, guards,
/// sequencing and quantum choice.
inline bool is_core(const Program& p) {
    return std::visit(
        [](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MeasureStmt>) {
                for (const auto& [_, b] : s.branches) {
                    if (!is_core(b)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                for (const auto& b : s.branches) {
                    if (!is_core(b)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, SeqStmt>) {
                return is_core(s.first) && is_core(s.second);
            } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                if (!is_core(s.coin)) return false;
                for (const auto& b : s.branches) {
                    if (!is_core(b)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, BlockStmt> || std::is_same_v<T, ProbChoiceStmt> ||
                                 std::is_same_v<T, NameStmt> || std::is_same_v<T, MuStmt>) {
                return false;
            } else {
                return true;
            }
        },
        p.node().stmt);
}

}  // namespace qgcl
