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

// Semi-classical semantics (operator-valued functions over classical
// states), purely quantum semantics (super-operators), bounded loop
// unrolling, and the system-environment model of a super-operator.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qgcl/builtins.hpp"
#include "qgcl/classical_state.hpp"
#include "qgcl/error.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/program.hpp"
#include "qgcl/tensor.hpp"
#include "qgcl/well_formed.hpp"

namespace qgcl {

struct SemiClassicalDenotation {
    std::vector<ClassicalState> classical_states;
    OperatorValuedFunction function;
};

namespace detail {

inline void require_well_formed(const Program& p, double tol) {
    auto diags = check_well_formed(p, tol);
    if (!diags.empty()) {
        std::string msg = "program is not well formed: " + diags.front().str();
        if (diags.size() > 1) msg += " (and " + std::to_string(diags.size() - 1) + " more)";
        throw Error(ErrorKind::Contract, msg);
    }
}

inline OperatorValuedFunction constant_ovf(const RegisterLayout& layout, Matrix m) {
    return OperatorValuedFunction::unchecked(layout, {{ClassicalState::empty(), std::move(m)}});
}

inline RegisterLayout branch_layout(const std::vector<Program>& branches) {
    RegisterLayout out;
    for (const auto& b : branches) out = out.merged(layout_of(b));
    return out;
}

inline OperatorValuedFunction semi(const Program& p, double tol);

inline OperatorValuedFunction semi_guarded(const RegisterLayout& guard, const GuardBasis& basis,
                                           const std::vector<Program>& branches, const RegisterLayout& target,
                                           double tol) {
    const RegisterLayout data = branch_layout(branches);
    std::vector<OperatorValuedFunction> fs;
    fs.reserve(branches.size());
    for (const auto& b : branches) fs.push_back(semi(b, tol).embedded(data));
    return guarded_compose_unchecked(basis, fs, guard, tol).permuted(target);
}

inline OperatorValuedFunction semi(const Program& p, double tol) {
    using Entry = OperatorValuedFunction::Entry;
    const RegisterLayout V = layout_of(p);
    return std::visit(
        [&](const auto& s) -> OperatorValuedFunction {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AbortStmt>) {
                return constant_ovf(V, scalar(0.0));
            } else if constexpr (std::is_same_v<T, SkipStmt>) {
                return constant_ovf(V, scalar(1.0));
            } else if constexpr (std::is_same_v<T, UnitaryStmt>) {
                return constant_ovf(V, embed(s.u, s.qvars, V));
            } else if constexpr (std::is_same_v<T, MeasureStmt>) {
                std::vector<Entry> table;
                for (const auto& [m, branch] : s.branches) {
                    const Matrix Mm = embed(s.measurement.at(m), s.qvars, V);
                    const auto bind = ClassicalState::bind(s.var, m);
                    const auto fm = semi(branch, tol).embedded(V);
                    for (const auto& [delta, op] : fm.entries()) {
                        table.emplace_back(concat(delta, bind), op * Mm);
                    }
                }
                return OperatorValuedFunction::unchecked(V, std::move(table));
            } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                return semi_guarded(s.qvars, s.basis, s.branches, V, tol);
            } else if constexpr (std::is_same_v<T, SeqStmt>) {
                const auto f1 = semi(s.first, tol).embedded(V);
                const auto f2 = semi(s.second, tol).embedded(V);
                std::vector<Entry> table;
                table.reserve(f1.size() * f2.size());
                for (const auto& [d1, a] : f1.entries()) {
                    for (const auto& [d2, b] : f2.entries()) table.emplace_back(concat(d1, d2), b * a);
                }
                if (table.size() > kMaxDomainSize) {
                    throw Error(ErrorKind::Capacity, "classical state set exceeds " + std::to_string(kMaxDomainSize));
                }
                return OperatorValuedFunction::unchecked(V, std::move(table));
            } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                return semi(desugar_qchoice(p), tol);
            } else {
                throw Error(ErrorKind::Unsupported,
                            "semi-classical semantics covers abort, skip, unitaries, measurements, guards, "
                            "sequencing and quantum choice only");
            }
        },
        p.node().stmt);
}

inline SuperOperator denote_impl(const Program& p, double tol);

/// Kraus operators of rho -> tr_locals(E(rho ⊗ init)) on the outer layout.
inline SuperOperator block_channel(const BlockStmt& s, const RegisterLayout& V, double tol) {
    const RegisterLayout F = V.concat(s.locals);
    const SuperOperator body = denote_impl(s.body, tol).embedded(F);
    const auto dV = static_cast<Eigen::Index>(V.dimension());
    const auto dL = static_cast<Eigen::Index>(s.locals.dimension());

    Eigen::SelfAdjointEigenSolver<Matrix> es((s.init + s.init.adjoint()) / 2.0);
    std::vector<Matrix> out;
    for (Eigen::Index l = 0; l < dL; ++l) {
        const double sl = es.eigenvalues()(l);
        if (sl <= tol * tol) continue;
        const Matrix phi = es.eigenvectors().col(l);
        const Matrix lift = std::sqrt(sl) * tensor(identity(dV), phi);  // I_V ⊗ |phi_l>
        for (const auto& e : body.kraus) {
            const Matrix el = e * lift;  // dV*dL x dV
            for (Eigen::Index b = 0; b < dL; ++b) {
                Matrix k(dV, dV);
                for (Eigen::Index v = 0; v < dV; ++v) k.row(v) = el.row(v * dL + b);
                out.push_back(std::move(k));
            }
        }
    }
    SuperOperator result(V, std::move(out));
    if (result.kraus.size() > static_cast<std::size_t>(dV * dV)) result = compress_kraus(result);
    return result;
}

inline SuperOperator denote_impl(const Program& p, double tol) {
    if (is_core(p)) return to_superop(semi(p, tol));
    const RegisterLayout V = layout_of(p);
    return std::visit(
        [&](const auto& s) -> SuperOperator {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, SeqStmt>) {
                return denote_impl(s.first, tol).embedded(V).then(denote_impl(s.second, tol).embedded(V));
            } else if constexpr (std::is_same_v<T, MeasureStmt>) {
                std::vector<Matrix> out;
                for (const auto& [m, branch] : s.branches) {
                    SuperOperator meas(V, {embed(s.measurement.at(m), s.qvars, V)});
                    auto part = meas.then(denote_impl(branch, tol).embedded(V));
                    out.insert(out.end(), part.kraus.begin(), part.kraus.end());
                }
                return SuperOperator(V, std::move(out));
            } else if constexpr (std::is_same_v<T, BlockStmt>) {
                return block_channel(s, V, tol);
            } else if constexpr (std::is_same_v<T, ProbChoiceStmt>) {
                std::vector<Matrix> out;
                for (std::size_t i = 0; i < s.branches.size(); ++i) {
                    const double w = std::sqrt(s.weights[i]);
                    const auto part = denote_impl(s.branches[i], tol).embedded(V);
                    for (const auto& e : part.kraus) out.push_back(w * e);
                }
                return SuperOperator(V, std::move(out));
            } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                return denote_impl(desugar_qchoice(p), tol);
            } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                throw Error(ErrorKind::Unsupported,
                            "a quantum guard whose branches contain blocks, probabilistic choices or "
                            "recursion has no semi-classical meaning");
            } else if constexpr (std::is_same_v<T, NameStmt> || std::is_same_v<T, MuStmt>) {
                throw Error(ErrorKind::Unsupported, "recursive programs have no finite denotation; unroll them first");
            } else {
                throw Error(ErrorKind::Unsupported, "unexpected program form");
            }
        },
        p.node().stmt);
}

}  // namespace detail

/// The semi-classical denotation of a core program, on layout_of(p).
inline SemiClassicalDenotation semi_classical(const Program& p, double tol = kDefaultTol) {
    detail::require_well_formed(p, tol);
    auto f = detail::semi(p, tol);
    if (!f.is_valid(std::max(tol, 1e-9))) {
        throw Error(ErrorKind::Contract, "semi-classical denotation violates sum F^dagger F <= I");
    }
    return {f.domain(), OperatorValuedFunction(f.layout(), f.entries(), std::max(tol, 1e-9))};
}

/// The purely quantum denotation of p as a Kraus family on layout_of(p).
inline SuperOperator denote(const Program& p, double tol = kDefaultTol) {
    detail::require_well_formed(p, tol);
    return detail::denote_impl(p, tol);
}

/// denote(p) extended to a register containing every quantum variable of p.
inline SuperOperator denote_on(const Program& p, const RegisterLayout& layout, double tol = kDefaultTol) {
    return denote(p, tol).embedded(layout);
}

/// [[p]](rho). The input register must contain qvar(p); the output lives on
/// the input's layout.
inline DensityMatrix apply(const Program& p, const DensityMatrix& input, double tol = kDefaultTol) {
    const auto channel = denote_on(p, input.layout(), tol);
    Matrix out = channel.apply(input.matrix());
    out = (out + out.adjoint()) / 2.0;
    return DensityMatrix(std::move(out), input.layout(), std::max(tol, 1e-9) * 10);
}

// ---------------------------------------------------------------------------
// Bounded loop unrolling

enum class LoopFlavor { Classical, Quantum, Localized };

inline constexpr std::string_view kLoopPrefix = "_loop_";
inline constexpr std::size_t kDefaultLoopBound = 6;

struct LoopOptions {
    std::size_t bound = kDefaultLoopBound;
    std::optional<Measurement> measurement;  // classical flavour; default {|0><0|, I - |0><0|}
};

inline std::string loop_coin_name(std::size_t k) { return std::string(kLoopPrefix) + "q" + std::to_string(k); }
inline std::string loop_outcome_name(std::size_t k) { return std::string(kLoopPrefix) + "x" + std::to_string(k); }

/// Binary measurement {|0><0|, I - |0><0|} on dimension d.
inline Measurement zero_test(std::size_t d) {
    const Matrix p0 = projector(basis_ket(d, 0));
    return Measurement{{{0, p0}, {1, identity(d) - p0}}, {}};
}

/// The n-th approximation of `while M[q] = 1 do q := U q`:
///  - Classical: measurement-driven iterations with fresh outcome variables;
///  - Quantum:   quantum choices over fresh coin qubits q1..qn;
///  - Localized: the quantum iterations with the coins made local, starting in |0..0>.
inline Program unroll_loop(const RegisterLayout& q, const Matrix& u, const Matrix& coin, std::size_t n,
                           LoopFlavor flavor, const LoopOptions& opts = {}) {
    if (n > opts.bound) {
        throw Error(ErrorKind::Capacity, "loop unrolling depth " + std::to_string(n) + " exceeds the bound " +
                                             std::to_string(opts.bound));
    }
    for (const auto& v : q.variables()) {
        if (v.name.rfind(kLoopPrefix, 0) == 0) {
            throw Error(ErrorKind::Contract, "variable '" + v.name + "' uses the reserved prefix " +
                                                 std::string(kLoopPrefix));
        }
    }
    if (q.empty()) throw Error(ErrorKind::Contract, "loop body needs at least one quantum variable");
    const auto d = q.dimension();
    if (u.rows() != static_cast<Eigen::Index>(d) || !is_unitary(u)) {
        throw Error(ErrorKind::Contract, "loop body must be a unitary on the loop register");
    }
    if (flavor != LoopFlavor::Classical && (coin.rows() != 2 || !is_unitary(coin))) {
        throw Error(ErrorKind::Contract, "coin must be a 2x2 unitary");
    }

    const Program body = prog::unitary(q, u, "U");
    if (flavor == LoopFlavor::Classical) {
        const Measurement m = opts.measurement.value_or(zero_test(d));
        Program acc = prog::abort();
        for (std::size_t k = 1; k <= n; ++k) {
            acc = prog::measure(loop_outcome_name(k), q, m, {{0, prog::skip()}, {1, prog::seq(body, acc)}});
        }
        return acc;
    }

    Program acc = prog::abort();
    for (std::size_t k = 1; k <= n; ++k) {
        RegisterLayout c({{loop_coin_name(k), 2}});
        acc = prog::qchoice(prog::unitary(c, coin, "C"), GuardBasis::computational(2),
                            {prog::skip(), prog::seq(body, acc)});
    }
    if (flavor == LoopFlavor::Quantum || n == 0) return acc;

    std::vector<RegisterLayout::Variable> coins;
    for (std::size_t k = 1; k <= n; ++k) coins.push_back({loop_coin_name(k), 2});
    RegisterLayout locals(std::move(coins));
    const Matrix init = projector(basis_ket(locals.dimension(), 0));
    return prog::block(std::move(locals), init, acc);
}

// ---------------------------------------------------------------------------
// System-environment model

/// E(rho) = tr_env(K U (rho ⊗ |phi0><phi0|) U^dagger K) with K = I ⊗ env_projector.
struct DilationModel {
    RegisterLayout system;
    RegisterLayout env_layout;  // empty when one environment state suffices
    Vector env_state;           // |phi0> = |0>
    Matrix unitary;             // on system ⊗ environment
    Matrix env_projector;       // onto the environment states that index Kraus operators
    std::size_t kraus_count = 0;

    RegisterLayout joint() const { return system.concat(env_layout); }

    Matrix apply(const Matrix& rho) const {
        const Matrix k = tensor(identity(system.dimension()), env_projector);
        const Matrix big = k * unitary * tensor(rho, projector(env_state)) * unitary.adjoint() * k;
        if (env_layout.empty()) return big;
        return partial_trace(big, joint(), system.name_set());
    }
};

inline std::string fresh_name(const std::string& base, const VariableSet& taken) {
    if (!taken.count(base)) return base;
    for (std::size_t k = 1;; ++k) {
        auto cand = base + std::to_string(k);
        if (!taken.count(cand)) return cand;
    }
}

inline DilationModel system_environment_model(const SuperOperator& e, double tol = kDefaultTol,
                                              const VariableSet& taken = {}) {
    const auto d = static_cast<Eigen::Index>(e.dimension());
    SuperOperator s = e.pruned(0.0);
    if (s.kraus.size() > static_cast<std::size_t>(d * d)) s = compress_kraus(s);
    if (s.kraus.size() > static_cast<std::size_t>(d * d)) {
        throw Error(ErrorKind::Capacity, "super-operator needs more than d^2 Kraus operators");
    }
    std::vector<Matrix> ks = s.kraus;
    const std::size_t used = ks.size();
    const Matrix gram = kraus_gram(ks, e.dimension());
    const Matrix defect = identity(e.dimension()) - gram;
    if (!is_positive(defect, std::max(tol, 1e-9))) {
        throw Error(ErrorKind::Contract, "super-operator is not trace non-increasing");
    }
    if (max_abs_diff(gram, identity(e.dimension())) > tol) {
        Eigen::SelfAdjointEigenSolver<Matrix> es((defect + defect.adjoint()) / 2.0);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        ks.push_back(es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
    }
    const auto r = static_cast<Eigen::Index>(ks.size());
    VariableSet names = taken;
    for (const auto& v : e.layout.variables()) names.insert(v.name);

    DilationModel out;
    out.system = e.layout;
    out.kraus_count = used;
    if (r >= 2) out.env_layout = RegisterLayout({{fresh_name("env", names), static_cast<std::size_t>(r)}});
    check_capacity(static_cast<std::size_t>(d * r), "system-environment model");
    out.env_state = basis_ket(static_cast<std::size_t>(r), 0);
    out.env_projector = Matrix::Zero(r, r);
    for (std::size_t k = 0; k < used; ++k) out.env_projector(k, k) = 1.0;

    // Isometry A|a> = sum_k E_k|a> ⊗ |k>.
    const Eigen::Index D = d * r;
    Matrix A(D, d);
    for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index k = 0; k < r; ++k) {
            for (Eigen::Index a = 0; a < d; ++a) A(b * r + k, a) = ks[k](b, a);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(A);
    const Matrix Q = qr.householderQ();
    Matrix U(D, D);
    Eigen::Index next = d;  // complement columns of Q
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index j = 0; j < r; ++j) {
            U.col(a * r + j) = j == 0 ? Vector(A.col(a)) : Vector(Q.col(next++));
        }
    }
    out.unitary = std::move(U);
    return out;
}

// ---------------------------------------------------------------------------
// Relocating a quantum coin to the end of a program

struct Relocation {
    Program lhs;
    Program rhs;
};

/// Unitary coin: (P_1 ⊕_{U[q]} ... P_n) versus
/// (guard q in basis U^dagger B { P_i }); U[q].
inline Relocation relocate_unitary_coin(const RegisterLayout& q, const Matrix& u, const GuardBasis& basis,
                                        std::vector<Program> branches, std::string label = {}) {
    Program lhs = prog::qchoice(prog::unitary(q, u, label), basis, branches);
    GuardBasis moved{u.adjoint() * basis.matrix, {}};
    Program rhs = prog::seq(prog::guarded(q, moved, std::move(branches)), prog::unitary(q, u, label));
    return {std::move(lhs), std::move(rhs)};
}

/// General coin program P: its system-environment model (U, |phi0>, K) on
/// q ⊗ r gives
///   begin local r := |phi0>; guard q r in basis {U^dagger |i, j>} { Q_ij }; U[q, r] end
/// with Q_ij = P_i when |j> lies in K and abort otherwise.
inline Relocation relocate_coin_program(const Program& coin, const GuardBasis& basis, std::vector<Program> branches,
                                        double tol = kDefaultTol) {
    Program lhs = prog::qchoice(coin, basis, branches);
    const RegisterLayout q = layout_of(coin);
    VariableSet taken = qvar(lhs);
    const auto model = system_environment_model(denote(coin, tol), tol, taken);
    const RegisterLayout joint = q.concat(model.env_layout);
    const auto r = model.env_layout.empty() ? std::size_t{1} : model.env_layout.dimension();

    // columns |b_i> ⊗ |j>, then pulled back through U
    Matrix cols(joint.dimension(), joint.dimension());
    std::vector<Program> qs;
    for (std::size_t i = 0; i < basis.arity(); ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            cols.col(static_cast<Eigen::Index>(i * r + j)) = tensor(basis.state(i), basis_ket(r, j));
            qs.push_back(j < model.kraus_count ? branches[i] : prog::abort());
        }
    }
    GuardBasis moved{model.unitary.adjoint() * cols, {}};
    Program body = prog::seq(prog::guarded(joint, moved, std::move(qs)), prog::unitary(joint, model.unitary));
    if (model.env_layout.empty()) return {std::move(lhs), std::move(body)};
    Program rhs = prog::block(model.env_layout, projector(model.env_state), std::move(body));
    return {std::move(lhs), std::move(rhs)};
}

}  // namespace qgcl
