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

// Weakest preconditions: the Heisenberg-picture dual of the denotation.

#include <string>
#include <vector>

#include "qgcl/error.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/program.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl {

/// A positive operator on a register.
class Observable {
public:
    Observable(Matrix m, RegisterLayout layout, double tol = kDefaultTol)
        : matrix_(std::move(m)), layout_(std::move(layout)) {
        require_square(matrix_, "observable");
        if (static_cast<std::size_t>(matrix_.rows()) != layout_.dimension()) {
            throw Error(ErrorKind::Layout, "observable dimension " + std::to_string(matrix_.rows()) +
                                               " does not match layout dimension " +
                                               std::to_string(layout_.dimension()));
        }
        if (!all_finite(matrix_)) throw Error(ErrorKind::Contract, "observable has non-finite entries");
        if (!is_hermitian(matrix_, tol)) throw Error(ErrorKind::Contract, "observable is not Hermitian");
        if (!is_positive(matrix_, tol)) throw Error(ErrorKind::Contract, "observable is not positive");
    }

    const Matrix& matrix() const noexcept { return matrix_; }
    const RegisterLayout& layout() const noexcept { return layout_; }

private:
    Matrix matrix_;
    RegisterLayout layout_;
};

/// wp.P as a super-operator: the daggers of the Kraus operators of [[P]].
inline SuperOperator wp(const Program& p, double tol = kDefaultTol) { return denote(p, tol).adjoint(); }

/// wp.P.M. The observable's register must contain qvar(p); the result is on
/// the same register.
inline Observable wp_apply(const Program& p, const Observable& m, double tol = kDefaultTol) {
    const auto dual = wp(p, tol).embedded(m.layout());
    Matrix out = dual.apply(m.matrix());
    out = (out + out.adjoint()) / 2.0;
    const double scale = std::max(1.0, m.matrix().cwiseAbs().maxCoeff());
    return Observable(std::move(out), m.layout(), std::max(tol, 1e-9) * 10 * scale);
}

/// Guarded composition of the branch wp-functions, each the elementwise
/// dagger of the branch's semi-classical function, on layout_of(guard).
/// Its induced map is the canonical member of the guarded composition of
/// the branch preconditions.
inline SuperOperator wp_guard_witness(const Program& guard, double tol = kDefaultTol) {
    const auto& g = guard.get<GuardedStmt>();
    detail::require_well_formed(guard, tol);
    const RegisterLayout data = detail::branch_layout(g.branches);
    std::vector<OperatorValuedFunction> duals;
    for (const auto& b : g.branches) duals.push_back(detail::semi(b, tol).embedded(data).dagger());
    auto composed = guarded_compose_unchecked(g.basis, duals, g.qvars, tol).permuted(layout_of(guard));
    return to_superop(composed);
}

}  // namespace qgcl
