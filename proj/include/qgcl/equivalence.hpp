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

// Equality of super-operators (via Choi matrices) and program equivalence.

#include <limits>
#include <span>
#include <vector>

#include "qgcl/error.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/program.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl {

inline constexpr double kEquivalenceTol = 1e-8;

/// Largest entrywise difference between the Choi matrices of a and b. When
/// both act on the same variables, b is first re-expressed in a's factor order.
inline double choi_deviation(const SuperOperator& a, const SuperOperator& b) {
    if (a.layout.same_variables(b.layout)) return max_abs_diff(a.choi(), b.embedded(a.layout).choi());
    if (a.dimension() != b.dimension()) {
        throw Error(ErrorKind::Layout, "super-operators act on dimensions " + std::to_string(a.dimension()) +
                                           " and " + std::to_string(b.dimension()));
    }
    return max_abs_diff(a.choi(), b.choi());
}

inline bool superop_equal(const SuperOperator& a, const SuperOperator& b, double tol = kDefaultTol) {
    return choi_deviation(a, b) < tol;
}

struct EquivalenceReport {
    bool qvars_match = false;
    bool equivalent = false;
    double deviation = std::numeric_limits<double>::infinity();
};

inline EquivalenceReport compare_programs(const Program& p, const Program& q, double tol = kEquivalenceTol) {
    EquivalenceReport r;
    r.qvars_match = qvar(p) == qvar(q);
    if (!r.qvars_match) return r;
    r.deviation = choi_deviation(denote(p), denote(q));
    r.equivalent = r.deviation < tol;
    return r;
}

/// P ≡ Q: same quantum variables and equal denotations.
inline bool program_equiv(const Program& p, const Program& q, double tol = kEquivalenceTol) {
    return compare_programs(p, q, tol).equivalent;
}

/// Certifies that guard_channel is the member of the guarded composition of
/// the branch channels selected by the representatives reps.
inline bool refinement_member(const SuperOperator& guard_channel, const GuardBasis& basis,
                              const RegisterLayout& guard, std::span<const SuperOperator> branches,
                              std::span<const OperatorValuedFunction> reps, double tol = kEquivalenceTol) {
    if (branches.size() != reps.size()) {
        throw Error(ErrorKind::Contract, "one representative per branch channel is required");
    }
    RegisterLayout data;
    for (const auto& b : branches) data = data.merged(b.layout);
    std::vector<OperatorValuedFunction> fs;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (!(reps[i].layout().same_variables(branches[i].layout))) {
            throw Error(ErrorKind::Contract, "representative " + std::to_string(i) + " is on a different register");
        }
        if (choi_deviation(branches[i], to_superop(reps[i])) >= tol) {
            throw Error(ErrorKind::Contract,
                        "representative " + std::to_string(i) + " does not induce its branch channel");
        }
        fs.push_back(reps[i].embedded(data));
    }
    const auto member = to_superop(guarded_ovf(basis, fs, guard, tol));
    return choi_deviation(guard_channel, member) < tol;
}

}  // namespace qgcl
