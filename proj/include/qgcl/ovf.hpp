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

// Operator-valued functions, super-operators in Kraus form, and the guarded
// compositions of unitaries, operator-valued functions and super-operators.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qgcl/classical_state.hpp"
#include "qgcl/error.hpp"
#include "qgcl/program.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl {

/// Upper bound on the number of classical states in a composed domain.
inline constexpr std::size_t kMaxDomainSize = std::size_t{1} << 16;

// ---------------------------------------------------------------------------
// SuperOperator

/// A completely positive map rho -> sum_k E_k rho E_k^dagger over a layout.
/// An empty Kraus family is the zero map.
struct SuperOperator {
    RegisterLayout layout;
    std::vector<Matrix> kraus;

    SuperOperator() = default;
    SuperOperator(RegisterLayout l, std::vector<Matrix> k) : layout(std::move(l)), kraus(std::move(k)) {
        const auto d = static_cast<Eigen::Index>(layout.dimension());
        for (const auto& e : kraus) {
            if (e.rows() != d || e.cols() != d) {
                throw Error(ErrorKind::Shape, "Kraus operator is " + std::to_string(e.rows()) + "x" +
                                                  std::to_string(e.cols()) + ", layout dimension is " +
                                                  std::to_string(d));
            }
        }
    }

    static SuperOperator zero(RegisterLayout l) { return SuperOperator(std::move(l), {}); }
    static SuperOperator identity(RegisterLayout l) {
        const auto d = l.dimension();
        return SuperOperator(std::move(l), {qgcl::identity(d)});
    }
    static SuperOperator unitary(RegisterLayout l, Matrix u) { return SuperOperator(std::move(l), {std::move(u)}); }

    std::size_t dimension() const noexcept { return layout.dimension(); }

    Matrix apply(const Matrix& rho) const {
        if (rho.rows() != static_cast<Eigen::Index>(dimension()) || rho.cols() != rho.rows()) {
            throw Error(ErrorKind::Shape, "input is not a " + std::to_string(dimension()) + "-dimensional operator");
        }
        return apply_kraus(kraus, rho);
    }

    Matrix gram() const { return kraus_gram(kraus, dimension()); }
    Matrix choi() const { return qgcl::choi(kraus, dimension()); }

    bool trace_nonincreasing(double tol = kDefaultTol) const {
        return loewner_leq(gram(), qgcl::identity(dimension()), tol);
    }
    bool trace_preserving(double tol = kDefaultTol) const {
        return max_abs_diff(gram(), qgcl::identity(dimension())) <= tol;
    }

    /// Kraus family {E_k^dagger}: the Heisenberg-picture dual.
    SuperOperator adjoint() const {
        std::vector<Matrix> out;
        out.reserve(kraus.size());
        for (const auto& e : kraus) out.push_back(e.adjoint());
        return SuperOperator(layout, std::move(out));
    }

    /// Cylindrical extension onto a larger register.
    SuperOperator embedded(const RegisterLayout& full) const {
        if (full == layout) return *this;
        std::vector<Matrix> out;
        out.reserve(kraus.size());
        for (const auto& e : kraus) out.push_back(embed(e, layout, full));
        return SuperOperator(full, std::move(out));
    }

    /// Sequential composition: first this map, then `next` (same layout).
    SuperOperator then(const SuperOperator& next) const {
        if (!(next.layout == layout)) throw Error(ErrorKind::Layout, "composing super-operators on different layouts");
        std::vector<Matrix> out;
        out.reserve(kraus.size() * next.kraus.size());
        for (const auto& f : next.kraus) {
            for (const auto& e : kraus) out.push_back(f * e);
        }
        return SuperOperator(layout, std::move(out));
    }

    /// Drop Kraus operators that are numerically zero.
    SuperOperator pruned(double tol = 0.0) const {
        std::vector<Matrix> out;
        for (const auto& e : kraus) {
            if (e.cwiseAbs().maxCoeff() > tol) out.push_back(e);
        }
        return SuperOperator(layout, std::move(out));
    }
};

/// Sum of super-operators on one layout (Kraus families concatenated).
inline SuperOperator superop_sum(const RegisterLayout& layout, std::span<const SuperOperator> parts) {
    std::vector<Matrix> out;
    for (const auto& s : parts) {
        if (!(s.layout == layout)) throw Error(ErrorKind::Layout, "summing super-operators on different layouts");
        out.insert(out.end(), s.kraus.begin(), s.kraus.end());
    }
    return SuperOperator(layout, std::move(out));
}

/// A Kraus family with at most d^2 operators inducing the same map, read off
/// the eigendecomposition of the Choi matrix.
inline SuperOperator compress_kraus(const SuperOperator& s, double tol = 1e-12) {
    const auto d = static_cast<Eigen::Index>(s.dimension());
    if (s.kraus.empty()) return s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.choi());
    std::vector<Matrix> out;
    for (Eigen::Index c = es.eigenvalues().size(); c-- > 0;) {
        const double ev = es.eigenvalues()(c);
        if (ev <= tol) continue;
        const Vector v = std::sqrt(ev) * es.eigenvectors().col(c);
        Matrix e(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index i = 0; i < d; ++i) e(a, i) = v(a * d + i);
        }
        out.push_back(std::move(e));
    }
    return SuperOperator(s.layout, std::move(out));
}

/// E'_j = sum_k w(j, k) E_k. For an isometric w this yields another Kraus
/// family of the same map.
inline std::vector<Matrix> mix_kraus(std::span<const Matrix> kraus, const Matrix& w) {
    if (static_cast<std::size_t>(w.cols()) != kraus.size()) {
        throw Error(ErrorKind::Shape, "mixing matrix has " + std::to_string(w.cols()) + " columns for " +
                                          std::to_string(kraus.size()) + " Kraus operators");
    }
    std::vector<Matrix> out;
    if (kraus.empty()) return out;
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
        Matrix acc = Matrix::Zero(kraus.front().rows(), kraus.front().cols());
        for (std::size_t k = 0; k < kraus.size(); ++k) acc += w(j, static_cast<Eigen::Index>(k)) * kraus[k];
        out.push_back(std::move(acc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// OperatorValuedFunction

/// A finite map from classical states to operators on one register.
///
/// Validated instances satisfy sum F(d)^dagger F(d) <= I. The unchecked
/// factory builds the same structure without that bound; it is used for
/// Heisenberg-picture families such as the daggers of a valid function.
class OperatorValuedFunction {
public:
    using Entry = std::pair<ClassicalState, Matrix>;

    OperatorValuedFunction(RegisterLayout layout, std::vector<Entry> table, double tol = kDefaultTol)
        : OperatorValuedFunction(std::move(layout), std::move(table), tol, true) {}

    static OperatorValuedFunction unchecked(RegisterLayout layout, std::vector<Entry> table) {
        return OperatorValuedFunction(std::move(layout), std::move(table), 0.0, false);
    }

    const RegisterLayout& layout() const noexcept { return layout_; }
    std::size_t dimension() const noexcept { return layout_.dimension(); }
    const std::vector<Entry>& entries() const noexcept { return table_; }
    std::size_t size() const noexcept { return table_.size(); }

    std::vector<ClassicalState> domain() const {
        std::vector<ClassicalState> out;
        out.reserve(table_.size());
        for (const auto& [s, _] : table_) out.push_back(s);
        return out;
    }

    bool contains(const ClassicalState& s) const { return index_.count(s) > 0; }

    const Matrix& at(const ClassicalState& s) const {
        auto it = index_.find(s);
        if (it == index_.end()) throw Error(ErrorKind::Key, "classical state " + s.str() + " is not in the domain");
        return table_[it->second].second;
    }

    std::vector<Matrix> operators() const {
        std::vector<Matrix> out;
        out.reserve(table_.size());
        for (const auto& [_, m] : table_) out.push_back(m);
        return out;
    }

    /// sum_d F(d)^dagger F(d).
    Matrix gram() const {
        Matrix g = Matrix::Zero(dimension(), dimension());
        for (const auto& [_, m] : table_) g += m.adjoint() * m;
        return g;
    }

    bool is_valid(double tol = kDefaultTol) const { return loewner_leq(gram(), qgcl::identity(dimension()), tol); }
    bool is_full(double tol = kDefaultTol) const { return max_abs_diff(gram(), qgcl::identity(dimension())) <= tol; }

    /// Elementwise dagger, as an unchecked function.
    OperatorValuedFunction dagger() const {
        std::vector<Entry> t;
        t.reserve(table_.size());
        for (const auto& [s, m] : table_) t.emplace_back(s, m.adjoint());
        return unchecked(layout_, std::move(t));
    }

    /// Cylindrical extension: every operator tensored with the identity.
    OperatorValuedFunction embedded(const RegisterLayout& full) const {
        if (full == layout_) return *this;
        std::vector<Entry> t;
        t.reserve(table_.size());
        for (const auto& [s, m] : table_) t.emplace_back(s, embed(m, layout_, full));
        return OperatorValuedFunction(full, std::move(t), 0.0, false);
    }

    /// The same operators re-expressed on a permutation of the layout.
    OperatorValuedFunction permuted(const RegisterLayout& target) const {
        if (!target.same_variables(layout_)) {
            throw Error(ErrorKind::Layout, "permutation target has different variables");
        }
        return embedded(target);
    }

private:
    OperatorValuedFunction(RegisterLayout layout, std::vector<Entry> table, double tol, bool validate)
        : layout_(std::move(layout)), table_(std::move(table)) {
        if (table_.empty()) throw Error(ErrorKind::Contract, "operator-valued function with empty domain");
        const auto d = static_cast<Eigen::Index>(layout_.dimension());
        for (std::size_t i = 0; i < table_.size(); ++i) {
            const auto& [s, m] = table_[i];
            if (m.rows() != d || m.cols() != d) {
                throw Error(ErrorKind::Shape, "operator for " + s.str() + " is " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()) + ", expected dimension " +
                                                  std::to_string(d));
            }
            if (!all_finite(m)) throw Error(ErrorKind::Contract, "operator for " + s.str() + " is not finite");
            if (!index_.emplace(s, i).second) {
                throw Error(ErrorKind::Contract, "classical state " + s.str() + " appears twice");
            }
        }
        if (validate && !is_valid(tol)) {
            throw Error(ErrorKind::Contract, "operator-valued function violates sum F^dagger F <= I");
        }
    }

    RegisterLayout layout_;
    std::vector<Entry> table_;
    std::unordered_map<ClassicalState, std::size_t, ClassicalStateHash> index_;
};

/// The induced super-operator E(F) = sum_d F(d) o F(d)^dagger.
inline SuperOperator to_superop(const OperatorValuedFunction& f) { return SuperOperator(f.layout(), f.operators()); }

/// An operator-valued function whose induced super-operator is s; the
/// classical states are [key<-0], [key<-1], ... (or eps for a one-element
/// family, and eps -> 0 for the zero map).
inline OperatorValuedFunction ovf_from_kraus(const SuperOperator& s, const std::string& key = "k") {
    std::vector<OperatorValuedFunction::Entry> t;
    if (s.kraus.empty()) {
        t.emplace_back(ClassicalState::empty(), zeros(s.dimension(), s.dimension()));
    } else if (s.kraus.size() == 1) {
        t.emplace_back(ClassicalState::empty(), s.kraus.front());
    } else {
        for (std::size_t k = 0; k < s.kraus.size(); ++k) {
            t.emplace_back(ClassicalState::bind(key, static_cast<std::int64_t>(k)), s.kraus[k]);
        }
    }
    return OperatorValuedFunction::unchecked(s.layout, std::move(t));
}

// ---------------------------------------------------------------------------
// Guarded compositions

/// Normalised weight of F(d) within F:
/// sqrt(tr F(d)^dagger F(d) / sum_t tr F(t)^dagger F(t)), or 1/sqrt(|domain|)
/// when every operator is (numerically) zero.
inline double lambda_weight(const OperatorValuedFunction& f, const ClassicalState& s, double tol = kDefaultTol) {
    const double num = f.at(s).squaredNorm();
    double den = 0.0;
    for (const auto& [_, m] : f.entries()) den += m.squaredNorm();
    if (den < tol) return 1.0 / std::sqrt(static_cast<double>(f.size()));
    return std::sqrt(num / den);
}

/// All weights of f in domain order.
inline std::vector<double> lambda_weights(const OperatorValuedFunction& f, double tol = kDefaultTol) {
    std::vector<double> out;
    double den = 0.0;
    for (const auto& [_, m] : f.entries()) den += m.squaredNorm();
    for (const auto& [_, m] : f.entries()) {
        out.push_back(den < tol ? 1.0 / std::sqrt(static_cast<double>(f.size())) : std::sqrt(m.squaredNorm() / den));
    }
    return out;
}

namespace detail {

inline void check_guard_shape(const Matrix& basis, std::size_t arity, const RegisterLayout& guard) {
    const auto g = static_cast<Eigen::Index>(guard.dimension());
    if (basis.rows() != g || basis.cols() != g) {
        throw Error(ErrorKind::Contract, "guard basis must be " + std::to_string(g) + "x" + std::to_string(g));
    }
    if (arity != static_cast<std::size_t>(g)) {
        throw Error(ErrorKind::Contract, std::to_string(arity) + " branches for a guard of dimension " +
                                             std::to_string(g));
    }
}

inline RegisterLayout guarded_layout(const RegisterLayout& data, const RegisterLayout& guard) {
    for (const auto& v : guard.variables()) {
        if (data.contains(v.name)) {
            throw Error(ErrorKind::Layout, "guard variable '" + v.name + "' also occurs in the branches");
        }
    }
    return data.concat(guard);
}

}  // namespace detail

/// sum_i U_i ⊗ |b_i><b_i| on data ⊗ guard, so that U(|psi>|b_i>) = (U_i|psi>)|b_i>.
inline Matrix guarded_unitary(const GuardBasis& basis, std::span<const Matrix> us, const RegisterLayout& data,
                              const RegisterLayout& guard, double tol = kDefaultTol) {
    detail::check_guard_shape(basis.matrix, us.size(), guard);
    const auto full = detail::guarded_layout(data, guard);
    check_capacity(full.dimension(), "guarded unitary");
    if (!is_unitary(basis.matrix, tol)) throw Error(ErrorKind::Contract, "guard basis is not orthonormal");
    const auto d = static_cast<Eigen::Index>(data.dimension());
    Matrix out = Matrix::Zero(full.dimension(), full.dimension());
    for (std::size_t i = 0; i < us.size(); ++i) {
        if (us[i].rows() != d || us[i].cols() != d) {
            throw Error(ErrorKind::Contract, "branch operator " + std::to_string(i) + " has the wrong dimension");
        }
        if (!is_unitary(us[i], tol)) {
            throw Error(ErrorKind::Contract, "branch operator " + std::to_string(i) + " is not unitary");
        }
        out += tensor(us[i], projector(basis.state(i)));
    }
    return out;
}

/// Guarded composition without validation of the inputs' bound. The branch
/// functions must share one data layout; the guard factor is appended last.
/// Domain: every tuple (d_1, ..., d_n), in lexicographic order, labelled by
/// the superposition of its components.
inline OperatorValuedFunction guarded_compose_unchecked(const GuardBasis& basis,
                                                        std::span<const OperatorValuedFunction> fs,
                                                        const RegisterLayout& guard, double tol = kDefaultTol) {
    if (fs.empty()) throw Error(ErrorKind::Contract, "guarded composition of zero functions");
    detail::check_guard_shape(basis.matrix, fs.size(), guard);
    const RegisterLayout& data = fs.front().layout();
    for (const auto& f : fs) {
        if (!(f.layout() == data)) {
            throw Error(ErrorKind::Layout, "guarded composition needs branch functions on one common layout");
        }
    }
    const auto full = detail::guarded_layout(data, guard);
    check_capacity(full.dimension(), "guarded composition");

    std::size_t count = 1;
    for (const auto& f : fs) {
        count *= f.size();
        if (count > kMaxDomainSize) {
            throw Error(ErrorKind::Capacity, "guarded composition domain exceeds " + std::to_string(kMaxDomainSize));
        }
    }

    const std::size_t n = fs.size();
    std::vector<std::vector<double>> lambdas;
    std::vector<Matrix> projectors;
    for (std::size_t i = 0; i < n; ++i) {
        lambdas.push_back(lambda_weights(fs[i], tol));
        projectors.push_back(projector(basis.state(i)));
    }

    std::vector<OperatorValuedFunction::Entry> table;
    table.reserve(count);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<ClassicalState> parts;
        parts.reserve(n);
        Matrix op = Matrix::Zero(full.dimension(), full.dimension());
        for (std::size_t i = 0; i < n; ++i) {
            parts.push_back(fs[i].entries()[idx[i]].first);
            double coeff = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k != i) coeff *= lambdas[k][idx[k]];
            }
            if (coeff != 0.0) op += coeff * tensor(fs[i].entries()[idx[i]].second, projectors[i]);
        }
        table.emplace_back(ClassicalState::oplus(std::move(parts)), std::move(op));
        // odometer, last component fastest
        for (std::size_t i = n; i-- > 0;) {
            if (++idx[i] < fs[i].size()) break;
            idx[i] = 0;
        }
    }
    return OperatorValuedFunction::unchecked(full, std::move(table));
}

/// Guarded composition of operator-valued functions. The result satisfies
/// sum F^dagger F <= I, and is full whenever every input is full.
inline OperatorValuedFunction guarded_ovf(const GuardBasis& basis, std::span<const OperatorValuedFunction> fs,
                                          const RegisterLayout& guard, double tol = kDefaultTol) {
    if (!is_unitary(basis.matrix, tol)) throw Error(ErrorKind::Contract, "guard basis is not orthonormal");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (!fs[i].is_valid(tol)) {
            throw Error(ErrorKind::Contract, "branch function " + std::to_string(i) + " violates sum F^dagger F <= I");
        }
    }
    auto f = guarded_compose_unchecked(basis, fs, guard, tol);
    return OperatorValuedFunction(f.layout(), f.entries(), tol);
}

/// One member of the guarded composition of super-operators: E applied to
/// the guarded composition of the given representatives (or of each
/// channel's own Kraus family when no representatives are supplied).
inline SuperOperator guarded_superop_member(const GuardBasis& basis, std::span<const SuperOperator> es,
                                            const RegisterLayout& guard,
                                            std::optional<std::vector<OperatorValuedFunction>> reps = std::nullopt,
                                            double tol = kDefaultTol) {
    if (es.empty()) throw Error(ErrorKind::Contract, "guarded composition of zero super-operators");
    std::vector<OperatorValuedFunction> fs;
    if (reps) {
        if (reps->size() != es.size()) {
            throw Error(ErrorKind::Contract, "one representative per super-operator is required");
        }
        for (std::size_t i = 0; i < es.size(); ++i) {
            const auto& r = (*reps)[i];
            if (r.dimension() != es[i].dimension() ||
                max_abs_diff(to_superop(r).choi(), es[i].choi()) > std::max(tol, 1e-8)) {
                throw Error(ErrorKind::Contract,
                            "representative " + std::to_string(i) + " does not induce its super-operator");
            }
            fs.push_back(r.embedded(es[i].layout));
        }
    } else {
        for (const auto& e : es) fs.push_back(ovf_from_kraus(e));
    }
    return to_superop(guarded_ovf(basis, fs, guard, tol));
}

}  // namespace qgcl
