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

// Dense complex linear algebra on registers of named quantum variables.
//
// Factor convention: in a RegisterLayout the first variable is the
// highest-order tensor factor, so a basis index is the mixed-radix number
// whose leading digit belongs to variables()[0].

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qgcl/error.hpp"

namespace qgcl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using VariableSet = std::set<std::string>;

inline constexpr double kDefaultTol = 1e-9;

namespace detail {
inline std::atomic<std::size_t>& max_dimension_cell() {
    static std::atomic<std::size_t> cap{4096};
    return cap;
}
}  // namespace detail

/// Largest total Hilbert-space dimension any layout or tensor product may reach.
inline std::size_t max_total_dimension() { return detail::max_dimension_cell().load(); }
inline void set_max_total_dimension(std::size_t cap) { detail::max_dimension_cell().store(cap); }

inline void check_capacity(std::size_t dim, std::string_view what) {
    if (dim > max_total_dimension()) {
        throw Error(ErrorKind::Capacity, std::string(what) + " dimension " + std::to_string(dim) +
                                             " exceeds the configured maximum " +
                                             std::to_string(max_total_dimension()));
    }
}

// ---------------------------------------------------------------------------
// Small constructors

inline Matrix identity(std::size_t d) { return Matrix::Identity(d, d); }
inline Matrix zeros(std::size_t r, std::size_t c) { return Matrix::Zero(r, c); }
inline Matrix scalar(Complex c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
}

inline Vector basis_ket(std::size_t d, std::size_t i) {
    if (i >= d) throw Error(ErrorKind::Shape, "basis index out of range");
    Vector v = Vector::Zero(d);
    v(i) = 1.0;
    return v;
}

inline Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }
inline Matrix projector(const Vector& v) { return outer(v, v); }

inline bool all_finite(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const Complex z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::Shape, "max_abs_diff on matrices of different shape");
    }
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

inline void require_square(const Matrix& m, std::string_view what) {
    if (m.rows() != m.cols()) {
        throw Error(ErrorKind::Shape, std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()) + ", expected square");
    }
}

// ---------------------------------------------------------------------------
// RegisterLayout

class RegisterLayout {
public:
    struct Variable {
        std::string name;
        std::size_t dim = 2;
        friend bool operator==(const Variable&, const Variable&) = default;
    };

    RegisterLayout() = default;
    explicit RegisterLayout(std::vector<Variable> vars) : vars_(std::move(vars)) { validate(); }
    RegisterLayout(std::initializer_list<Variable> vars) : vars_(vars) { validate(); }

    const std::vector<Variable>& variables() const noexcept { return vars_; }
    std::size_t size() const noexcept { return vars_.size(); }
    bool empty() const noexcept { return vars_.empty(); }

    std::size_t dimension() const noexcept {
        std::size_t d = 1;
        for (const auto& v : vars_) d *= v.dim;
        return d;
    }

    std::optional<std::size_t> index_of(std::string_view name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].name == name) return i;
        }
        return std::nullopt;
    }
    bool contains(std::string_view name) const { return index_of(name).has_value(); }

    std::size_t dim_of(std::string_view name) const {
        auto i = index_of(name);
        if (!i) throw Error(ErrorKind::Layout, "unknown quantum variable '" + std::string(name) + "'");
        return vars_[*i].dim;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(vars_.size());
        for (const auto& v : vars_) out.push_back(v.name);
        return out;
    }
    VariableSet name_set() const {
        VariableSet s;
        for (const auto& v : vars_) s.insert(v.name);
        return s;
    }

    /// The variables whose names are in keep, in this layout's order.
    RegisterLayout restricted(const VariableSet& keep) const {
        std::vector<Variable> out;
        for (const auto& v : vars_) {
            if (keep.count(v.name)) out.push_back(v);
        }
        return RegisterLayout(std::move(out));
    }

    RegisterLayout without(const VariableSet& drop) const {
        std::vector<Variable> out;
        for (const auto& v : vars_) {
            if (!drop.count(v.name)) out.push_back(v);
        }
        return RegisterLayout(std::move(out));
    }

    /// Union keeping this layout's order first; shared names must agree on dimension.
    RegisterLayout merged(const RegisterLayout& other) const {
        std::vector<Variable> out = vars_;
        for (const auto& v : other.vars_) {
            auto i = index_of(v.name);
            if (i) {
                if (vars_[*i].dim != v.dim) {
                    throw Error(ErrorKind::Layout, "variable '" + v.name + "' declared with dimensions " +
                                                       std::to_string(vars_[*i].dim) + " and " +
                                                       std::to_string(v.dim));
                }
                continue;
            }
            out.push_back(v);
        }
        return RegisterLayout(std::move(out));
    }

    /// Disjoint concatenation.
    RegisterLayout concat(const RegisterLayout& other) const {
        std::vector<Variable> out = vars_;
        out.insert(out.end(), other.vars_.begin(), other.vars_.end());
        return RegisterLayout(std::move(out));
    }

    bool same_variables(const RegisterLayout& other) const {
        if (size() != other.size()) return false;
        for (const auto& v : other.vars_) {
            auto i = index_of(v.name);
            if (!i || vars_[*i].dim != v.dim) return false;
        }
        return true;
    }

    friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;

private:
    void validate() const {
        std::size_t d = 1;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i].name.empty()) throw Error(ErrorKind::Layout, "empty variable name");
            if (vars_[i].dim < 2) {
                throw Error(ErrorKind::Layout,
                            "variable '" + vars_[i].name + "' must have dimension >= 2");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (vars_[j].name == vars_[i].name) {
                    throw Error(ErrorKind::Layout, "duplicate variable '" + vars_[i].name + "'");
                }
            }
            d *= vars_[i].dim;
            check_capacity(d, "layout");
        }
    }

    std::vector<Variable> vars_;
};

namespace detail {

// Offsets into the full index space contributed by each joint value of a
// subset of factors. The subset is enumerated in the order given by
// positions (first position is the most significant digit).
inline std::vector<std::size_t> factor_offsets(const RegisterLayout& full,
                                               const std::vector<std::size_t>& positions) {
    const auto& vars = full.variables();
    std::vector<std::size_t> strides(vars.size(), 1);
    for (std::size_t k = vars.size(); k-- > 1;) strides[k - 1] = strides[k] * vars[k].dim;

    std::vector<std::size_t> out{0};
    for (std::size_t p : positions) {
        std::vector<std::size_t> next;
        next.reserve(out.size() * vars[p].dim);
        for (std::size_t base : out) {
            for (std::size_t digit = 0; digit < vars[p].dim; ++digit) {
                next.push_back(base + digit * strides[p]);
            }
        }
        out = std::move(next);
    }
    return out;
}

inline std::vector<std::size_t> positions_in(const RegisterLayout& sub, const RegisterLayout& full) {
    std::vector<std::size_t> pos;
    for (const auto& v : sub.variables()) {
        auto i = full.index_of(v.name);
        if (!i) throw Error(ErrorKind::Layout, "variable '" + v.name + "' is not in the target layout");
        if (full.variables()[*i].dim != v.dim) {
            throw Error(ErrorKind::Layout, "variable '" + v.name + "' has dimension " +
                                               std::to_string(v.dim) + " but " +
                                               std::to_string(full.variables()[*i].dim) +
                                               " in the target layout");
        }
        pos.push_back(*i);
    }
    return pos;
}

inline std::vector<std::size_t> complement_positions(const std::vector<std::size_t>& pos,
                                                     std::size_t n) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::find(pos.begin(), pos.end(), k) == pos.end()) rest.push_back(k);
    }
    return rest;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Core operations

/// Kronecker product; a supplies the high-order index.
inline Matrix tensor(const Matrix& a, const Matrix& b) {
    const std::size_t rows = static_cast<std::size_t>(a.rows() * b.rows());
    const std::size_t cols = static_cast<std::size_t>(a.cols() * b.cols());
    check_capacity(std::max(rows, cols), "tensor product");
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Vector tensor(const Vector& a, const Vector& b) {
    check_capacity(static_cast<std::size_t>(a.size() * b.size()), "tensor product");
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Traces out every factor of layout not named in keep. The result lives on
/// layout.restricted(keep).
inline Matrix partial_trace(const Matrix& m, const RegisterLayout& layout, const VariableSet& keep) {
    require_square(m, "partial_trace");
    if (static_cast<std::size_t>(m.rows()) != layout.dimension()) {
        throw Error(ErrorKind::Layout, "partial_trace: matrix dimension does not match layout");
    }
    for (const auto& name : keep) {
        if (!layout.contains(name)) {
            throw Error(ErrorKind::Layout, "partial_trace: unknown variable '" + name + "'");
        }
    }
    std::vector<std::size_t> kept, traced;
    for (std::size_t k = 0; k < layout.size(); ++k) {
        (keep.count(layout.variables()[k].name) ? kept : traced).push_back(k);
    }
    const auto ko = detail::factor_offsets(layout, kept);
    const auto to = detail::factor_offsets(layout, traced);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(ko.size()), static_cast<Eigen::Index>(ko.size()));
    for (std::size_t r = 0; r < ko.size(); ++r) {
        for (std::size_t c = 0; c < ko.size(); ++c) {
            Complex acc = 0.0;
            for (std::size_t t : to) acc += m(ko[r] + t, ko[c] + t);
            out(r, c) = acc;
        }
    }
    return out;
}

/// Cylindrical extension of op (acting on sub) to full: op tensored with the
/// identity on the missing factors, with sub's factors moved to their
/// positions in full.
inline Matrix embed(const Matrix& op, const RegisterLayout& sub, const RegisterLayout& full) {
    require_square(op, "embed");
    if (static_cast<std::size_t>(op.rows()) != sub.dimension()) {
        throw Error(ErrorKind::Layout, "embed: operator dimension " + std::to_string(op.rows()) +
                                           " does not match sub-layout dimension " +
                                           std::to_string(sub.dimension()));
    }
    const auto pos = detail::positions_in(sub, full);
    if (sub == full) return op;
    const auto rest = detail::complement_positions(pos, full.size());
    const auto so = detail::factor_offsets(full, pos);
    const auto ro = detail::factor_offsets(full, rest);
    const auto D = static_cast<Eigen::Index>(full.dimension());
    Matrix out = Matrix::Zero(D, D);
    for (std::size_t r : ro) {
        for (std::size_t a = 0; a < so.size(); ++a) {
            for (std::size_t b = 0; b < so.size(); ++b) {
                out(so[a] + r, so[b] + r) = op(a, b);
            }
        }
    }
    return out;
}

/// Re-expresses a vector given on `from` in the factor order of `to` (same variable set).
inline Vector permute_vector(const Vector& v, const RegisterLayout& from, const RegisterLayout& to) {
    if (!from.same_variables(to)) throw Error(ErrorKind::Layout, "permute_vector: layouts differ");
    const auto pos = detail::positions_in(from, to);
    const auto off = detail::factor_offsets(to, pos);
    Vector out(v.size());
    for (std::size_t a = 0; a < off.size(); ++a) out(off[a]) = v(a);
    return out;
}

// ---------------------------------------------------------------------------
// Predicates

inline bool is_hermitian(const Matrix& m, double tol = kDefaultTol) {
    require_square(m, "is_hermitian");
    return m.size() == 0 || (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const Matrix& m, double tol = kDefaultTol) {
    require_square(m, "is_unitary");
    return max_abs_diff(m.adjoint() * m, identity(m.rows())) <= tol;
}

/// Hermitian within tol and no eigenvalue of the Hermitian part below -tol.
inline bool is_positive(const Matrix& m, double tol = kDefaultTol) {
    require_square(m, "is_positive");
    if (m.size() == 0) return true;
    const Matrix herm = (m + m.adjoint()) / 2.0;
    if ((m - herm).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

/// Loewner order a ⊑ b.
inline bool loewner_leq(const Matrix& a, const Matrix& b, double tol = kDefaultTol) {
    require_square(a, "loewner_leq");
    require_square(b, "loewner_leq");
    if (a.rows() != b.rows()) throw Error(ErrorKind::Shape, "loewner_leq: dimension mismatch");
    return is_positive(b - a, tol);
}

// ---------------------------------------------------------------------------
// Kraus families

/// Sum_k E_k rho E_k^dagger.
inline Matrix apply_kraus(std::span<const Matrix> kraus, const Matrix& rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& e : kraus) out += e * rho * e.adjoint();
    return out;
}

/// Sum_k E_k^dagger E_k.
inline Matrix kraus_gram(std::span<const Matrix> kraus, std::size_t dim) {
    Matrix g = Matrix::Zero(dim, dim);
    for (const auto& e : kraus) g += e.adjoint() * e;
    return g;
}

/// Choi matrix sum_k (E_k ⊗ I)|Ω><Ω|(E_k ⊗ I)^dagger with |Ω> = sum_i |i>|i>.
inline Matrix choi(std::span<const Matrix> kraus, std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    check_capacity(dim * dim, "choi");
    Matrix out = Matrix::Zero(d * d, d * d);
    for (const auto& e : kraus) {
        if (e.rows() != d || e.cols() != d) {
            throw Error(ErrorKind::Shape, "choi: Kraus operators must all be " + std::to_string(dim) +
                                              "x" + std::to_string(dim));
        }
        // (E ⊗ I)|Ω> has entry E(a, i) at index a*d + i.
        Vector v(d * d);
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index i = 0; i < d; ++i) v(a * d + i) = e(a, i);
        }
        out.noalias() += v * v.adjoint();
    }
    return out;
}

inline Matrix choi(std::initializer_list<Matrix> kraus, std::size_t dim) {
    return choi(std::span<const Matrix>(kraus.begin(), kraus.size()), dim);
}

// ---------------------------------------------------------------------------
// DensityMatrix

/// A partial density operator over a register layout.
class DensityMatrix {
public:
    DensityMatrix(Matrix m, RegisterLayout layout, double tol = kDefaultTol)
        : matrix_(std::move(m)), layout_(std::move(layout)) {
        require_square(matrix_, "density matrix");
        if (static_cast<std::size_t>(matrix_.rows()) != layout_.dimension()) {
            throw Error(ErrorKind::Layout, "density matrix dimension " + std::to_string(matrix_.rows()) +
                                               " does not match layout dimension " +
                                               std::to_string(layout_.dimension()));
        }
        if (!all_finite(matrix_)) throw Error(ErrorKind::Contract, "density matrix has non-finite entries");
        if (!is_hermitian(matrix_, tol)) throw Error(ErrorKind::Contract, "density matrix is not Hermitian");
        if (!is_positive(matrix_, tol)) throw Error(ErrorKind::Contract, "density matrix is not positive");
        if (matrix_.trace().real() > 1.0 + tol) {
            throw Error(ErrorKind::Contract, "density matrix has trace above 1");
        }
    }

    static DensityMatrix pure(const Vector& psi, RegisterLayout layout) {
        return DensityMatrix(projector(psi), std::move(layout));
    }

    const Matrix& matrix() const noexcept { return matrix_; }
    const RegisterLayout& layout() const noexcept { return layout_; }
    double trace() const { return matrix_.trace().real(); }

private:
    Matrix matrix_;
    RegisterLayout layout_;
};

}  // namespace qgcl
