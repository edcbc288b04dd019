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

// Named operators available in source programs without a declaration.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "qgcl/program.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl::gates {

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    Matrix m(2, 2);
    m << s, s, s, -s;
    return m;
}

inline Matrix phase_s() {
    Matrix m(2, 2);
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

inline Matrix phase_t() {
    Matrix m(2, 2);
    m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4);
    return m;
}

/// Controlled-NOT with the first factor as control.
inline Matrix cnot() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

inline Matrix swap() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
}

/// Cyclic shift |k> -> |k+1 mod d>.
inline Matrix shift(std::size_t d) {
    Matrix m = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < d; ++k) m((k + 1) % d, k) = 1;
    return m;
}

/// Projective measurement in the computational basis, outcomes 0..d-1.
inline Measurement computational(std::size_t d) {
    Measurement m;
    m.label = "M0";
    for (std::size_t k = 0; k < d; ++k) {
        m.operators.emplace_back(static_cast<std::int64_t>(k), projector(basis_ket(d, k)));
    }
    return m;
}

/// Qubit measurement in the |+>, |-> basis (outcome 0 is |+>).
inline Measurement plus_minus() {
    const double s = 1.0 / std::sqrt(2.0);
    Vector plus(2), minus(2);
    plus << s, s;
    minus << s, -s;
    Measurement m;
    m.label = "M1";
    m.operators.emplace_back(0, projector(plus));
    m.operators.emplace_back(1, projector(minus));
    return m;
}

/// Built-in unitary by name at the given register dimension, if one exists.
inline std::optional<Matrix> builtin_unitary(std::string_view name, std::size_t dim) {
    if (name == "I") return identity(dim);
    if (name == "SHIFT") return shift(dim);
    if (dim == 2) {
        if (name == "X") return pauli_x();
        if (name == "Y") return pauli_y();
        if (name == "Z") return pauli_z();
        if (name == "H") return hadamard();
        if (name == "S") return phase_s();
        if (name == "T") return phase_t();
    }
    if (dim == 4) {
        if (name == "CX") return cnot();
        if (name == "SWAP") return swap();
    }
    return std::nullopt;
}

inline bool is_builtin_unitary_name(std::string_view name) {
    for (auto n : {"I", "SHIFT", "X", "Y", "Z", "H", "S", "T", "CX", "SWAP"}) {
        if (name == n) return true;
    }
    return false;
}

inline std::optional<Measurement> builtin_measurement(std::string_view name, std::size_t dim) {
    if (name == "M0") return computational(dim);
    if (name == "M1" && dim == 2) return plus_minus();
    return std::nullopt;
}

inline bool is_builtin_measurement_name(std::string_view name) { return name == "M0" || name == "M1"; }

}  // namespace qgcl::gates
