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

// Seeded generators for random unitaries, states, measurements and small
// programs. Every generator takes the engine explicitly, so a fixed seed
// reproduces the same sequence.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qgcl/program.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl::random {

using Engine = std::mt19937_64;

inline Matrix gaussian(std::size_t rows, std::size_t cols, Engine& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(n(rng), n(rng));
    }
    return m;
}

/// Haar-distributed unitary (QR of a complex Gaussian, phases fixed by R's diagonal).
inline Matrix unitary(std::size_t d, Engine& rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(d, d, rng));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const Complex rk = r(k, k);
        if (std::abs(rk) > 0) q.col(k) *= rk / std::abs(rk);
    }
    return q;
}

/// Isometry with d columns inside dimension d * k, split into k blocks: a
/// complete measurement with k outcomes.
inline std::vector<Matrix> kraus_family(std::size_t d, std::size_t k, Engine& rng) {
    const Matrix v = unitary(d * k, rng).leftCols(static_cast<Eigen::Index>(d));
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(v.middleRows(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)));
    }
    return out;
}

inline Measurement measurement(std::size_t d, std::size_t outcomes, Engine& rng) {
    Measurement m;
    auto ks = kraus_family(d, outcomes, rng);
    for (std::size_t i = 0; i < ks.size(); ++i) m.operators.emplace_back(static_cast<std::int64_t>(i), ks[i]);
    return m;
}

/// Density matrix of the given rank (full rank when rank == 0), trace 1.
inline Matrix density(std::size_t d, Engine& rng, std::size_t rank = 0) {
    const Matrix g = gaussian(d, rank == 0 ? d : rank, rng);
    Matrix rho = g * g.adjoint();
    return rho / rho.trace();
}

inline Vector pure_state(std::size_t d, Engine& rng) {
    Vector v = gaussian(d, 1, rng).col(0);
    return v / v.norm();
}

/// Positive operator with spectrum in [0, scale].
inline Matrix positive(std::size_t d, Engine& rng, double scale = 1.0) {
    const Matrix u = unitary(d, rng);
    std::uniform_real_distribution<double> ev(0.0, scale);
    Eigen::VectorXd s(d);
    for (std::size_t i = 0; i < d; ++i) s(static_cast<Eigen::Index>(i)) = ev(rng);
    return u * s.cast<Complex>().asDiagonal() * u.adjoint();
}

inline std::size_t uniform(std::size_t lo, std::size_t hi, Engine& rng) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Fresh classical variable names.
class Names {
public:
    explicit Names(std::string prefix = "x") : prefix_(std::move(prefix)) {}
    std::string next() { return prefix_ + std::to_string(++count_); }

private:
    std::string prefix_;
    std::size_t count_ = 0;
};

/// A random unitary, or a measurement whose branches are random unitaries
/// (or skip), all acting on `on`.
inline Program unitary_or_measurement(const RegisterLayout& on, Engine& rng, Names& names, bool allow_measure = true) {
    const auto d = on.dimension();
    if (!allow_measure || uniform(0, 1, rng) == 0) return prog::unitary(on, unitary(d, rng));
    const auto k = uniform(2, 3, rng);
    std::vector<std::pair<std::int64_t, Program>> branches;
    for (std::size_t i = 0; i < k; ++i) {
        branches.emplace_back(static_cast<std::int64_t>(i),
                              uniform(0, 2, rng) == 0 ? prog::skip() : prog::unitary(on, unitary(d, rng)));
    }
    return prog::measure(names.next(), on, measurement(d, k, rng), std::move(branches));
}

/// A coin program on `on` that always contains a measurement: a unitary
/// followed by a measurement with unitary/skip/abort branches (abort only
/// when allow_abort).
inline Program measuring_coin(const RegisterLayout& on, Engine& rng, Names& names, bool allow_abort = false) {
    const auto d = on.dimension();
    const auto k = uniform(2, 3, rng);
    std::vector<std::pair<std::int64_t, Program>> branches;
    for (std::size_t i = 0; i < k; ++i) {
        const auto pick = uniform(0, allow_abort ? 2 : 1, rng);
        branches.emplace_back(static_cast<std::int64_t>(i), pick == 0   ? prog::unitary(on, unitary(d, rng))
                                                             : pick == 1 ? prog::skip()
                                                                         : prog::abort());
    }
    return prog::seq(prog::unitary(on, unitary(d, rng)),
                     prog::measure(names.next(), on, measurement(d, k, rng), std::move(branches)));
}

}  // namespace qgcl::random
