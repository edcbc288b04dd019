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

// Worked examples and theorem checks, run end to end through the library.
// Each suite returns named checks with their measured deviation and the
// tolerance they must meet.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qgcl/builtins.hpp"
#include "qgcl/equivalence.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/program.hpp"
#include "qgcl/random.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl::reproduce {

struct Check {
    std::string name;
    double deviation;
    double tol;
    bool pass() const { return std::isfinite(deviation) && deviation <= tol; }
};

struct Report {
    std::string suite;
    std::vector<std::string> info;
    std::vector<Check> checks;

    bool passed() const {
        for (const auto& c : checks) {
            if (!c.pass()) return false;
        }
        return !checks.empty();
    }

    void check(std::string name, double dev, double tol) { checks.push_back({std::move(name), dev, tol}); }

    std::string format() const {
        std::string out;
        char buf[64];
        for (const auto& line : info) out += suite + ": " + line + "\n";
        for (const auto& c : checks) {
            std::snprintf(buf, sizeof buf, "%.3e (tol %.0e)", c.deviation, c.tol);
            out += suite + ": " + c.name + ": deviation " + buf + " " + (c.pass() ? "PASS" : "FAIL") + "\n";
        }
        out += suite + ": " + (passed() ? "PASS" : "FAIL") + "\n";
        return out;
    }
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16g", v);
    return buf;
}

// ---------------------------------------------------------------------------

/// Coined walk on the 4-cycle: shifts S_1 = +1 and S_2 = -1 combined along
/// a coin qubit, and one walk step W = S (I ⊗ H).
inline Report walk() {
    Report r{"walk", {}, {}};
    const RegisterLayout v({{"v", 4}}), c({{"c", 2}});
    const Matrix s1 = gates::shift(4);
    const Matrix s2 = s1.adjoint();
    const std::vector<Matrix> shifts{s1, s2};
    const Matrix S = guarded_unitary(GuardBasis::computational(2), shifts, v, c);
    double dev = 0.0;
    for (std::size_t vert = 0; vert < 4; ++vert) {
        for (std::size_t i = 0; i < 2; ++i) {
            const Vector in = tensor(basis_ket(4, vert), basis_ket(2, i));
            const Vector want = tensor(Vector(shifts[i] * basis_ket(4, vert)), basis_ket(2, i));
            dev = std::max(dev, (S * in - want).cwiseAbs().maxCoeff());
        }
    }
    r.check("S|v,i> = (S_i|v>)|i> on all 8 basis vectors", dev, 1e-12);
    const Matrix W = S * tensor(identity(4), gates::hadamard());
    r.check("W = S(I ⊗ H) is unitary", max_abs_diff(W.adjoint() * W, identity(8)), 1e-10);

    const Program step = prog::qchoice(prog::unitary(c, gates::hadamard(), "H"), GuardBasis::computational(2),
                                       {prog::unitary(v, s1, "S1"), prog::unitary(v, s2, "S2")});
    const SuperOperator w_channel(v.concat(c), {W});
    r.check("quantum choice program denotes W", choi_deviation(w_channel, denote(step)), 1e-10);

    const Matrix rho = tensor(projector(basis_ket(4, 0)), projector(Vector((basis_ket(2, 0) + basis_ket(2, 1)) /
                                                                           std::sqrt(2.0))));
    const auto out = apply(step, DensityMatrix(rho, v.concat(c)));
    r.check("one step from |0>|+> matches W rho W^dagger", max_abs_diff(out.matrix(), W * rho * W.adjoint()), 1e-10);
    return r;
}

/// Guarded composition of the computational and |+>/|-> measurements along
/// a fresh qubit.
inline Report gmeas() {
    Report r{"gmeas", {}, {}};
    const RegisterLayout q({{"q", 2}}), c({{"c", 2}});
    const auto m0 = gates::computational(2);
    const auto m1 = gates::plus_minus();
    const Program guard = prog::guarded(c, {prog::measure_discard("x", q, m0), prog::measure_discard("y", q, m1)});
    const auto den = semi_classical(guard);
    const auto f = den.function.permuted(q.concat(c));
    r.info.push_back("classical states: " + std::to_string(den.classical_states.size()));
    double dev = 0.0;
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 2; ++j) {
            const auto key = ClassicalState::oplus({ClassicalState::bind("x", i), ClassicalState::bind("y", j)});
            const Matrix want = (tensor(m0.at(i), projector(basis_ket(2, 0))) +
                                 tensor(m1.at(j), projector(basis_ket(2, 1)))) /
                                std::sqrt(2.0);
            dev = std::max(dev, max_abs_diff(f.at(key), want));
        }
    }
    r.check("M_ij = (M_i^0 ⊕ M_j^1)/sqrt(2) entrywise", dev, 1e-12);
    r.check("sum M_ij^dagger M_ij = I_4", max_abs_diff(f.gram(), identity(4)), 1e-10);
    r.check("lambda of each outcome = 1/sqrt(2)",
            std::abs(lambda_weight(semi_classical(prog::measure_discard("x", q, m0)).function,
                                   ClassicalState::bind("x", 0)) -
                     1.0 / std::sqrt(2.0)),
            1e-12);
    return r;
}

/// Random choice between the two measurements, implemented with a local
/// coin prepared by U = [[sqrt p, sqrt q], [sqrt q, -sqrt p]].
inline Program bb84_program(double p) {
    const RegisterLayout q1({{"q1", 2}}), c({{"q", 2}});
    const double a = std::sqrt(p), b = std::sqrt(1.0 - p);
    Matrix u(2, 2);
    u << a, b, b, -a;
    const Program body = prog::seq(prog::unitary(c, u, "U"),
                                   prog::guarded(c, {prog::measure_discard("x", q1, gates::computational(2)),
                                                     prog::measure_discard("y", q1, gates::plus_minus())}));
    return prog::block(c, projector(basis_ket(2, 0)), body);
}

inline Report bb84(double p = 0.3, double theta = 0.4) {
    Report r{"bb84", {}, {}};
    const RegisterLayout q1({{"q1", 2}});
    Vector psi(2);
    psi << std::cos(theta), std::sin(theta);
    const Matrix rho = projector(psi);
    const auto out = apply(bb84_program(p), DensityMatrix(rho, q1));
    Matrix rho0 = Matrix::Zero(2, 2), rho1 = Matrix::Zero(2, 2);
    for (const auto& [_, m] : gates::computational(2).operators) rho0 += m * rho * m.adjoint();
    for (const auto& [_, m] : gates::plus_minus().operators) rho1 += m * rho * m.adjoint();
    r.info.push_back("p = " + fmt(p) + ", psi = cos(" + fmt(theta) + ")|0> + sin(" + fmt(theta) + ")|1>");
    r.check("[[P]](|psi><psi|) = p rho_0 + q rho_1", max_abs_diff(out.matrix(), p * rho0 + (1.0 - p) * rho1),
            1e-10);
    return r;
}

/// Moving the coin to the end of the program: unitary coins (25 random
/// instances) and measuring coin programs (10 random instances).
inline Report local(std::uint64_t seed = 0, std::size_t n1 = 25, std::size_t n2 = 10) {
    Report r{"local", {}, {}};
    random::Engine rng(seed);
    random::Names names("m");
    double dev1 = 0.0;
    for (std::size_t t = 0; t < n1; ++t) {
        const RegisterLayout c({{"c", random::uniform(2, 3, rng)}}), q({{"q", 2}});
        std::vector<Program> branches;
        for (std::size_t i = 0; i < c.dimension(); ++i) branches.push_back(random::unitary_or_measurement(q, rng, names));
        const GuardBasis basis{t % 2 ? random::unitary(c.dimension(), rng) : identity(c.dimension()), {}};
        const auto rel = relocate_unitary_coin(c, random::unitary(c.dimension(), rng), basis, branches);
        const auto rep = compare_programs(rel.lhs, rel.rhs);
        dev1 = std::max(dev1, rep.qvars_match ? rep.deviation : INFINITY);
    }
    r.check(std::to_string(n1) + " unitary-coin instances equivalent", dev1, 1e-8);

    double dev2 = 0.0;
    std::size_t max_dim = 0;
    for (std::size_t t = 0; t < n2; ++t) {
        const RegisterLayout c({{"c", 2}}), q({{"q", 2}});
        const Program coin = random::measuring_coin(c, rng, names, t % 3 == 2);
        std::vector<Program> branches;
        for (std::size_t i = 0; i < 2; ++i) branches.push_back(random::unitary_or_measurement(q, rng, names));
        const auto rel = relocate_coin_program(coin, GuardBasis::computational(2), branches);
        RegisterLayout inner = layout_of(rel.rhs);
        if (const auto* b = rel.rhs.as<BlockStmt>()) inner = layout_of(b->body);
        max_dim = std::max(max_dim, inner.dimension());
        const auto rep = compare_programs(rel.lhs, rel.rhs);
        dev2 = std::max(dev2, rep.qvars_match ? rep.deviation : INFINITY);
    }
    r.info.push_back("largest total dimension in a coin-program instance: " + std::to_string(max_dim));
    r.check(std::to_string(n2) + " coin-program instances equivalent", dev2, 1e-8);
    r.check("total dimension within 16", max_dim <= 16 ? 0.0 : static_cast<double>(max_dim), 0.0);
    return r;
}

/// A local coin makes a quantum choice a probabilistic choice with weights
/// p_i = <b_i| [[P]](rho) |b_i>.
inline Report proim(std::uint64_t seed = 0, std::size_t count = 25) {
    Report r{"proim", {}, {}};
    random::Engine rng(seed);
    random::Names names("m");
    double dev = 0.0;
    for (std::size_t t = 0; t < count; ++t) {
        const RegisterLayout c({{"c", random::uniform(2, 3, rng)}}), q({{"q", 2}});
        const auto d = c.dimension();
        const Program coin = t % 2 ? random::measuring_coin(c, rng, names, t % 4 == 3)
                                   : prog::unitary(c, random::unitary(d, rng));
        std::vector<Program> branches;
        for (std::size_t i = 0; i < d; ++i) branches.push_back(random::unitary_or_measurement(q, rng, names));
        const GuardBasis basis{t % 3 ? random::unitary(d, rng) : identity(d), {}};
        const Matrix rho = random::density(d, rng);
        const Program lhs = prog::block(c, rho, prog::qchoice(coin, basis, branches));
        const Matrix out = denote(coin).embedded(c).apply(rho);
        std::vector<double> weights;
        for (std::size_t i = 0; i < d; ++i) {
            weights.push_back(std::max(0.0, (basis.state(i).adjoint() * out * basis.state(i))(0, 0).real()));
        }
        const Program rhs = prog::pchoice(weights, branches);
        const auto rep = compare_programs(lhs, rhs);
        dev = std::max(dev, rep.qvars_match ? rep.deviation : INFINITY);
    }
    r.check(std::to_string(count) + " block-versus-probabilistic-choice instances", dev, 1e-8);
    return r;
}

/// Approximations of `while M[q] = 1 do q := U q`: the quantum iterations
/// with coin H, and their localised form.
inline Report loop(std::size_t n = 4, std::uint64_t seed = 0) {
    Report r{"loop", {}, {}};
    random::Engine rng(seed);
    const RegisterLayout q({{"q", 2}});
    const Matrix u = random::unitary(2, rng);
    const Vector psi = random::pure_state(2, rng);

    const Program qn = unroll_loop(q, u, gates::hadamard(), n, LoopFlavor::Quantum);
    RegisterLayout ordered = q;
    for (std::size_t k = 1; k <= n; ++k) ordered = ordered.concat(RegisterLayout({{loop_coin_name(k), 2}}));
    const auto f = semi_classical(qn).function.permuted(ordered);
    const auto coins = std::size_t{1} << n;
    r.check("quantum iterations have one classical state", std::abs(static_cast<double>(f.domain().size()) - 1.0), 0.0);
    const Vector out = f.at(f.domain().front()) * tensor(psi, basis_ket(coins, 0));

    Vector want = Vector::Zero(out.size());
    Vector ui = psi;
    double coeff_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ones = (std::size_t{1} << i) - 1;  // |0>^{n-i} |1>^i
        const Vector component = [&] {
            Vector v(2);
            for (Eigen::Index a = 0; a < 2; ++a) v(a) = out(a * static_cast<Eigen::Index>(coins) + static_cast<Eigen::Index>(ones));
            return v;
        }();
        const Complex c = ui.adjoint() * component;
        const double expected = std::pow(2.0, -(static_cast<double>(i) + 1.0) / 2.0);
        r.info.push_back("coefficient of U^" + std::to_string(i) + "|psi>|0>^" + std::to_string(n - i) + "|1>^" +
                         std::to_string(i) + ": " + fmt(c.real()) + " (expected 2^(-" + std::to_string(i + 1) +
                         "/2) = " + fmt(expected) + ")");
        coeff_dev = std::max(coeff_dev, std::abs(c - expected));
        want += expected * tensor(ui, basis_ket(coins, ones));
        ui = u * ui;
    }
    r.check("coefficients", coeff_dev, 1e-10);
    r.check("quantum iterations closed form", (out - want).cwiseAbs().maxCoeff(), 1e-10);

    std::vector<Matrix> expected_kraus;
    Matrix power = identity(2);
    for (std::size_t i = 0; i < n; ++i) {
        expected_kraus.push_back(std::pow(2.0, -(static_cast<double>(i) + 1.0) / 2.0) * power);
        power = u * power;
    }
    const auto localized = denote(unroll_loop(q, u, gates::hadamard(), n, LoopFlavor::Localized));
    r.check("localised iterations are probabilistic", choi_deviation(SuperOperator(q, expected_kraus), localized),
            1e-10);
    return r;
}

}  // namespace qgcl::reproduce
