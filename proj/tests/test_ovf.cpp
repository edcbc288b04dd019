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

#include <gtest/gtest.h>

#include <numeric>

#include "qgcl/builtins.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/random.hpp"
#include "qgcl/semantics.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qgcl;
using oracle::dev;
using Entry = OperatorValuedFunction::Entry;

const RegisterLayout q{{"q", 2}}, c{{"c", 2}};

OperatorValuedFunction single(const RegisterLayout& l, const Matrix& m) {
    return OperatorValuedFunction(l, {{ClassicalState::empty(), m}});
}

OperatorValuedFunction from_measurement(const RegisterLayout& l, const std::string& x, const Measurement& m) {
    std::vector<Entry> t;
    for (const auto& [o, op] : m.operators) t.emplace_back(ClassicalState::bind(x, o), op);
    return OperatorValuedFunction(l, t);
}

Matrix plus_state() {
    Vector v(2);
    v << 1, 1;
    return projector(v / std::sqrt(2.0));
}

void expect_kind(ErrorKind kind, const std::function<void()>& f) {
    try {
        f();
        ADD_FAILURE() << "no error thrown";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

TEST(GuardedUnitary, IdentityAndNotGiveControlledNot) {
    const std::vector<Matrix> us{identity(2), gates::pauli_x()};
    const Matrix want = oracle::kron(oracle::eye(2), oracle::proj0()) + oracle::kron(oracle::pauli_x(), oracle::proj1());
    EXPECT_EQ(dev(guarded_unitary(GuardBasis::computational(2), us, q, c), want), 0.0);
    // as a CNOT with the guard as control and the data qubit as target
    Matrix cx = Matrix::Zero(4, 4);
    cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1;
    EXPECT_EQ(dev(guarded_unitary(GuardBasis::computational(2), us, q, c), oracle::act_on(cx, {1, 0}, {2, 2})), 0.0);
}

TEST(GuardedUnitary, MultiplexorIsBlockDiagonalWithGuardFirst) {
    random::Engine rng(31);
    std::vector<Matrix> us;
    for (int i = 0; i < 4; ++i) us.push_back(random::unitary(2, rng));
    const RegisterLayout guard{{"g1", 2}, {"g2", 2}};
    const Matrix mux = guarded_unitary(GuardBasis::computational(4), us, q, guard);
    Matrix diag = Matrix::Zero(8, 8);
    for (int i = 0; i < 4; ++i) diag.block(2 * i, 2 * i, 2, 2) = us[i];
    const RegisterLayout guard_first{{"g1", 2}, {"g2", 2}, {"q", 2}};
    EXPECT_LT(dev(embed(mux, q.concat(guard), guard_first), diag), 1e-15);
}

TEST(GuardedUnitary, ShiftOnTheFourCycle) {
    const RegisterLayout v{{"v", 4}};
    const std::vector<Matrix> s{oracle::cyclic_shift(4, 1), oracle::cyclic_shift(4, -1)};
    const Matrix shift = guarded_unitary(GuardBasis::computational(2), s, v, c);
    for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t i = 0; i < 2; ++i) {
            const Vector in = tensor(basis_ket(4, x), basis_ket(2, i));
            const Vector out = tensor(Vector(s[i] * basis_ket(4, x)), basis_ket(2, i));
            EXPECT_LT((shift * in - out).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
    EXPECT_TRUE(is_unitary(shift, 1e-10));
}

TEST(GuardedUnitary, GeneralBasisActsOnBasisStates) {
    random::Engine rng(32);
    const RegisterLayout g{{"g", 3}};
    const GuardBasis basis{random::unitary(3, rng), ""};
    std::vector<Matrix> us;
    for (int i = 0; i < 3; ++i) us.push_back(random::unitary(2, rng));
    const Matrix u = guarded_unitary(basis, us, q, g);
    EXPECT_TRUE(is_unitary(u, 1e-10));
    for (std::size_t i = 0; i < 3; ++i) {
        const Vector psi = random::pure_state(2, rng);
        EXPECT_LT((u * tensor(psi, basis.state(i)) - tensor(Vector(us[i] * psi), basis.state(i))).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(GuardedUnitary, RejectsNonUnitaryBranches) {
    const std::vector<Matrix> us{identity(2), 2.0 * identity(2)};
    expect_kind(ErrorKind::Contract, [&] { guarded_unitary(GuardBasis::computational(2), us, q, c); });
}

TEST(Lambda, FullMeasurementOutcome) {
    const auto f = from_measurement(q, "x", gates::computational(2));
    EXPECT_NEAR(lambda_weight(f, ClassicalState::bind("x", 0)), std::sqrt(0.5), 1e-15);
}

TEST(Lambda, SingletonUnitary) { EXPECT_NEAR(lambda_weight(single(q, gates::hadamard()), ClassicalState::empty()), 1.0, 1e-15); }

TEST(Lambda, AllZeroFunctionUsesUniformWeight) {
    EXPECT_EQ(lambda_weight(single(q, Matrix::Zero(2, 2)), ClassicalState::empty()), 1.0);
    const OperatorValuedFunction z(q, {{ClassicalState::bind("x", 0), Matrix::Zero(2, 2)},
                                       {ClassicalState::bind("x", 1), Matrix::Zero(2, 2)}});
    EXPECT_NEAR(lambda_weight(z, ClassicalState::bind("x", 1)), std::sqrt(0.5), 1e-15);
}

TEST(Lambda, MissingStateIsKeyError) {
    expect_kind(ErrorKind::Key, [] { lambda_weight(single(q, identity(2)), ClassicalState::bind("x", 0)); });
}

TEST(Lambda, SquaresSumToOneAndSurviveExtension) {
    random::Engine rng(33);
    for (int t = 0; t < 20; ++t) {
        const auto k = random::kraus_family(2, random::uniform(1, 4, rng), rng);
        std::vector<Entry> tab;
        for (std::size_t i = 0; i < k.size(); ++i) tab.emplace_back(ClassicalState::bind("k", static_cast<std::int64_t>(i)), k[i] * (t % 3 == 0 ? 0.5 : 1.0));
        const OperatorValuedFunction f(q, tab);
        const auto ls = lambda_weights(f);
        double s = 0;
        for (double l : ls) s += l * l;
        EXPECT_NEAR(s, 1.0, 1e-12);
        const auto ext = lambda_weights(f.embedded(RegisterLayout{{"q", 2}, {"z", 3}}));
        for (std::size_t i = 0; i < ls.size(); ++i) EXPECT_NEAR(ls[i], ext[i], 1e-12);
    }
}

TEST(GuardedOvf, MeasurementsAlongAFreshQubit) {
    const auto m0 = gates::computational(2);
    const auto m1 = gates::plus_minus();
    const std::vector<OperatorValuedFunction> fs{from_measurement(q, "x", m0), from_measurement(q, "y", m1)};
    const auto f = guarded_ovf(GuardBasis::computational(2), fs, c);
    ASSERT_EQ(f.size(), 4u);
    EXPECT_TRUE(f.is_full(1e-10));
    random::Engine rng(34);
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 2; ++j) {
            const auto key = ClassicalState::oplus({ClassicalState::bind("x", i), ClassicalState::bind("y", j)});
            const Vector p0 = random::gaussian(2, 1, rng), p1 = random::gaussian(2, 1, rng);
            const Vector in = oracle::kron(p0, basis_ket(2, 0)) + oracle::kron(p1, basis_ket(2, 1));
            const Vector want = (oracle::kron(m0.at(i) * p0, basis_ket(2, 0)) + oracle::kron(m1.at(j) * p1, basis_ket(2, 1))) /
                                std::sqrt(2.0);
            EXPECT_LT((f.at(key) * in - want).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(GuardedOvf, SingletonsDegenerateToGuardedUnitary) {
    random::Engine rng(35);
    const RegisterLayout g{{"g", 3}};
    const GuardBasis basis{random::unitary(3, rng), ""};
    std::vector<Matrix> us;
    std::vector<OperatorValuedFunction> fs;
    for (int i = 0; i < 3; ++i) {
        us.push_back(random::unitary(2, rng));
        fs.push_back(single(q, us.back()));
    }
    const auto f = guarded_ovf(basis, fs, g);
    ASSERT_EQ(f.size(), 1u);
    EXPECT_LT(dev(f.entries().front().second, guarded_unitary(basis, us, q, g)), 1e-12);
}

TEST(GuardedOvf, SkipAgainstAbortKeepsTheSkipBranch) {
    const std::vector<OperatorValuedFunction> fs{single(q, identity(2)), single(q, Matrix::Zero(2, 2))};
    const auto f = guarded_ovf(GuardBasis::computational(2), fs, c);
    ASSERT_EQ(f.size(), 1u);
    const Matrix want = oracle::kron(oracle::eye(2), oracle::proj0());
    EXPECT_LT(dev(f.entries().front().second, want), 1e-15);

    // one quantum iteration with a Hadamard coin gives 2^{-1/2} |psi>|0>
    random::Engine rng(36);
    const Matrix u = random::unitary(2, rng);
    const Vector psi = random::pure_state(2, rng);
    const auto loop = semi_classical(unroll_loop(q, u, gates::hadamard(), 1, LoopFlavor::Quantum)).function;
    const auto fl = loop.permuted(RegisterLayout{{"q", 2}, {loop_coin_name(1), 2}});
    const Vector out = fl.entries().front().second * oracle::kron(psi, basis_ket(2, 0));
    EXPECT_LT((out - std::sqrt(0.5) * oracle::kron(psi, basis_ket(2, 0))).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(dev(fl.entries().front().second, Matrix(want * oracle::kron(oracle::eye(2), oracle::hadamard()))), 1e-12);
}

TEST(GuardedOvf, DomainIsEveryTupleInOrder) {
    const auto m0 = gates::computational(3);
    const RegisterLayout r{{"r", 3}};
    const std::vector<OperatorValuedFunction> fs{from_measurement(r, "x", m0), single(r, identity(3)),
                                                 from_measurement(r, "y", gates::computational(3))};
    const auto f = guarded_ovf(GuardBasis::computational(3), fs, RegisterLayout{{"g", 3}});
    ASSERT_EQ(f.size(), 9u);
    EXPECT_EQ(f.entries()[1].first.str(), "(+ [x<-0] eps [y<-1])");
    EXPECT_EQ(f.entries()[3].first.str(), "(+ [x<-1] eps [y<-0])");
}

TEST(GuardedOvf, ArityMismatchIsContractError) {
    const std::vector<OperatorValuedFunction> fs{single(q, identity(2))};
    expect_kind(ErrorKind::Contract, [&] { guarded_ovf(GuardBasis::computational(2), fs, c); });
}

TEST(GuardedOvf, GuardMustBeFresh) {
    const std::vector<OperatorValuedFunction> fs{single(q, identity(2)), single(q, identity(2))};
    expect_kind(ErrorKind::Layout, [&] { guarded_ovf(GuardBasis::computational(2), fs, q); });
}

TEST(Ovf, ConstructorEnforcesTheBound) {
    expect_kind(ErrorKind::Contract, [] {
        OperatorValuedFunction(q, {{ClassicalState::bind("x", 0), identity(2)}, {ClassicalState::bind("x", 1), identity(2)}});
    });
    expect_kind(ErrorKind::Shape, [] { OperatorValuedFunction(q, {{ClassicalState::empty(), identity(3)}}); });
}

TEST(ToSuperop, MeasurementChannel) {
    const auto s = to_superop(from_measurement(q, "x", gates::computational(2)));
    random::Engine rng(37);
    const Matrix rho = random::density(2, rng);
    const Matrix want = oracle::proj0() * rho * oracle::proj0() + oracle::proj1() * rho * oracle::proj1();
    EXPECT_LT(dev(s.apply(rho), want), 1e-15);
    EXPECT_TRUE(s.trace_preserving());
}

TEST(ToSuperop, AbortIsTheZeroChannel) {
    const auto s = to_superop(semi_classical(prog::seq(prog::unitary(q, gates::hadamard()), prog::abort())).function);
    EXPECT_EQ(dev(s.choi(), Matrix::Zero(4, 4)), 0.0);
    EXPECT_FALSE(s.trace_preserving());
    EXPECT_TRUE(s.trace_nonincreasing());
}

TEST(ToSuperop, UnitaryMixingLeavesTheChannelFixed) {
    random::Engine rng(38);
    const auto k = random::kraus_family(2, 3, rng);
    const auto mixed = mix_kraus(k, random::unitary(3, rng));
    EXPECT_LT(dev(oracle::choi(k, 2), oracle::choi(mixed, 2)), 1e-12);
}

TEST(SuperopMember, SingleChannelIsReturned) {
    random::Engine rng(39);
    const SuperOperator e(q, random::kraus_family(2, 2, rng));
    const std::vector<SuperOperator> es{e};
    const auto m = guarded_superop_member(GuardBasis::computational(1), es, RegisterLayout{});
    EXPECT_LT(dev(m.choi(), e.choi()), 1e-12);
}

Matrix u_theta_channel_choi(double theta) {
    const std::vector<SuperOperator> es{SuperOperator::unitary(q, identity(2)), SuperOperator::unitary(q, gates::pauli_z())};
    const Complex phase = std::polar(1.0, theta);
    const std::vector<OperatorValuedFunction> reps{single(q, identity(2)), single(q, phase * gates::pauli_z())};
    return guarded_superop_member(GuardBasis::computational(2), es, c, reps).choi();
}

TEST(SuperopMember, RelativePhaseSelectsDifferentMembers) {
    const Matrix a = u_theta_channel_choi(0.0), b = u_theta_channel_choi(M_PI);
    EXPECT_GT(dev(a, b), 0.5);
    // each member is the channel of U_theta = I ⊗ |0><0| + e^{i theta} Z ⊗ |1><1|
    const Matrix u_pi = oracle::kron(oracle::eye(2), oracle::proj0()) - oracle::kron(oracle::pauli_z(), oracle::proj1());
    EXPECT_LT(dev(b, oracle::choi({u_pi}, 4)), 1e-12);
}

TEST(SuperopMember, CoherentlyDiffersFromIncoherentApplication) {
    const std::vector<SuperOperator> es{SuperOperator::unitary(q, identity(2)), SuperOperator::unitary(q, gates::pauli_z())};
    const auto m = guarded_superop_member(GuardBasis::computational(2), es, c);
    random::Engine rng(40);
    const Matrix rho = random::density(2, rng);
    const Matrix in = oracle::kron(rho, plus_state());
    const Matrix z = oracle::pauli_z();
    // U_0 on the data for the |0> half of the coin and U_1 for the |1> half
    const Matrix incoherent = 0.5 * oracle::kron(rho, oracle::proj0()) + 0.5 * oracle::kron(oracle::mul(oracle::mul(z, rho), z), oracle::proj1());
    const Matrix coherent = m.apply(in);
    const Matrix cz = oracle::kron(oracle::eye(2), oracle::proj0()) + oracle::kron(z, oracle::proj1());
    EXPECT_LT(dev(coherent, oracle::mul(oracle::mul(cz, in), cz.adjoint())), 1e-12);
    EXPECT_GT(dev(coherent, incoherent), 0.1);
}

TEST(SuperopMember, InvalidRepresentativesAreRejected) {
    const std::vector<SuperOperator> es{SuperOperator::unitary(q, identity(2)), SuperOperator::unitary(q, gates::pauli_z())};
    const std::vector<OperatorValuedFunction> reps{single(q, identity(2)), single(q, gates::pauli_x())};
    expect_kind(ErrorKind::Contract, [&] { guarded_superop_member(GuardBasis::computational(2), es, c, reps); });
}

TEST(SuperOperator, DetectsTraceIncreasingFamilies) {
    EXPECT_FALSE(SuperOperator(q, {identity(2), identity(2)}).trace_nonincreasing());
    expect_kind(ErrorKind::Shape, [] { SuperOperator(q, {identity(3)}); });
}

TEST(SuperOperator, CompressionKeepsTheChannel) {
    random::Engine rng(41);
    auto k = random::kraus_family(2, 3, rng);
    std::vector<Matrix> many;
    for (const auto& m : k) {
        many.push_back(m / std::sqrt(2.0));
        many.push_back(m / std::sqrt(2.0));
    }
    const SuperOperator s(q, many);
    const auto small = compress_kraus(s);
    EXPECT_LE(small.kraus.size(), 4u);
    EXPECT_LT(dev(small.choi(), s.choi()), 1e-12);
}

}  // namespace
