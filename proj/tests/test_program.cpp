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

#include "qgcl/builtins.hpp"
#include "qgcl/classical_state.hpp"
#include "qgcl/program.hpp"
#include "qgcl/random.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/well_formed.hpp"
#include "support/generators.hpp"

namespace {

using namespace qgcl;

const RegisterLayout q{{"q", 2}}, c{{"c", 2}}, r{{"r", 3}};

std::vector<DiagnosticCode> codes(const Program& p) {
    std::vector<DiagnosticCode> out;
    for (const auto& d : check_well_formed(p)) out.push_back(d.code);
    return out;
}

bool has(const Program& p, DiagnosticCode code) {
    const auto cs = codes(p);
    return std::find(cs.begin(), cs.end(), code) != cs.end();
}

// Direct subprograms, excluding block bodies.
std::vector<Program> children(const Program& p) {
    std::vector<Program> out;
    if (const auto* m = p.as<MeasureStmt>()) {
        for (const auto& [_, b] : m->branches) out.push_back(b);
    } else if (const auto* g = p.as<GuardedStmt>()) {
        out = g->branches;
    } else if (const auto* s = p.as<SeqStmt>()) {
        out = {s->first, s->second};
    } else if (const auto* pc = p.as<ProbChoiceStmt>()) {
        out = pc->branches;
    } else if (const auto* qc = p.as<QChoiceStmt>()) {
        out = qc->branches;
        out.push_back(qc->coin);
    }
    return out;
}

Matrix oracle_half() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1;
    return m;
}

bool subset(const VariableSet& a, const VariableSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

TEST(Variables, SkipAndAbortHaveNone) {
    EXPECT_TRUE(qvar(prog::skip()).empty());
    EXPECT_TRUE(qvar(prog::abort()).empty());
    EXPECT_TRUE(var(prog::skip()).empty());
}

TEST(Variables, MeasurementBindsItsOutcomeVariable) {
    const Program m = prog::measure_discard("x", q, gates::computational(2));
    EXPECT_EQ(var(m), VariableSet{"x"});
    EXPECT_EQ(qvar(m), VariableSet{"q"});
}

TEST(Variables, BlockRemovesLocals) {
    const Program g = prog::guarded(c, {prog::unitary(q, gates::pauli_x()), prog::unitary(r, gates::shift(3))});
    const Program b = prog::block(c, projector(basis_ket(2, 0)), g);
    EXPECT_EQ(qvar(b), (VariableSet{"q", "r"}));
    EXPECT_EQ(qvar(g), (VariableSet{"c", "q", "r"}));
}

TEST(Variables, ChoicesTakeUnions) {
    const Program pc = prog::pchoice({0.5, 0.5}, {prog::unitary(q, gates::pauli_x()),
                                                  prog::measure_discard("y", r, gates::computational(3))});
    EXPECT_EQ(qvar(pc), (VariableSet{"q", "r"}));
    EXPECT_EQ(var(pc), VariableSet{"y"});
    const Program qc = prog::qchoice(prog::unitary(c, gates::hadamard()), GuardBasis::computational(2),
                                     {prog::skip(), prog::unitary(q, gates::pauli_x())});
    EXPECT_EQ(qvar(qc), (VariableSet{"c", "q"}));
}

TEST(Variables, NamesCarryDeclaredSets) {
    const Program x = prog::name("X", {"k"}, q);
    EXPECT_EQ(qvar(x), VariableSet{"q"});
    EXPECT_EQ(var(x), VariableSet{"k"});
    const Program m = prog::mu(x.get<NameStmt>(), prog::seq(prog::unitary(q, gates::hadamard()), x));
    EXPECT_EQ(qvar(m), VariableSet{"q"});
    EXPECT_TRUE(well_formed(m));
}

TEST(Variables, LayoutIsFirstOccurrenceOrder) {
    const Program p = prog::seq(prog::unitary(r, gates::shift(3)), prog::unitary(RegisterLayout{{"q", 2}, {"c", 2}}, gates::cnot()));
    EXPECT_EQ(layout_of(p).names(), (std::vector<std::string>{"r", "q", "c"}));
}

TEST(Variables, MonotoneUnderSubterms) {
    gen::ProgramGen g(21, {.allow_block = true, .allow_pchoice = true});
    const auto pool = gen::pool({{"a", 2}, {"b", 3}, {"c", 2}});
    for (int t = 0; t < 60; ++t) {
        const Program p = g.program(pool, 3);
        for (const auto& ch : children(p)) {
            EXPECT_TRUE(subset(qvar(ch), qvar(p)));
            EXPECT_TRUE(subset(var(ch), var(p)));
        }
    }
}

TEST(WellFormed, SkipIsFine) { EXPECT_TRUE(codes(prog::skip()).empty()); }

TEST(WellFormed, SequencedMeasurementsMayNotShareAVariable) {
    const Program m = prog::measure_discard("x", q, gates::computational(2));
    EXPECT_TRUE(has(prog::seq(m, m), DiagnosticCode::ClassicalVariableReuse));
}

TEST(WellFormed, GuardVariableMayNotAppearInABranch) {
    const Program g = prog::guarded(c, {prog::unitary(c, gates::pauli_x()), prog::skip()});
    EXPECT_TRUE(has(g, DiagnosticCode::GuardVariableInBranch));
}

TEST(WellFormed, CoinVariableMayNotAppearInABranch) {
    const Program p = prog::qchoice(prog::unitary(c, gates::hadamard()), GuardBasis::computational(2),
                                    {prog::unitary(c, gates::pauli_x()), prog::skip()});
    EXPECT_TRUE(has(p, DiagnosticCode::GuardVariableInBranch));
}

TEST(WellFormed, MeasuredVariableMayNotReappearInBranches) {
    const Program inner = prog::measure_discard("x", r, gates::computational(3));
    const Program p = prog::measure("x", q, gates::computational(2), {{0, inner}, {1, prog::skip()}});
    EXPECT_TRUE(has(p, DiagnosticCode::MeasureVariableInBranch));
}

TEST(WellFormed, MeasurementsMustBeComplete) {
    Measurement half{{{0, oracle_half()}}, ""};
    EXPECT_TRUE(has(prog::measure_discard("x", q, half), DiagnosticCode::IncompleteMeasurement));
}

TEST(WellFormed, BranchCountMustMatchBasis) {
    EXPECT_TRUE(has(prog::guarded(c, {prog::skip()}), DiagnosticCode::BranchMismatch));
    const Program m = prog::measure("x", q, gates::computational(2), {{0, prog::skip()}});
    EXPECT_TRUE(has(m, DiagnosticCode::BranchMismatch));
}

TEST(WellFormed, BasisMustBeOrthonormal) {
    Matrix b = identity(2);
    b(0, 1) = 0.5;
    EXPECT_TRUE(has(prog::guarded(c, GuardBasis{b, ""}, {prog::skip(), prog::skip()}), DiagnosticCode::NonOrthonormalBasis));
}

TEST(WellFormed, UnitariesMustBeUnitaryAndFit) {
    EXPECT_TRUE(has(prog::unitary(q, 2.0 * identity(2)), DiagnosticCode::NonUnitary));
    EXPECT_TRUE(has(prog::unitary(q, identity(3)), DiagnosticCode::DimensionMismatch));
}

TEST(WellFormed, VariableDimensionsMustAgree) {
    const Program p = prog::seq(prog::unitary(q, identity(2)), prog::unitary(RegisterLayout{{"q", 3}}, identity(3)));
    EXPECT_TRUE(has(p, DiagnosticCode::VariableDimensionConflict));
}

TEST(WellFormed, ClassicalAndQuantumNamesAreSeparate) {
    const Program p = prog::measure_discard("q", q, gates::computational(2));
    EXPECT_TRUE(has(p, DiagnosticCode::ClassicalQuantumClash));
}

TEST(WellFormed, BlockChecks) {
    EXPECT_TRUE(has(prog::block(c, projector(basis_ket(2, 0)), prog::unitary(q, gates::pauli_x())),
                    DiagnosticCode::LocalNotInBody));
    EXPECT_TRUE(has(prog::block(c, identity(2), prog::unitary(c, gates::pauli_x())), DiagnosticCode::InvalidInitialState));
    EXPECT_TRUE(has(prog::block(c, identity(3) / 3.0, prog::unitary(c, gates::pauli_x())),
                    DiagnosticCode::DimensionMismatch));
}

TEST(WellFormed, ProbabilitiesMustBeASubDistribution) {
    EXPECT_TRUE(has(prog::pchoice({0.7, 0.7}, {prog::skip(), prog::skip()}), DiagnosticCode::InvalidProbabilities));
    EXPECT_TRUE(has(prog::pchoice({-0.1, 0.5}, {prog::skip(), prog::skip()}), DiagnosticCode::InvalidProbabilities));
    EXPECT_TRUE(has(prog::pchoice({0.5}, {prog::skip(), prog::skip()}), DiagnosticCode::InvalidProbabilities));
    EXPECT_TRUE(codes(prog::pchoice({0.25, 0.5}, {prog::skip(), prog::skip()})).empty());
}

TEST(WellFormed, RecursionBodyStaysInsideDeclaredSets) {
    const Program x = prog::name("X", {}, q);
    const Program body = prog::seq(prog::unitary(RegisterLayout{{"q", 2}, {"c", 2}}, gates::cnot()), x);
    EXPECT_TRUE(has(prog::mu(x.get<NameStmt>(), body), DiagnosticCode::RecursionScope));
}

TEST(WellFormed, DiagnosticsCarryAPath) {
    const Program g = prog::guarded(c, {prog::unitary(c, gates::pauli_x()), prog::skip()});
    const auto ds = check_well_formed(prog::seq(prog::skip(), g));
    ASSERT_FALSE(ds.empty());
    EXPECT_NE(ds.front().path.find("seq"), std::string::npos);
}

TEST(Desugar, HadamardChoice) {
    const Program p1 = prog::unitary(q, gates::pauli_x()), p2 = prog::unitary(q, gates::pauli_z());
    const Program qc = prog::qchoice(prog::unitary(c, gates::hadamard(), "H"), GuardBasis::computational(2), {p1, p2});
    const Program want = prog::seq(prog::unitary(c, gates::hadamard(), "H"), prog::guarded(c, {p1, p2}));
    EXPECT_TRUE(desugar_qchoice(qc) == want);
}

TEST(Desugar, SingleBranchChoice) {
    const Program p = prog::unitary(q, gates::pauli_x());
    const Program qc = prog::qchoice(prog::skip(), GuardBasis::computational(1), {p});
    const Program want = prog::seq(prog::skip(), prog::guarded(RegisterLayout{}, GuardBasis::computational(1), {p}));
    EXPECT_TRUE(desugar_qchoice(qc) == want);
    EXPECT_TRUE(well_formed(qc));
    EXPECT_TRUE(well_formed(want));
}

TEST(Desugar, PreservesWellFormedness) {
    gen::ProgramGen g(22);
    const auto pool = gen::pool({{"a", 2}, {"b", 2}, {"c", 3}});
    int seen = 0;
    for (int t = 0; t < 200 && seen < 30; ++t) {
        const Program p = g.program(pool, 3);
        if (!p.as<QChoiceStmt>()) continue;
        ++seen;
        ASSERT_TRUE(well_formed(p));
        EXPECT_TRUE(well_formed(desugar_qchoice(p)));
    }
    EXPECT_GE(seen, 10);
}

TEST(ClassicalState, EmptyIsAUnit) {
    const auto d = ClassicalState::bind("x", 3);
    EXPECT_EQ(concat(ClassicalState::empty(), d), d);
    EXPECT_EQ(concat(d, ClassicalState::empty()), d);
}

TEST(ClassicalState, ConcatenationOfDisjointBindings) {
    const auto s = concat(ClassicalState::bind("x", 1), ClassicalState::bind("y", 2));
    EXPECT_EQ(s.domain(), (VariableSet{"x", "y"}));
    EXPECT_EQ(s.value_of("x"), 1);
    EXPECT_EQ(s.value_of("y"), 2);
    EXPECT_EQ(s.str(), "[x<-1]*[y<-2]");
}

TEST(ClassicalState, OverlappingDomainsClash) {
    try {
        concat(ClassicalState::bind("x", 1), ClassicalState::bind("x", 2));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainClash);
    }
}

TEST(ClassicalState, SuperpositionsAreDistinctLabels) {
    const auto eps = ClassicalState::empty();
    const auto s = ClassicalState::oplus({eps, eps});
    EXPECT_FALSE(s == eps);
    EXPECT_EQ(s.str(), "(+ eps eps)");
    const auto t = ClassicalState::oplus({ClassicalState::bind("x", 1), ClassicalState::bind("y", 2)});
    EXPECT_EQ(t.domain(), (VariableSet{"x", "y"}));
    const auto one = ClassicalState::oplus({ClassicalState::bind("x", 1)});
    EXPECT_EQ(one.children().size(), 1u);
    EXPECT_FALSE(one == ClassicalState::bind("x", 1));
}

TEST(ClassicalState, EmptySuperpositionIsAnArityError) {
    try {
        ClassicalState::oplus({});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Arity);
    }
}

TEST(ClassicalState, BranchOrderMatters) {
    const auto a = ClassicalState::bind("x", 0), b = ClassicalState::bind("y", 1);
    EXPECT_FALSE(ClassicalState::oplus({a, b}) == ClassicalState::oplus({b, a}));
}

TEST(ClassicalState, NormalFormIsOrderInsensitive) {
    const auto x = ClassicalState::bind("x", 1), y = ClassicalState::bind("y", 2), z = ClassicalState::bind("z", 3);
    const auto s1 = concat(concat(x, y), z), s2 = concat(z, concat(y, x)), s3 = concat(y, concat(ClassicalState::empty(), concat(z, x)));
    EXPECT_EQ(s1, s2);
    EXPECT_EQ(s1, s3);
    EXPECT_EQ(s1.hash(), s3.hash());
    EXPECT_EQ(s1.domain().size(), 3u);
}

TEST(ClassicalState, SetProducts) {
    const auto eps = ClassicalState::empty();
    EXPECT_EQ(state_set_product({eps}, {eps}), std::vector<ClassicalState>{eps});
    const auto x0 = ClassicalState::bind("x", 0), x1 = ClassicalState::bind("x", 1), y0 = ClassicalState::bind("y", 0);
    const auto prod = state_set_product({x0, x1}, {y0});
    ASSERT_EQ(prod.size(), 2u);
    EXPECT_EQ(prod[0], concat(x0, y0));
    EXPECT_EQ(prod[1], concat(x1, y0));
    EXPECT_THROW(state_set_product({x0}, {x1}), Error);
}

TEST(ClassicalState, SequencedMeasurementsHaveFourStates) {
    const Program p = prog::seq(prog::measure_discard("x", q, gates::computational(2)),
                                prog::measure_discard("y", q, gates::plus_minus()));
    const auto den = semi_classical(p);
    EXPECT_EQ(den.classical_states.size(), 4u);
    for (const auto& s : den.classical_states) EXPECT_EQ(s.domain(), (VariableSet{"x", "y"}));
}

}  // namespace
