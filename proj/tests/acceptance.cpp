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

// Acceptance checks: one PASS/FAIL line per criterion.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "qgcl/qgcl.hpp"
#include "support/generators.hpp"
#include "support/negative_corpus.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qgcl;
using oracle::dev;

struct Outcome {
    double deviation = 0.0;  // largest deviation seen
    double tol = 0.0;
    bool ok = true;          // additional pass conditions (counts, runtime)
    std::string note;
};

void merge(Outcome& o, const reproduce::Report& r) {
    for (const auto& c : r.checks) o.deviation = std::max(o.deviation, c.deviation);
    o.ok = o.ok && r.passed();
}

void track(Outcome& o, double d) { o.deviation = std::max(o.deviation, d); }

bool report(int n, const std::string& what, const std::function<Outcome()>& body, double max_seconds = 0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.ok = false;
        o.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool fast = max_seconds <= 0 || secs < max_seconds;
    const bool pass = o.ok && fast && o.deviation <= o.tol;
    std::printf("criterion %d: %s: max deviation %.3e (tol %.0e), %.2fs%s%s %s\n", n, what.c_str(), o.deviation, o.tol,
                secs, max_seconds > 0 ? (" (limit " + std::to_string(static_cast<int>(max_seconds)) + "s)").c_str() : "",
                o.note.empty() ? "" : (", " + o.note).c_str(), pass ? "PASS" : "FAIL");
    return pass;
}

Outcome suite(const reproduce::Report& r, double tol) {
    Outcome o;
    o.tol = tol;
    merge(o, r);
    return o;
}

// Criterion 6: bounded loop unrollings for n = 1..4 and ten unitaries each.
Outcome loops() {
    Outcome o;
    o.tol = 1e-10;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) merge(o, reproduce::loop(n, seed));
    }
    return o;
}

// Criterion 7: duality on random triples and the clause identities.
Outcome duality() {
    Outcome o;
    o.tol = 1e-9;
    gen::ProgramGen g(7001, {.allow_block = true, .allow_pchoice = true});
    const auto pool = gen::pool({{"a", 2}, {"b", 2}, {"c", 2}});
    const RegisterLayout full(pool);
    for (int t = 0; t < 50; ++t) {
        const Program p = g.program(pool, 3);
        const Matrix m = random::positive(8, g.rng());
        const Matrix rho = random::density(8, g.rng());
        const double lhs = (wp_apply(p, Observable(m, full)).matrix() * rho).trace().real();
        const double rhs = (m * apply(p, DensityMatrix(rho, full)).matrix()).trace().real();
        track(o, std::abs(lhs - rhs));
    }

    random::Engine rng(7002);
    const RegisterLayout q{{"q", 2}}, c{{"c", 2}};
    for (int t = 0; t < 10; ++t) {
        const Matrix m = random::positive(2, rng);
        const Observable obs(m, q);
        // abort and skip
        track(o, wp_apply(prog::abort(), obs).matrix().cwiseAbs().maxCoeff());
        track(o, dev(wp_apply(prog::skip(), obs).matrix(), m));
        // unitary
        const Matrix u = random::unitary(2, rng);
        const Program pu = prog::unitary(q, u);
        track(o, dev(wp_apply(pu, obs).matrix(), oracle::mul(oracle::mul(u.adjoint(), m), u)));
        // measurement
        const auto meas = random::measurement(2, 2, rng);
        const Matrix v = random::unitary(2, rng);
        const Program pm = prog::measure("x", q, meas, {{0, prog::skip()}, {1, prog::unitary(q, v)}});
        const Matrix vmv = oracle::mul(oracle::mul(v.adjoint(), m), v);
        const Matrix want_m = oracle::mul(oracle::mul(meas.at(0).adjoint(), m), meas.at(0)) +
                              oracle::mul(oracle::mul(meas.at(1).adjoint(), vmv), meas.at(1));
        track(o, dev(wp_apply(pm, obs).matrix(), want_m));
        // sequence
        track(o, dev(wp_apply(prog::seq(pu, pm), obs).matrix(), wp_apply(pu, wp_apply(pm, obs)).matrix()));
    }

    // quantum case: canonical witness, G_i = F_i^dagger, equal coefficients
    gen::ProgramGen core(7003, {.allow_qchoice = false});
    const auto data = gen::pool({{"a", 2}, {"b", 2}});
    for (int t = 0; t < 20; ++t) {
        const GuardBasis basis{random::unitary(2, core.rng()), ""};
        const std::vector<Program> branches{core.program(data, 2), core.program(data, 2)};
        const Program guard = prog::guarded(c, basis, branches);
        const auto witness = wp_guard_witness(guard);
        track(o, dev(witness.choi(), wp(guard).embedded(witness.layout).choi()));
        const auto f = semi_classical(guard).function;
        if (witness.kraus.size() != f.size()) o.ok = false;
        for (std::size_t i = 0; i < std::min(f.size(), witness.kraus.size()); ++i) {
            track(o, dev(witness.kraus[i], f.entries()[i].second.adjoint()));
        }
        for (const auto& b : branches) {
            const auto fb = semi_classical(b).function;
            const auto l = lambda_weights(fb), ld = lambda_weights(fb.dagger());
            for (std::size_t i = 0; i < l.size(); ++i) track(o, std::abs(l[i] - ld[i]));
        }
    }
    return o;
}

// Independent weight: trace ratio, uniform when the function vanishes.
std::vector<double> oracle_lambda(const std::vector<Matrix>& ops) {
    double den = 0;
    for (const auto& m : ops) den += oracle::trace(oracle::mul(m.adjoint(), m)).real();
    std::vector<double> out;
    for (const auto& m : ops) {
        out.push_back(den < 1e-9 ? 1.0 / std::sqrt(static_cast<double>(ops.size()))
                                 : std::sqrt(oracle::trace(oracle::mul(m.adjoint(), m)).real() / den));
    }
    return out;
}

// Criterion 8: guarded composition of random operator-valued functions.
Outcome composition() {
    Outcome o;
    o.tol = 1e-10;
    random::Engine rng(8001);
    std::uniform_real_distribution<double> scale(0.2, 0.95);
    int zero_inputs = 0, full_cases = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = random::uniform(2, 3, rng), k = random::uniform(2, 3, rng);
        const RegisterLayout q{{"q", d}}, g{{"g", k}};
        std::vector<OperatorValuedFunction> fs;
        std::vector<std::vector<Matrix>> ops;
        bool all_full = true;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t m = random::uniform(1, 3, rng);
            auto kraus = random::kraus_family(d, m, rng);
            const std::size_t kind = random::uniform(0, 2, rng);  // full, sub-normalised, zero
            const double s = kind == 0 ? 1.0 : kind == 1 ? scale(rng) : 0.0;
            for (auto& op : kraus) op *= s;
            all_full = all_full && kind == 0;
            zero_inputs += kind == 2;
            std::vector<OperatorValuedFunction::Entry> tab;
            for (std::size_t j = 0; j < m; ++j) {
                tab.emplace_back(ClassicalState::bind("k" + std::to_string(i), static_cast<std::int64_t>(j)), kraus[j]);
            }
            fs.emplace_back(q, tab);
            ops.push_back(kraus);
            double sum = 0;
            for (double l : lambda_weights(fs.back())) sum += l * l;
            track(o, std::abs(sum - 1.0));
        }
        const GuardBasis basis = t % 2 == 0 ? GuardBasis::computational(k) : GuardBasis{random::unitary(k, rng), ""};
        const auto f = guarded_ovf(basis, fs, g);
        if (f.layout().variables().front().name != "q") o.ok = false;

        // sum F^dagger F <= I, by eigenvalues
        Matrix gram = Matrix::Zero(static_cast<Eigen::Index>(d * k), static_cast<Eigen::Index>(d * k));
        for (const auto& [_, m] : f.entries()) gram += oracle::mul(m.adjoint(), m);
        const double top = Eigen::SelfAdjointEigenSolver<Matrix>(gram).eigenvalues().maxCoeff();
        track(o, std::max(0.0, top - 1.0));
        if (all_full) {
            ++full_cases;
            track(o, dev(gram, oracle::eye(d * k)));
        }
        double sum = 0;
        for (double l : lambda_weights(f)) sum += l * l;
        track(o, std::abs(sum - 1.0));

        // pointwise: sum_i (prod_{j != i} lambda_j) F_i(d_i) (x) |b_i><b_i|
        std::vector<std::vector<double>> lam;
        for (const auto& v : ops) lam.push_back(oracle_lambda(v));
        std::size_t count = 1;
        for (const auto& v : ops) count *= v.size();
        if (f.size() != count) o.ok = false;
        for (std::size_t idx = 0; idx < count; ++idx) {
            std::vector<std::size_t> sizes;
            for (const auto& v : ops) sizes.push_back(v.size());
            const auto pick = oracle::digits(idx, sizes);
            std::vector<ClassicalState> parts;
            for (std::size_t i = 0; i < k; ++i) {
                parts.push_back(ClassicalState::bind("k" + std::to_string(i), static_cast<std::int64_t>(pick[i])));
            }
            Matrix want = Matrix::Zero(static_cast<Eigen::Index>(d * k), static_cast<Eigen::Index>(d * k));
            for (std::size_t i = 0; i < k; ++i) {
                double coef = 1;
                for (std::size_t j = 0; j < k; ++j) {
                    if (j != i) coef *= lam[j][pick[j]];
                }
                const Vector b = basis.matrix.col(static_cast<Eigen::Index>(i));
                want += coef * oracle::kron(ops[i][pick[i]], b * b.adjoint());
            }
            track(o, dev(f.at(ClassicalState::oplus(parts)), want));
        }
    }
    o.ok = o.ok && zero_inputs > 0 && full_cases > 0;
    o.note = std::to_string(full_cases) + " all-full cases, " + std::to_string(zero_inputs) + " zero inputs";
    return o;
}

// Criterion 9: Kraus families related by a unitary give the same channel.
Outcome unitary_freedom() {
    Outcome o;
    o.tol = 1e-10;
    random::Engine rng(9001);
    for (int t = 0; t < 25; ++t) {
        const std::size_t d = random::uniform(2, 4, rng), k = random::uniform(1, 4, rng);
        auto kraus = random::kraus_family(d, k, rng);
        // pad with zeros so the mixing unitary may be larger than the family
        const std::size_t pad = random::uniform(0, 2, rng);
        for (std::size_t i = 0; i < pad; ++i) kraus.push_back(Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
        const Matrix w = random::unitary(kraus.size(), rng);
        const auto mixed = mix_kraus(kraus, w);
        track(o, dev(oracle::choi(kraus, d), oracle::choi(mixed, d)));
        const RegisterLayout l{{"q", d}};
        if (!superop_equal(SuperOperator(l, kraus), SuperOperator(l, mixed), 1e-10)) o.ok = false;
    }
    return o;
}

// Criterion 10: printer/parser round trip and the negative corpus.
Outcome parser() {
    Outcome o;
    o.tol = 0;
    gen::ProgramGen g(10001, {.allow_block = true, .allow_pchoice = true, .labelled = true});
    const auto pool = gen::pool({{"a", 2}, {"b", 3}, {"c", 2}});
    int round_trips = 0;
    for (int t = 0; t < 50; ++t) {
        const Program p = g.program(pool, 3);
        auto r = parse(print(p));
        if (r.ok() && *r.program == p) ++round_trips;
    }
    int negatives = 0;
    for (const auto& n : corpus::negative_programs()) {
        auto r = parse(n.text);
        bool found = false;
        for (const auto& d : r.diagnostics) found = found || d.code == n.code;
        if (!r.ok() && found) ++negatives;
    }
    const int total = static_cast<int>(corpus::negative_programs().size());
    o.ok = round_trips == 50 && negatives == total && total >= 10;
    o.note = std::to_string(round_trips) + "/50 round trips, " + std::to_string(negatives) + "/" + std::to_string(total) +
             " negative programs";
    return o;
}

}  // namespace

int main() {
    bool ok = true;
    ok &= report(1, "guarded shift on the 4-cycle walk", [] { return suite(reproduce::walk(), 1e-10); }, 1.0);
    ok &= report(2, "composed measurement", [] { return suite(reproduce::gmeas(), 1e-10); });
    ok &= report(3, "measurement-basis mixture", [] { return suite(reproduce::bb84(), 1e-10); });
    ok &= report(4, "coin relocation (25 unitary, 10 program coins)", [] { return suite(reproduce::local(), 1e-8); }, 30.0);
    ok &= report(5, "local coin as probabilistic choice (25)", [] { return suite(reproduce::proim(), 1e-8); });
    ok &= report(6, "loop unrollings n=1..4 x 10 unitaries", loops);
    ok &= report(7, "wp duality (50) and clause identities", duality);
    ok &= report(8, "guarded composition of 100 random functions", composition);
    ok &= report(9, "Kraus unitary freedom (25 channels)", unitary_freedom);
    ok &= report(10, "parser round trip and negative corpus", parser);
    return ok ? 0 : 1;
}
