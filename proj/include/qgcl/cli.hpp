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

// Batch front end. Exit codes:
//   0  success (check: well formed; equiv: EQUIV; reproduce: PASS)
//   1  ill-formed program, DISTINCT, or a failed reproduction check
//   2  equiv: the programs act on different quantum variables
//   64 usage error
//   66 unreadable or malformed input file
//   70 numerical or semantic failure during evaluation

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qgcl/equivalence.hpp"
#include "qgcl/error.hpp"
#include "qgcl/matrix_io.hpp"
#include "qgcl/reproduce.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/syntax.hpp"
#include "qgcl/wp.hpp"

namespace qgcl::cli {

enum ExitCode : int {
    kOk = 0,
    kFailed = 1,
    kQvarMismatch = 2,
    kUsage = 64,
    kNoInput = 66,
    kSoftware = 70,
};

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

namespace detail {

struct Options {
    std::optional<double> tol;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_dim;

    std::string file, file2, input, observable, out, suite;
    std::size_t n = 4;
};

/// Parses FILE; on failure prints the diagnostics to err and returns nullopt.
inline std::optional<Program> load(const std::string& path, std::ostream& err) {
    const auto r = parse_file(path);
    if (r.ok()) return r.program;
    for (const auto& d : r.diagnostics) err << path << ":" << d.str() << "\n";
    return std::nullopt;
}

/// The state or observable read from `path` must declare every variable of p.
inline void require_covers(const Program& p, const RegisterLayout& layout, const std::string& path) {
    for (const auto& name : qvar(p)) {
        if (!layout.contains(name)) throw Error(ErrorKind::Io, path + ": layout does not declare variable '" + name + "'");
    }
}

inline void emit(const io::Json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << io::render(j);
    } else {
        io::write_text_file(path, io::render(j));
    }
}

inline int check(const Options& o, std::ostream& out, std::ostream& err) {
    const auto r = parse_file(o.file);
    if (r.ok()) {
        out << o.file << ": ok\n";
        return kOk;
    }
    for (const auto& d : r.diagnostics) err << o.file << ":" << d.str() << "\n";
    return kFailed;
}

inline int run(const Options& o, std::ostream& out, std::ostream& err) {
    const auto p = load(o.file, err);
    if (!p) return kFailed;
    const auto rho = io::read_density(o.input);
    require_covers(*p, rho.layout(), o.input);
    const auto result = apply(*p, rho, o.tol.value_or(kDefaultTol));
    emit(io::matrix_to_json(result.matrix(), result.layout()), o.out, out);
    return kOk;
}

inline int wp(const Options& o, std::ostream& out, std::ostream& err) {
    const auto p = load(o.file, err);
    if (!p) return kFailed;
    auto lm = io::layout_matrix_from_json(io::read_json_file(o.observable));
    require_covers(*p, lm.layout, o.observable);
    const double tol = o.tol.value_or(kDefaultTol);
    std::optional<Observable> m;
    try {
        m.emplace(std::move(lm.matrix), std::move(lm.layout), tol);
    } catch (const Error& e) {
        throw Error(ErrorKind::Io, o.observable + ": " + e.what());
    }
    const auto pre = wp_apply(*p, *m, tol);
    emit(io::matrix_to_json(pre.matrix(), pre.layout()), o.out, out);
    return kOk;
}

inline int equiv(const Options& o, std::ostream& out, std::ostream& err) {
    const auto p = load(o.file, err);
    const auto q = load(o.file2, err);
    if (!p || !q) return kFailed;
    const auto r = compare_programs(*p, *q, o.tol.value_or(kEquivalenceTol));
    if (!r.qvars_match) {
        out << "DISTINCT quantum variables differ\n";
        return kQvarMismatch;
    }
    out << (r.equivalent ? "EQUIV" : "DISTINCT") << " max Choi deviation " << sci(r.deviation) << "\n";
    return r.equivalent ? kOk : kFailed;
}

inline int branches(const Options& o, std::ostream& out, std::ostream& err) {
    const auto p = load(o.file, err);
    if (!p) return kFailed;
    const auto den = semi_classical(*p, o.tol.value_or(kDefaultTol));
    const auto& f = den.function;
    out << "layout";
    for (const auto& v : f.layout().variables()) out << " " << v.name << ":" << v.dim;
    out << "\n";
    char buf[40];
    for (const auto& [state, op] : f.entries()) {
        std::snprintf(buf, sizeof buf, "%.12f", (op.adjoint() * op).trace().real());
        out << state.str() << " " << buf << "\n";
    }
    return kOk;
}

inline int reproduce(const Options& o, std::ostream& out) {
    reproduce::Report r;
    if (o.suite == "walk") {
        r = reproduce::walk();
    } else if (o.suite == "gmeas") {
        r = reproduce::gmeas();
    } else if (o.suite == "bb84") {
        r = reproduce::bb84();
    } else if (o.suite == "local") {
        r = reproduce::local(o.seed);
    } else if (o.suite == "proim") {
        r = reproduce::proim(o.seed);
    } else {
        r = reproduce::loop(o.n, o.seed);
    }
    out << r.format();
    return r.passed() ? kOk : kFailed;
}

}  // namespace detail

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    detail::Options o;
    CLI::App app{"QGCL quantum guarded-command programs: check, evaluate, transform, compare"};
    app.name("qgcl");
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--tol", o.tol, "numerical tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "seed for randomised suites")->capture_default_str();
    app.add_option("--max-dim", o.max_dim, "maximum total Hilbert-space dimension")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "report well-formedness diagnostics");
    check->add_option("FILE", o.file)->required();

    auto* run = app.add_subcommand("run", "apply the program's denotation to a density matrix");
    run->add_option("FILE", o.file)->required();
    run->add_option("--input", o.input, "density matrix file")->required();
    run->add_option("--out", o.out, "output file (stdout when omitted)");

    auto* wp = app.add_subcommand("wp", "weakest precondition of an observable");
    wp->add_option("FILE", o.file)->required();
    wp->add_option("--observable", o.observable, "observable file")->required();
    wp->add_option("--out", o.out, "output file (stdout when omitted)");

    auto* equiv = app.add_subcommand("equiv", "compare two programs by the Choi matrices of their denotations");
    equiv->add_option("FILE1", o.file)->required();
    equiv->add_option("FILE2", o.file2)->required();

    auto* branches = app.add_subcommand("branches", "list classical states and operator weights");
    branches->add_option("FILE", o.file)->required();

    auto* repro = app.add_subcommand("reproduce", "run a worked example or theorem check");
    repro->add_option("SUITE", o.suite)
        ->required()
        ->check(CLI::IsMember({"walk", "gmeas", "bb84", "local", "proim", "loop"}));
    repro->add_option("--n", o.n, "number of loop iterations")
        ->check(CLI::Range(std::size_t{1}, kDefaultLoopBound))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "qgcl: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    const std::size_t saved_cap = max_total_dimension();
    if (o.max_dim) set_max_total_dimension(*o.max_dim);
    int code = kSoftware;
    try {
        if (*check) {
            code = detail::check(o, out, err);
        } else if (*run) {
            code = detail::run(o, out, err);
        } else if (*wp) {
            code = detail::wp(o, out, err);
        } else if (*equiv) {
            code = detail::equiv(o, out, err);
        } else if (*branches) {
            code = detail::branches(o, out, err);
        } else {
            code = detail::reproduce(o, out);
        }
    } catch (const Error& e) {
        err << "qgcl: " << e.what() << "\n";
        code = e.kind() == ErrorKind::Io ? kNoInput : kSoftware;
    } catch (const std::exception& e) {
        err << "qgcl: " << e.what() << "\n";
        code = kSoftware;
    }
    set_max_total_dimension(saved_cap);
    return code;
}

}  // namespace qgcl::cli
