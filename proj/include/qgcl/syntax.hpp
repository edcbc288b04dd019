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

// Concrete syntax: a recursive-descent parser and a printer.
//
//   file    := decl* program?
//   decl    := 'qvar' id (',' id)* ':' INT ';'
//            | 'matrix' id '=' JSON ';' | 'measurement' id '=' JSON ';'
//            | 'name' id 'vars' '{' ids '}' 'qvars' '{' ids '}' ';'
//            | 'use' STRING ';'
//   program := stmt (';' program)?
//   stmt    := 'abort' | 'skip' | op '[' ids ']'
//            | 'measure' id '<-' meas '[' ids ']' '{' (INT ':' program ';')* '}'
//            | 'guard' ids ('basis' op)? '{' (ket '->' program ';')* '}'
//            | 'begin' 'local' ids ':=' init ';' program 'end'
//            | 'pchoice' '{' (program '@' NUMBER ';')* '}'
//            | 'qchoice' stmt ('basis' op)? '{' (ket '->' program ';')* '}'
//            | 'mu' id '.' stmt | id | '(' program ')'
//   ket     := '|' INT (',' INT)* '>'
//
// Operators are declared names, built-in gates, or inline JSON matrix
// records. The last ';' of a braced list is optional.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qgcl/builtins.hpp"
#include "qgcl/error.hpp"
#include "qgcl/matrix_io.hpp"
#include "qgcl/program.hpp"
#include "qgcl/well_formed.hpp"

namespace qgcl {

/// Declarations collected while parsing.
struct Declarations {
    std::vector<RegisterLayout::Variable> qvars;
    std::map<std::string, Matrix> matrices;
    std::map<std::string, Measurement> measurements;
    std::map<std::string, NameStmt> names;

    std::optional<RegisterLayout::Variable> qvar(std::string_view n) const {
        for (const auto& v : qvars) {
            if (v.name == n) return v;
        }
        return std::nullopt;
    }
};

struct ParseResult {
    std::optional<Program> program;  // set only when the text parses and is well formed
    std::optional<Program> tree;     // set whenever the text parses
    Declarations declarations;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return program.has_value(); }
};

namespace syntax {

inline bool is_keyword(std::string_view w) {
    static constexpr std::string_view kws[] = {"abort", "skip",  "measure", "guard",       "basis", "begin",
                                               "local", "end",   "pchoice", "qchoice",     "mu",    "qvar",
                                               "matrix", "name", "vars",    "qvars",       "use",
                                               "measurement"};
    for (auto k : kws) {
        if (k == w) return true;
    }
    return false;
}

inline bool is_identifier(std::string_view w) {
    if (w.empty() || !(std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_')) return false;
    for (char c : w) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return !is_keyword(w);
}

enum class Tok { Ident, Int, Number, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceLoc loc;
    std::size_t offset = 0;
};

class ParseFailure : public std::exception {
public:
    explicit ParseFailure(Diagnostic d) : diag(std::move(d)) {}
    const char* what() const noexcept override { return diag.message.c_str(); }
    Diagnostic diag;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    const Token& peek() {
        if (!cached_) {
            tok_ = scan();
            cached_ = true;
        }
        return tok_;
    }

    Token next() {
        Token t = peek();
        cached_ = false;
        return t;
    }

    /// The balanced {...} text starting at the current token, which must be '{'.
    std::pair<std::string, SourceLoc> raw_object() {
        const Token open = peek();
        cached_ = false;
        std::size_t i = open.offset;
        int depth = 0;
        bool in_string = false;
        for (; i < src_.size(); ++i) {
            char c = src_[i];
            if (in_string) {
                if (c == '\\') {
                    ++i;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') in_string = true;
            if (c == '{') ++depth;
            if (c == '}' && --depth == 0) break;
        }
        if (i >= src_.size()) fail(open.loc, "unterminated JSON literal");
        for (std::size_t k = pos_; k <= i; ++k) advance_char(k);
        pos_ = i + 1;
        return {std::string(src_.substr(open.offset, i + 1 - open.offset)), open.loc};
    }

    [[noreturn]] static void fail(SourceLoc loc, std::string msg,
                                  DiagnosticCode code = DiagnosticCode::SyntaxError) {
        throw ParseFailure(Diagnostic{code, std::move(msg), loc, {}});
    }

private:
    void advance_char(std::size_t k) {
        if (src_[k] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance_char(pos_++);
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance_char(pos_++);
            } else {
                break;
            }
        }
    }

    Token scan() {
        skip_space();
        Token t;
        t.loc = {line_, col_};
        t.offset = pos_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        auto take = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k) advance_char(pos_ + k);
            t.text = std::string(src_.substr(pos_, n));
            pos_ += n;
        };
        auto at = [&](std::size_t k) -> char { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t n = 0;
            while (std::isalnum(static_cast<unsigned char>(at(n))) || at(n) == '_') ++n;
            t.kind = Tok::Ident;
            take(n);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            ((c == '-' || c == '.') && std::isdigit(static_cast<unsigned char>(at(1))))) {
            std::size_t n = (c == '-') ? 1 : 0;
            bool real = false;
            while (std::isdigit(static_cast<unsigned char>(at(n)))) ++n;
            if (at(n) == '.') {
                real = true;
                ++n;
                while (std::isdigit(static_cast<unsigned char>(at(n)))) ++n;
            }
            if (at(n) == 'e' || at(n) == 'E') {
                std::size_t m = n + 1;
                if (at(m) == '+' || at(m) == '-') ++m;
                if (std::isdigit(static_cast<unsigned char>(at(m)))) {
                    real = true;
                    n = m;
                    while (std::isdigit(static_cast<unsigned char>(at(n)))) ++n;
                }
            }
            t.kind = real ? Tok::Number : Tok::Int;
            take(n);
            return t;
        }
        if (c == '"') {
            std::size_t n = 1;
            while (at(n) != '"' && at(n) != '\0' && at(n) != '\n') ++n;
            if (at(n) != '"') fail(t.loc, "unterminated string");
            t.kind = Tok::String;
            take(n + 1);
            t.text = t.text.substr(1, t.text.size() - 2);
            return t;
        }
        for (std::string_view p : {"<-", "->", ":="}) {
            if (src_.substr(pos_, 2) == p) {
                t.kind = Tok::Punct;
                take(2);
                return t;
            }
        }
        if (std::string_view("[]{}();,:.@|>=").find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
            take(1);
            return t;
        }
        fail(t.loc, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
    bool cached_ = false;
};

class Parser {
public:
    Parser(std::string_view src, std::filesystem::path base_dir) : lex_(src), base_(std::move(base_dir)) {}

    Declarations decls;

    std::optional<Program> parse_file() {
        while (at_decl()) parse_decl();
        if (lex_.peek().kind == Tok::End) return std::nullopt;
        Program p = parse_program();
        if (lex_.peek().kind != Tok::End) unexpected("end of input");
        return p;
    }

private:
    using Fail = Lexer;

    bool is(std::string_view text) { return lex_.peek().kind != Tok::End && lex_.peek().kind != Tok::String &&
                                            lex_.peek().text == text; }

    [[noreturn]] void unexpected(std::string_view wanted) {
        const auto& t = lex_.peek();
        Fail::fail(t.loc, "expected " + std::string(wanted) + ", found " +
                              (t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'"));
    }

    Token expect(std::string_view text) {
        if (!is(text)) unexpected("'" + std::string(text) + "'");
        return lex_.next();
    }

    Token expect_ident(std::string_view what) {
        const auto& t = lex_.peek();
        if (t.kind != Tok::Ident || is_keyword(t.text)) unexpected(what);
        return lex_.next();
    }

    std::int64_t expect_int(std::string_view what) {
        const auto& t = lex_.peek();
        if (t.kind != Tok::Int) unexpected(what);
        auto tok = lex_.next();
        try {
            return std::stoll(tok.text);
        } catch (const std::exception&) {
            Fail::fail(tok.loc, "integer out of range");
        }
    }

    double expect_number(std::string_view what) {
        const auto& t = lex_.peek();
        if (t.kind != Tok::Int && t.kind != Tok::Number) unexpected(what);
        auto tok = lex_.next();
        return std::strtod(tok.text.c_str(), nullptr);
    }

    // ---- declarations

    bool at_decl() { return is("qvar") || is("matrix") || is("measurement") || is("name") || is("use"); }

    void parse_decl() {
        if (is("qvar")) {
            lex_.next();
            std::vector<Token> ids{expect_ident("variable name")};
            while (is(",")) {
                lex_.next();
                ids.push_back(expect_ident("variable name"));
            }
            expect(":");
            const auto dim_tok = lex_.peek();
            const auto dim = expect_int("dimension");
            if (dim < 2) Fail::fail(dim_tok.loc, "quantum variable dimension must be at least 2");
            expect(";");
            for (const auto& id : ids) {
                if (decls.qvar(id.text)) {
                    Fail::fail(id.loc, "quantum variable '" + id.text + "' declared twice",
                               DiagnosticCode::DuplicateVariable);
                }
                decls.qvars.push_back({id.text, static_cast<std::size_t>(dim)});
            }
        } else if (is("matrix") || is("measurement")) {
            const bool meas = lex_.next().text == "measurement";
            auto id = expect_ident("definition name");
            expect("=");
            if (!is("{")) unexpected("JSON object");
            auto [text, loc] = lex_.raw_object();
            expect(";");
            auto j = json_at(text, loc);
            define(id.text, j, meas, id.loc);
        } else if (is("name")) {
            lex_.next();
            auto id = expect_ident("program name");
            expect("vars");
            VariableSet vars;
            for (const auto& t : braced_ids()) vars.insert(t.text);
            expect("qvars");
            auto ql = braced_ids();
            expect(";");
            decls.names[id.text] = NameStmt{id.text, std::move(vars), layout_for(ql)};
        } else {
            const auto use_tok = lex_.next();
            const auto& t = lex_.peek();
            if (t.kind != Tok::String) unexpected("file name string");
            auto file = lex_.next();
            expect(";");
            const auto path = (base_ / file.text).string();
            io::Json j;
            try {
                j = io::read_json_file(path);
            } catch (const Error& e) {
                Fail::fail(file.loc, e.what(), DiagnosticCode::UnreadableFile);
            }
            if (!j.is_object()) Fail::fail(file.loc, "'" + path + "' must hold a JSON object of definitions");
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!is_identifier(it.key())) Fail::fail(use_tok.loc, "'" + it.key() + "' is not a valid name");
                define(it.key(), it.value(), it.value().contains("outcomes"), file.loc);
            }
        }
    }

    io::Json json_at(const std::string& text, SourceLoc loc) {
        try {
            return io::Json::parse(text);
        } catch (const io::Json::parse_error& e) {
            Fail::fail(loc, std::string("malformed JSON literal: ") + e.what());
        }
    }

    static Matrix matrix_at(const io::Json& j, SourceLoc loc) {
        try {
            return io::matrix_from_json(j);
        } catch (const Error& e) {
            Fail::fail(loc, e.what());
        }
    }

    static Measurement measurement_at(const io::Json& j, std::string label, SourceLoc loc) {
        if (!j.is_object() || !j.contains("outcomes") || !j.at("outcomes").is_array()) {
            Fail::fail(loc, "measurement record needs an 'outcomes' array of [outcome, matrix] pairs");
        }
        Measurement m;
        m.label = std::move(label);
        for (const auto& item : j.at("outcomes")) {
            if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer()) {
                Fail::fail(loc, "measurement outcomes must be [integer, matrix] pairs");
            }
            m.operators.emplace_back(item[0].get<std::int64_t>(), matrix_at(item[1], loc));
        }
        std::sort(m.operators.begin(), m.operators.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < m.operators.size(); ++i) {
            if (m.operators[i].first == m.operators[i - 1].first) Fail::fail(loc, "repeated measurement outcome");
        }
        if (m.operators.empty()) Fail::fail(loc, "measurement without outcomes");
        return m;
    }

    void define(const std::string& id, const io::Json& j, bool meas, SourceLoc loc) {
        if (decls.matrices.count(id) || decls.measurements.count(id)) {
            Fail::fail(loc, "'" + id + "' is defined twice");
        }
        if (meas) {
            decls.measurements[id] = measurement_at(j, id, loc);
        } else {
            decls.matrices[id] = matrix_at(j, loc);
        }
    }

    // ---- variables

    std::vector<Token> braced_ids() {
        expect("{");
        std::vector<Token> out;
        if (!is("}")) {
            out.push_back(expect_ident("variable name"));
            while (is(",")) {
                lex_.next();
                out.push_back(expect_ident("variable name"));
            }
        }
        expect("}");
        return out;
    }

    std::vector<Token> id_list() {
        std::vector<Token> out;
        if (lex_.peek().kind != Tok::Ident || is_keyword(lex_.peek().text)) return out;
        out.push_back(lex_.next());
        while (is(",")) {
            lex_.next();
            out.push_back(expect_ident("variable name"));
        }
        return out;
    }

    RegisterLayout layout_for(const std::vector<Token>& ids) {
        std::vector<RegisterLayout::Variable> vars;
        for (const auto& t : ids) {
            auto v = decls.qvar(t.text);
            if (!v) {
                Fail::fail(t.loc, "quantum variable '" + t.text + "' is not declared",
                           DiagnosticCode::UndeclaredVariable);
            }
            for (const auto& w : vars) {
                if (w.name == t.text) {
                    Fail::fail(t.loc, "quantum variable '" + t.text + "' listed twice",
                               DiagnosticCode::DuplicateVariable);
                }
            }
            vars.push_back(*v);
        }
        return RegisterLayout(std::move(vars));
    }

    // ---- operators

    struct OpRef {
        std::optional<std::string> name;  // absent for an inline literal
        std::optional<Matrix> literal;
        SourceLoc loc;
    };

    OpRef parse_opref(std::string_view what) {
        if (is("{")) {
            auto [text, loc] = lex_.raw_object();
            return {std::nullopt, matrix_at(json_at(text, loc), loc), loc};
        }
        auto id = expect_ident(what);
        return {id.text, std::nullopt, id.loc};
    }

    std::pair<Matrix, std::string> resolve_matrix(const OpRef& r, std::size_t dim) {
        if (r.literal) return {*r.literal, {}};
        if (auto it = decls.matrices.find(*r.name); it != decls.matrices.end()) return {it->second, *r.name};
        if (auto m = gates::builtin_unitary(*r.name, dim)) return {*m, *r.name};
        Fail::fail(r.loc,
                   gates::is_builtin_unitary_name(*r.name)
                       ? "built-in '" + *r.name + "' is not defined on dimension " + std::to_string(dim)
                       : "unknown operator '" + *r.name + "'",
                   DiagnosticCode::UnknownOperator);
    }

    // ---- programs

    bool starts_stmt() {
        const auto& t = lex_.peek();
        if (t.kind == Tok::Ident) {
            return !is_keyword(t.text) || t.text == "abort" || t.text == "skip" || t.text == "measure" ||
                   t.text == "guard" || t.text == "begin" || t.text == "pchoice" || t.text == "qchoice" ||
                   t.text == "mu";
        }
        return is("(") || is("{");
    }

    Program parse_program() {
        Program first = parse_stmt();
        const SourceLoc loc = first.loc();
        if (is(";")) {
            // a ';' followed by something that cannot start a statement ends the sequence
            lex_.next();
            if (starts_stmt()) {
                Program rest = parse_program();
                return Program(SeqStmt{std::move(first), std::move(rest)}, loc);
            }
            pending_semicolon_ = true;
        }
        return first;
    }

    /// Consumes the list separator, which parse_program may already have eaten.
    bool separator() {
        if (pending_semicolon_) {
            pending_semicolon_ = false;
            return true;
        }
        if (is(";")) {
            lex_.next();
            return true;
        }
        return false;
    }

    void no_pending(SourceLoc) { pending_semicolon_ = false; }

    Program parse_stmt() {
        if (!starts_stmt()) unexpected("a statement");
        const Token t = lex_.peek();
        const SourceLoc loc = t.loc;
        if (t.text == "abort" && t.kind == Tok::Ident) {
            lex_.next();
            return Program(AbortStmt{}, loc);
        }
        if (t.text == "skip" && t.kind == Tok::Ident) {
            lex_.next();
            return Program(SkipStmt{}, loc);
        }
        if (t.kind == Tok::Ident && t.text == "measure") return parse_measure();
        if (t.kind == Tok::Ident && t.text == "guard") return parse_guard();
        if (t.kind == Tok::Ident && t.text == "begin") return parse_block();
        if (t.kind == Tok::Ident && t.text == "pchoice") return parse_pchoice();
        if (t.kind == Tok::Ident && t.text == "qchoice") return parse_qchoice();
        if (t.kind == Tok::Ident && t.text == "mu") return parse_mu();
        if (is("(")) {
            lex_.next();
            Program p = parse_program();
            if (pending_semicolon_) unexpected("a statement");
            expect(")");
            return p;
        }
        if (is("{")) return parse_unitary(parse_opref("operator"));
        // identifier: an operator application or a program name
        auto id = lex_.next();
        if (is("[")) return parse_unitary(OpRef{id.text, std::nullopt, id.loc});
        auto it = decls.names.find(id.text);
        if (it == decls.names.end()) {
            Fail::fail(id.loc, "unknown program name '" + id.text + "'", DiagnosticCode::UnknownOperator);
        }
        return Program(it->second, loc);
    }

    Program parse_unitary(const OpRef& op) {
        expect("[");
        auto q = layout_for(id_list());
        expect("]");
        auto [m, label] = resolve_matrix(op, q.dimension());
        return Program(UnitaryStmt{std::move(q), std::move(m), std::move(label)}, op.loc);
    }

    Program parse_measure() {
        const SourceLoc loc = lex_.next().loc;
        auto x = expect_ident("classical variable");
        expect("<-");
        std::optional<Measurement> inline_meas;
        OpRef mref;
        if (is("{")) {
            auto [text, jloc] = lex_.raw_object();
            inline_meas = measurement_at(json_at(text, jloc), {}, jloc);
            mref.loc = jloc;
        } else {
            auto id = expect_ident("measurement");
            mref = OpRef{id.text, std::nullopt, id.loc};
        }
        expect("[");
        auto q = layout_for(id_list());
        expect("]");
        Measurement meas;
        if (inline_meas) {
            meas = *inline_meas;
        } else if (auto it = decls.measurements.find(*mref.name); it != decls.measurements.end()) {
            meas = it->second;
        } else if (auto b = gates::builtin_measurement(*mref.name, q.dimension())) {
            meas = *b;
        } else {
            Fail::fail(mref.loc,
                       gates::is_builtin_measurement_name(*mref.name)
                           ? "built-in '" + *mref.name + "' is not defined on dimension " +
                                 std::to_string(q.dimension())
                           : "unknown measurement '" + *mref.name + "'",
                       DiagnosticCode::UnknownOperator);
        }
        expect("{");
        std::vector<std::pair<std::int64_t, Program>> branches;
        while (!is("}")) {
            const auto otok = lex_.peek();
            auto m = expect_int("measurement outcome");
            for (const auto& [o, _] : branches) {
                if (o == m) Fail::fail(otok.loc, "outcome " + std::to_string(m) + " has two branches");
            }
            expect(":");
            branches.emplace_back(m, parse_program());
            if (!separator()) break;
        }
        expect("}");
        std::sort(branches.begin(), branches.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return Program(MeasureStmt{x.text, std::move(q), std::move(meas), std::move(branches)}, loc);
    }

    std::optional<GuardBasis> parse_basis_clause(std::size_t dim) {
        if (!is("basis")) return std::nullopt;
        lex_.next();
        auto op = parse_opref("basis");
        auto [m, label] = resolve_matrix(op, dim);
        return GuardBasis{std::move(m), std::move(label)};
    }

    std::size_t parse_ket(const RegisterLayout& q) {
        const auto bar = expect("|");
        std::vector<std::int64_t> digits{expect_int("basis index")};
        while (is(",")) {
            lex_.next();
            digits.push_back(expect_int("basis index"));
        }
        expect(">");
        if (digits.size() == 1) {
            if (digits[0] < 0 || static_cast<std::size_t>(digits[0]) >= q.dimension()) {
                Fail::fail(bar.loc, "basis index " + std::to_string(digits[0]) + " out of range");
            }
            return static_cast<std::size_t>(digits[0]);
        }
        if (digits.size() != q.size()) {
            Fail::fail(bar.loc, "basis state lists " + std::to_string(digits.size()) + " digits for " +
                                    std::to_string(q.size()) + " variables");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < digits.size(); ++k) {
            const auto dk = q.variables()[k].dim;
            if (digits[k] < 0 || static_cast<std::size_t>(digits[k]) >= dk) {
                Fail::fail(bar.loc, "digit " + std::to_string(digits[k]) + " out of range for '" +
                                        q.variables()[k].name + "'");
            }
            idx = idx * dk + static_cast<std::size_t>(digits[k]);
        }
        return idx;
    }

    std::vector<Program> parse_arms(const RegisterLayout& q, SourceLoc loc) {
        expect("{");
        std::vector<std::optional<Program>> arms(q.dimension());
        while (!is("}")) {
            const auto kloc = lex_.peek().loc;
            auto i = parse_ket(q);
            expect("->");
            if (arms[i]) Fail::fail(kloc, "basis state " + std::to_string(i) + " has two branches");
            arms[i] = parse_program();
            if (!separator()) break;
        }
        expect("}");
        std::vector<Program> out;
        for (std::size_t i = 0; i < arms.size(); ++i) {
            if (!arms[i]) {
                Fail::fail(loc, "no branch for guard state |" + std::to_string(i) + ">",
                           DiagnosticCode::BranchMismatch);
            }
            out.push_back(*arms[i]);
        }
        return out;
    }

    Program parse_guard() {
        const SourceLoc loc = lex_.next().loc;
        auto q = layout_for(id_list());
        auto basis = parse_basis_clause(q.dimension()).value_or(GuardBasis::computational(q.dimension()));
        auto branches = parse_arms(q, loc);
        return Program(GuardedStmt{std::move(q), std::move(basis), std::move(branches)}, loc);
    }

    Program parse_qchoice() {
        const SourceLoc loc = lex_.next().loc;
        Program coin = parse_stmt();
        RegisterLayout q;
        try {
            q = layout_of(coin);
        } catch (const Error& e) {
            Fail::fail(loc, e.what(), DiagnosticCode::VariableDimensionConflict);
        }
        auto basis = parse_basis_clause(q.dimension()).value_or(GuardBasis::computational(q.dimension()));
        auto branches = parse_arms(q, loc);
        return Program(QChoiceStmt{std::move(coin), std::move(basis), std::move(branches)}, loc);
    }

    Program parse_block() {
        const SourceLoc loc = lex_.next().loc;
        expect("local");
        auto q = layout_for(id_list());
        expect(":=");
        Matrix init;
        std::string label;
        if (is("|")) {
            init = projector(basis_ket(q.dimension(), parse_ket(q)));
        } else {
            auto op = parse_opref("initial state");
            if (op.literal) {
                init = *op.literal;
            } else if (auto it = decls.matrices.find(*op.name); it != decls.matrices.end()) {
                init = it->second;
                label = *op.name;
            } else {
                Fail::fail(op.loc, "unknown state '" + *op.name + "'", DiagnosticCode::UnknownOperator);
            }
        }
        expect(";");
        Program body = parse_program();
        if (pending_semicolon_) pending_semicolon_ = false;
        expect("end");
        return Program(BlockStmt{std::move(q), std::move(init), std::move(label), std::move(body)}, loc);
    }

    Program parse_pchoice() {
        const SourceLoc loc = lex_.next().loc;
        expect("{");
        std::vector<double> weights;
        std::vector<Program> branches;
        while (!is("}")) {
            branches.push_back(parse_program());
            if (pending_semicolon_) unexpected("'@'");
            expect("@");
            weights.push_back(expect_number("probability"));
            if (!is(";")) break;
            lex_.next();
        }
        expect("}");
        return Program(ProbChoiceStmt{std::move(weights), std::move(branches)}, loc);
    }

    Program parse_mu() {
        const SourceLoc loc = lex_.next().loc;
        auto id = expect_ident("program name");
        auto it = decls.names.find(id.text);
        if (it == decls.names.end()) {
            Fail::fail(id.loc, "program name '" + id.text + "' is not declared", DiagnosticCode::UnknownOperator);
        }
        expect(".");
        Program body = parse_stmt();
        return Program(MuStmt{it->second, std::move(body)}, loc);
    }

    Lexer lex_;
    std::filesystem::path base_;
    bool pending_semicolon_ = false;
};

// ---------------------------------------------------------------------------
// Printer

class Printer {
public:
    std::string run(const Program& p) {
        std::string body = stmt_seq(p, 0);
        std::string head;
        for (const auto& v : qvars_) head += "qvar " + v.name + " : " + std::to_string(v.dim) + ";\n";
        for (const auto& [id, j] : matrix_decls_) head += "matrix " + id + " = " + j + ";\n";
        for (const auto& [id, j] : meas_decls_) head += "measurement " + id + " = " + j + ";\n";
        for (const auto& n : names_) head += n + "\n";
        if (head.empty()) return body;
        return head + "\n" + body;
    }

private:
    static std::string pad(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

    void note_layout(const RegisterLayout& l) {
        for (const auto& v : l.variables()) {
            bool seen = false;
            for (const auto& w : qvars_) seen = seen || w.name == v.name;
            if (!seen) qvars_.push_back(v);
        }
    }

    std::string ids(const RegisterLayout& l) {
        note_layout(l);
        std::string out;
        for (const auto& v : l.variables()) out += (out.empty() ? "" : ", ") + v.name;
        return out;
    }

    static std::string literal(const Matrix& m) { return io::matrix_to_json(m).dump(); }

    /// A name that the parser resolves back to exactly m, or an inline literal.
    std::string matrix_ref(const Matrix& m, const std::string& label, bool allow_builtin = true) {
        if (!label.empty() && is_identifier(label)) {
            auto builtin = gates::builtin_unitary(label, static_cast<std::size_t>(m.rows()));
            const bool shadowed = matrix_decls_.count(label) > 0;
            if (allow_builtin && !shadowed && builtin && detail::same_matrix(*builtin, m)) return label;
            const std::string lit = literal(m);
            auto [it, inserted] = matrix_decls_.emplace(label, lit);
            if (inserted || it->second == lit) return label;
        }
        return literal(m);
    }

    std::string measurement_ref(const Measurement& m) {
        io::Json outs = io::Json::array();
        for (const auto& [o, op] : m.operators) outs.push_back(io::Json::array({o, io::matrix_to_json(op)}));
        io::Json j;
        j["outcomes"] = outs;
        if (!m.label.empty() && is_identifier(m.label)) {
            auto builtin = gates::builtin_measurement(m.label, m.dimension());
            if (!meas_decls_.count(m.label) && builtin && detail::same_measurement(*builtin, m)) return m.label;
            auto [it, inserted] = meas_decls_.emplace(m.label, j.dump());
            if (inserted || it->second == j.dump()) return m.label;
        }
        return j.dump();
    }

    std::string basis_clause(const GuardBasis& b) {
        if (b.label.empty() && b.is_computational()) return "";
        return " basis " + matrix_ref(b.matrix, b.label);
    }

    void note_name(const NameStmt& n) {
        note_layout(n.qvars);
        std::string vars;
        for (const auto& x : n.vars) vars += (vars.empty() ? "" : ", ") + x;
        std::string qv;
        for (const auto& v : n.qvars.variables()) qv += (qv.empty() ? "" : ", ") + v.name;
        std::string decl = "name " + n.id + " vars {" + vars + "} qvars {" + qv + "};";
        if (std::find(names_.begin(), names_.end(), decl) == names_.end()) names_.push_back(decl);
    }

    // statement that must stand alone (coin, mu body, first half of a sequence)
    std::string atom(const Program& p, int depth) {
        if (p.kind() == Program::Kind::Seq) return "(" + stmt_seq(p, depth) + ")";
        return stmt(p, depth);
    }

    std::string stmt_seq(const Program& p, int depth) {
        if (const auto* s = p.as<SeqStmt>()) {
            return atom(s->first, depth) + ";\n" + pad(depth) + stmt_seq(s->second, depth);
        }
        return stmt(p, depth);
    }

    std::string arms(const std::vector<Program>& branches, int depth) {
        std::string out = " {\n";
        for (std::size_t i = 0; i < branches.size(); ++i) {
            out += pad(depth + 1) + "|" + std::to_string(i) + "> -> " + stmt_seq(branches[i], depth + 2);
            out += (i + 1 < branches.size() ? ";\n" : "\n");
        }
        return out + pad(depth) + "}";
    }

    std::string stmt(const Program& p, int depth) {
        return std::visit(
            [&](const auto& s) -> std::string {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, AbortStmt>) {
                    return "abort";
                } else if constexpr (std::is_same_v<T, SkipStmt>) {
                    return "skip";
                } else if constexpr (std::is_same_v<T, UnitaryStmt>) {
                    return matrix_ref(s.u, s.label) + "[" + ids(s.qvars) + "]";
                } else if constexpr (std::is_same_v<T, MeasureStmt>) {
                    std::string out = "measure " + s.var + " <- " + measurement_ref(s.measurement) + "[" +
                                      ids(s.qvars) + "] {\n";
                    for (std::size_t i = 0; i < s.branches.size(); ++i) {
                        out += pad(depth + 1) + std::to_string(s.branches[i].first) + ": " +
                               stmt_seq(s.branches[i].second, depth + 2);
                        out += (i + 1 < s.branches.size() ? ";\n" : "\n");
                    }
                    return out + pad(depth) + "}";
                } else if constexpr (std::is_same_v<T, GuardedStmt>) {
                    std::string q = ids(s.qvars);
                    return "guard" + (q.empty() ? "" : " " + q) + basis_clause(s.basis) + arms(s.branches, depth);
                } else if constexpr (std::is_same_v<T, SeqStmt>) {
                    return "(" + stmt_seq(p, depth) + ")";
                } else if constexpr (std::is_same_v<T, BlockStmt>) {
                    std::string init;
                    if (!s.init_label.empty()) {
                        init = matrix_ref(s.init, s.init_label, false);
                    } else if (auto k = basis_projector_index(s.init)) {
                        init = "|" + std::to_string(*k) + ">";
                    } else {
                        init = literal(s.init);
                    }
                    return "begin local " + ids(s.locals) + " := " + init + ";\n" + pad(depth + 1) +
                           stmt_seq(s.body, depth + 1) + "\n" + pad(depth) + "end";
                } else if constexpr (std::is_same_v<T, ProbChoiceStmt>) {
                    std::string out = "pchoice {\n";
                    for (std::size_t i = 0; i < s.branches.size(); ++i) {
                        const double w = i < s.weights.size() ? s.weights[i] : 0.0;
                        out += pad(depth + 1) + stmt_seq(s.branches[i], depth + 2) + " @ " + number(w);
                        out += (i + 1 < s.branches.size() ? ";\n" : "\n");
                    }
                    return out + pad(depth) + "}";
                } else if constexpr (std::is_same_v<T, QChoiceStmt>) {
                    return "qchoice " + atom(s.coin, depth) + basis_clause(s.basis) + arms(s.branches, depth);
                } else if constexpr (std::is_same_v<T, NameStmt>) {
                    note_name(s);
                    return s.id;
                } else {
                    note_name(s.name);
                    return "mu " + s.name.id + " . " + atom(s.body, depth);
                }
            },
            p.node().stmt);
    }

    static std::string number(double w) {
        std::string t = io::Json(w).dump();
        if (t.find_first_of(".eE") == std::string::npos) t += ".0";
        return t;
    }

    static std::optional<std::size_t> basis_projector_index(const Matrix& m) {
        if (m.rows() != m.cols()) return std::nullopt;
        for (Eigen::Index k = 0; k < m.rows(); ++k) {
            if (detail::same_matrix(m, projector(basis_ket(static_cast<std::size_t>(m.rows()),
                                                           static_cast<std::size_t>(k))))) {
                return static_cast<std::size_t>(k);
            }
        }
        return std::nullopt;
    }

    std::vector<RegisterLayout::Variable> qvars_;
    std::map<std::string, std::string> matrix_decls_;
    std::map<std::string, std::string> meas_decls_;
    std::vector<std::string> names_;
};

}  // namespace syntax

/// Parses QGCL source text. `base_dir` resolves `use "file"` declarations.
/// Syntax and resolution errors stop the parse with one diagnostic; a
/// syntactically valid program is then checked for well-formedness.
inline ParseResult parse(std::string_view text, const std::filesystem::path& base_dir = ".") {
    ParseResult r;
    syntax::Parser parser(text, base_dir);
    try {
        r.tree = parser.parse_file();
    } catch (const syntax::ParseFailure& f) {
        r.declarations = parser.decls;
        r.diagnostics.push_back(f.diag);
        return r;
    } catch (const Error& e) {
        r.declarations = parser.decls;
        r.diagnostics.push_back({DiagnosticCode::SyntaxError, e.what(), {}, {}});
        return r;
    }
    r.declarations = parser.decls;
    if (!r.tree) {
        r.diagnostics.push_back({DiagnosticCode::SyntaxError, "no program in input", {}, {}});
        return r;
    }
    r.diagnostics = check_well_formed(*r.tree);
    if (r.diagnostics.empty()) r.program = r.tree;
    return r;
}

inline ParseResult parse_file(const std::string& path) {
    const auto text = io::read_text_file(path);
    return parse(text, std::filesystem::path(path).parent_path());
}

/// Source text that parses back to a structurally equal program.
inline std::string print(const Program& p) { return syntax::Printer().run(p); }

}  // namespace qgcl
