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

// JSON text format for matrices, density matrices and observables:
//
//   {"rows": 2, "cols": 2, "entries": [[re, im], ...], "layout": [["q", 2]]}
//
// entries are row-major; "layout" is optional for bare operators.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qgcl/error.hpp"
#include "qgcl/tensor.hpp"

namespace qgcl::io {

using Json = nlohmann::ordered_json;

inline Json matrix_to_json(const Matrix& m) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            entries.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
    }
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["entries"] = std::move(entries);
    return j;
}

inline Json layout_to_json(const RegisterLayout& layout) {
    Json arr = Json::array();
    for (const auto& v : layout.variables()) arr.push_back(Json::array({v.name, v.dim}));
    return arr;
}

inline Json matrix_to_json(const Matrix& m, const RegisterLayout& layout) {
    Json j = matrix_to_json(m);
    j["layout"] = layout_to_json(layout);
    return j;
}

namespace detail {

inline std::size_t positive_int(const Json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorKind::Io, std::string("matrix record lacks '") + key + "'");
    const Json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
        throw Error(ErrorKind::Io, std::string("matrix field '") + key + "' must be a positive integer");
    }
    return v.get<std::size_t>();
}

}  // namespace detail

inline bool looks_like_matrix(const Json& j) {
    return j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("entries");
}

inline Matrix matrix_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Io, "matrix record must be a JSON object");
    const std::size_t rows = detail::positive_int(j, "rows");
    const std::size_t cols = detail::positive_int(j, "cols");
    check_capacity(std::max(rows, cols), "matrix");
    if (!j.contains("entries") || !j.at("entries").is_array()) {
        throw Error(ErrorKind::Io, "matrix record lacks an 'entries' array");
    }
    const Json& e = j.at("entries");
    if (e.size() != rows * cols) {
        throw Error(ErrorKind::Io, "matrix has " + std::to_string(e.size()) + " entries, expected " +
                                       std::to_string(rows * cols));
    }
    Matrix m(rows, cols);
    for (std::size_t k = 0; k < e.size(); ++k) {
        const Json& z = e[k];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
            throw Error(ErrorKind::Io, "matrix entry " + std::to_string(k) + " is not a [re, im] pair");
        }
        m(k / cols, k % cols) = Complex(z[0].get<double>(), z[1].get<double>());
    }
    if (!all_finite(m)) throw Error(ErrorKind::Io, "matrix has non-finite entries");
    return m;
}

inline RegisterLayout layout_from_json(const Json& j) {
    if (!j.is_array()) throw Error(ErrorKind::Io, "'layout' must be an array of [name, dim] pairs");
    std::vector<RegisterLayout::Variable> vars;
    for (const auto& item : j) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_string() || !item[1].is_number_integer()) {
            throw Error(ErrorKind::Io, "'layout' entries must be [name, dim] pairs");
        }
        vars.push_back({item[0].get<std::string>(), item[1].get<std::size_t>()});
    }
    try {
        return RegisterLayout(std::move(vars));
    } catch (const Error& e) {
        throw Error(ErrorKind::Io, e.what());
    }
}

/// A matrix together with the layout it was declared on.
struct LayoutMatrix {
    Matrix matrix;
    RegisterLayout layout;
};

inline LayoutMatrix layout_matrix_from_json(const Json& j) {
    Matrix m = matrix_from_json(j);
    if (!j.contains("layout")) throw Error(ErrorKind::Io, "state/observable record lacks 'layout'");
    RegisterLayout layout = layout_from_json(j.at("layout"));
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != layout.dimension()) {
        throw Error(ErrorKind::Io, "matrix shape does not match its layout dimension");
    }
    return {std::move(m), std::move(layout)};
}

inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Io, origin + ": " + e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

inline Json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

/// Canonical single-line rendering followed by a newline.
inline std::string render(const Json& j) { return j.dump() + "\n"; }

inline DensityMatrix read_density(const std::string& path) {
    auto lm = layout_matrix_from_json(read_json_file(path));
    try {
        return DensityMatrix(std::move(lm.matrix), std::move(lm.layout));
    } catch (const Error& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
}

}  // namespace qgcl::io
