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

// Ill-formed programs and the diagnostic each one must produce.

#include <vector>

#include "qgcl/well_formed.hpp"

namespace corpus {

struct Negative {
    const char* text;
    qgcl::DiagnosticCode code;
};

inline const std::vector<Negative>& negative_programs() {
    using qgcl::DiagnosticCode;
    static const std::vector<Negative> all{
        {"qvar q : 2; X[q", DiagnosticCode::SyntaxError},
        {"X[q]", DiagnosticCode::UndeclaredVariable},
        {"qvar q : 2; FOO[q]", DiagnosticCode::UnknownOperator},
        {"qvar q : 2; qvar q : 2; skip", DiagnosticCode::DuplicateVariable},
        {"use \"no_such_file.json\"; skip", DiagnosticCode::UnreadableFile},
        {"qvar q : 2; measure x <- M0[q] { 0: skip; 1: skip }; measure x <- M0[q] { 0: skip; 1: skip }",
         DiagnosticCode::ClassicalVariableReuse},
        {"qvar q : 2; measure x <- M0[q] { 0: skip; 1: measure x <- M0[q] { 0: skip; 1: skip } }",
         DiagnosticCode::MeasureVariableInBranch},
        {"qvar q : 2; measurement P = {\"outcomes\": [[0, {\"rows\":2,\"cols\":2,\"entries\":[[1,0],[0,0],[0,0],[0,0]]}]]};\n"
         "measure x <- P[q] { 0: skip }",
         DiagnosticCode::IncompleteMeasurement},
        {"qvar q, c : 2; guard c { |0> -> skip }", DiagnosticCode::BranchMismatch},
        {"qvar q, c : 2; guard c { |0> -> X[c]; |1> -> skip }", DiagnosticCode::GuardVariableInBranch},
        {"qvar q, c : 2; matrix B = {\"rows\":2,\"cols\":2,\"entries\":[[1,0],[1,0],[0,0],[1,0]]};\n"
         "guard c basis B { |0> -> X[q]; |1> -> skip }",
         DiagnosticCode::NonOrthonormalBasis},
        {"qvar q : 2; matrix A = {\"rows\":2,\"cols\":2,\"entries\":[[1,0],[1,0],[0,0],[1,0]]}; A[q]",
         DiagnosticCode::NonUnitary},
        {"qvar q : 3; matrix A = {\"rows\":2,\"cols\":2,\"entries\":[[0,0],[1,0],[1,0],[0,0]]}; A[q]",
         DiagnosticCode::DimensionMismatch},
        {"qvar q : 2; matrix R = {\"rows\":2,\"cols\":2,\"entries\":[[1,0],[0,0],[0,0],[1,0]]};\n"
         "begin local q := R; X[q] end",
         DiagnosticCode::InvalidInitialState},
        {"qvar q : 2; pchoice { skip @ 0.5; X[q] @ 0.6 }", DiagnosticCode::InvalidProbabilities},
        {"qvar q, r : 2; begin local r := |0>; skip end", DiagnosticCode::LocalNotInBody}};
    return all;
}

}  // namespace corpus
