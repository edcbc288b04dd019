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

#include "qgcl/builtins.hpp"
#include "qgcl/classical_state.hpp"
#include "qgcl/equivalence.hpp"
#include "qgcl/error.hpp"
#include "qgcl/matrix_io.hpp"
#include "qgcl/ovf.hpp"
#include "qgcl/program.hpp"
#include "qgcl/random.hpp"
#include "qgcl/reproduce.hpp"
#include "qgcl/semantics.hpp"
#include "qgcl/syntax.hpp"
#include "qgcl/tensor.hpp"
#include "qgcl/well_formed.hpp"
#include "qgcl/wp.hpp"
