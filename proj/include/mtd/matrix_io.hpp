// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "mtd/core.hpp"

namespace mtd::io {

/// Plain-text matrix format: first line "rows cols", then the entries in
/// row-major order separated by whitespace.
Matrix read_matrix(std::istream& in);
Matrix read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

}  // namespace mtd::io
