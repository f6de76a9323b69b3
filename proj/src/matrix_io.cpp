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

#include "mtd/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>

namespace mtd::io {

Matrix read_matrix(std::istream& in) {
  long rows = -1;
  long cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    fail(ErrorKind::Config, "matrix file: expected header \"rows cols\"");
  }
  Matrix m(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) {
        fail(ErrorKind::Config, "matrix file: expected " + std::to_string(rows * cols) +
                                    " entries, got " + std::to_string(i * cols + j));
      }
    }
  }
  return m;
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open matrix file " + path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Config, "cannot write matrix file " + path);
  write_matrix(out, m);
}

}  // namespace mtd::io
