#pragma once

#include "eamg/dense.hpp"
#include "eamg/sparse_matrix.hpp"

#include <string>

namespace eamg {

/// Reads a `matrix coordinate real {general|symmetric}` file. Symmetric
/// files are expanded to full storage.
SparseMatrix mm_read(const std::string& path);

/// Writes `matrix coordinate real general` with 17 significant digits.
void mm_write(const std::string& path, const SparseMatrix& A);

/// Reads a dense `matrix array real general` file (column-major), or a
/// coordinate file that is densified.
DenseMatrix mm_read_dense(const std::string& path);
void mm_write_dense(const std::string& path, const DenseMatrix& V);

}  // namespace eamg
