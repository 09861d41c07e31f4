#pragma once

#include "sketchlab/dense.hpp"

#include <iosfwd>
#include <string>

namespace sketchlab::io {

// Binary layout, little-endian:
//   "SKLB" | u32 rows | u32 cols | u8 field (0 real, 1 complex) | f64 entries
// Entries are row-major; complex entries are interleaved (re, im).

void write_sklb(std::ostream& os, const DenseMatrix& M);
DenseMatrix read_sklb(std::istream& is);
void write_sklb_file(const std::string& path, const DenseMatrix& M);
DenseMatrix read_sklb_file(const std::string& path);

// Tab-separated text, one row per line. Real entries are plain numbers;
// complex entries are written "re+imi" / "re-imi". Lines starting with '#'
// and blank lines are skipped.
void write_tsv(std::ostream& os, const DenseMatrix& M);
DenseMatrix read_tsv(std::istream& is);
DenseMatrix read_tsv_file(const std::string& path);

/// Dispatches on the file's leading bytes.
DenseMatrix read_matrix_file(const std::string& path);

}  // namespace sketchlab::io
