#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "epss/linalg/sparse_matrix.hpp"
#include "epss/saddle/system.hpp"

namespace epss {

/// Coordinate-format reader for real/integer general or symmetric files.
/// Symmetric files must store the lower triangle and are expanded.
/// Every malformed line raises ParseError carrying its 1-based line number.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes "coordinate real general" with 17 significant digits, so that
/// reading the file back reproduces every value bit for bit.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

/// Writes A.mtx, B.mtx, C.mtx and manifest.json into `dir` (created if
/// needed). `description` is stored verbatim in the manifest.
void write_system(const SaddleSystem& sys, const std::filesystem::path& dir,
                  const std::string& description);

/// Loads a system from a manifest written by write_system.
SaddleSystem read_system(const std::filesystem::path& manifest);

}  // namespace epss
