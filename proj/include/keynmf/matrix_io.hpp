#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <filesystem>
#include <string>
#include <vector>

namespace keynmf {

using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// "KNMF" container: magic, version u8 = 1, flag u8 (0 dense / 1 sparse).
// Dense: u32 rows, u32 cols, rows*cols little-endian f64 row-major.
// Sparse: u32 rows, u32 cols, u64 nnz, nnz (u32 row, u32 col, f64) sorted
// by (row, col).

void write_dense(const std::filesystem::path& path, const DenseMatrix& m);
void write_sparse(const std::filesystem::path& path, const SparseMatrix& m);

struct LoadedMatrix {
    bool sparse = false;
    DenseMatrix dense;
    SparseMatrix sp;

    DenseMatrix to_dense() const { return sparse ? DenseMatrix(sp) : dense; }
};

LoadedMatrix read_matrix(const std::filesystem::path& path);
DenseMatrix read_dense(const std::filesystem::path& path);
SparseMatrix read_sparse(const std::filesystem::path& path);

/// Id file: newline-delimited strings, row i names row i of the companion
/// matrix file.
void write_ids(const std::filesystem::path& path, const std::vector<std::string>& ids);
std::vector<std::string> read_ids(const std::filesystem::path& path);

}  // namespace keynmf
