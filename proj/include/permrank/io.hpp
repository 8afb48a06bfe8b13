#pragma once

#include "permrank/decomposition.hpp"
#include "permrank/matrix.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace permrank {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Headerless CSV, one row per line. Ragged rows and non-numeric tokens are rejected.
DenseMatrix parse_matrix_csv(std::string_view text);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

/// Shortest round-tripping decimal for each entry.
std::string format_matrix_csv(const DenseMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

std::string format_number(double v);

/// Writes via a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// {shape: [n, d], components: [{matrix_csv_inline, row_perm, col_perm}]}
nlohmann::json decomposition_to_json(const PermRankDecomposition& dec);
PermRankDecomposition decomposition_from_json(const nlohmann::json& j);

}  // namespace permrank
