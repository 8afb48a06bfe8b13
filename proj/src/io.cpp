#include "permrank/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace permrank {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_token(std::string_view tok, std::size_t line) {
  tok = trim(tok);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw IoError("matrix CSV line " + std::to_string(line) + ": bad token '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

DenseMatrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    while (true) {
      const auto comma = line.find(',');
      row.push_back(parse_token(line.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError("matrix CSV line " + std::to_string(line_no) + ": ragged row (" +
                    std::to_string(row.size()) + " entries, expected " +
                    std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("matrix CSV: no rows");
  DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  require_finite(m, "matrix CSV");
  return m;
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(read_file(path)); }

std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("format_number: conversion failed");
  return std::string(buf, ptr);
}

std::string format_matrix_csv(const DenseMatrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  write_file_atomic(path, format_matrix_csv(m));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move temporary file into " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json decomposition_to_json(const PermRankDecomposition& dec) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : dec.components()) {
    comps.push_back({{"matrix_csv_inline", format_matrix_csv(c.matrix().matrix())},
                     {"row_perm", c.perms().row_perm.mapping()},
                     {"col_perm", c.perms().col_perm.mapping()}});
  }
  return {{"shape", {dec.rows(), dec.cols()}}, {"components", std::move(comps)}};
}

PermRankDecomposition decomposition_from_json(const nlohmann::json& j) {
  try {
    const auto shape = j.at("shape").get<std::vector<Index>>();
    if (shape.size() != 2) throw IoError("decomposition JSON: shape must have two entries");
    std::vector<BimonotoneComponent> comps;
    for (const auto& c : j.at("components")) {
      DenseMatrix m = parse_matrix_csv(c.at("matrix_csv_inline").get<std::string>());
      PermutationPair p{Permutation(c.at("row_perm").get<std::vector<std::size_t>>()),
                        Permutation(c.at("col_perm").get<std::vector<std::size_t>>())};
      comps.emplace_back(UnitIntervalMatrix(std::move(m)), std::move(p));
    }
    return PermRankDecomposition(shape[0], shape[1], std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("decomposition JSON: ") + e.what());
  }
}

}  // namespace permrank
