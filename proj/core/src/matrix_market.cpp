#include "epss/problems/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epss/errors.hpp"

namespace epss {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::size_t parse_index(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

double parse_value(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("invalid value '" + std::string(tok) + "'", line);
  }
  return v;
}

struct Entry {
  std::size_t row, col;
  double value;
  std::size_t line;
};

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  const auto head = tokens(line);
  if (head.size() != 5 || head[0] != "%%MatrixMarket") {
    throw ParseError("expected '%%MatrixMarket matrix coordinate <field> <symmetry>'", lineno);
  }
  if (lower(head[1]) != "matrix") throw ParseError("unsupported object '" + std::string(head[1]) + "'", lineno);
  if (lower(head[2]) != "coordinate") {
    throw ParseError("unsupported format '" + std::string(head[2]) + "'", lineno);
  }
  const std::string field = lower(head[3]);
  if (field != "real" && field != "integer" && field != "double") {
    throw ParseError("unsupported field '" + std::string(head[3]) + "'", lineno);
  }
  const std::string symmetry = lower(head[4]);
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError("unsupported symmetry '" + std::string(head[4]) + "'", lineno);
  }
  const bool symmetric = symmetry == "symmetric";

  std::size_t rows = 0, cols = 0, count = 0;
  bool have_size = false;
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '%') continue;
    if (blank(line)) continue;
    const auto tok = tokens(line);
    if (!have_size) {
      if (tok.size() != 3) throw ParseError("size line needs 'rows cols nnz'", lineno);
      rows = parse_index(tok[0], lineno, "row count");
      cols = parse_index(tok[1], lineno, "column count");
      count = parse_index(tok[2], lineno, "entry count");
      if (symmetric && rows != cols) throw ParseError("symmetric matrix must be square", lineno);
      const std::size_t capacity = rows * cols;
      if (rows != 0 && capacity / rows != cols) throw ParseError("matrix size overflows", lineno);
      if (count > capacity) throw ParseError("more entries than matrix positions", lineno);
      entries.reserve(count);
      have_size = true;
      continue;
    }
    if (entries.size() == count) throw ParseError("more entries than declared", lineno);
    if (tok.size() != 3) throw ParseError("entry needs 'row col value'", lineno);
    const std::size_t i = parse_index(tok[0], lineno, "row index");
    const std::size_t j = parse_index(tok[1], lineno, "column index");
    if (i < 1 || i > rows) throw ParseError("row index " + std::to_string(i) + " out of range", lineno);
    if (j < 1 || j > cols) throw ParseError("column index " + std::to_string(j) + " out of range", lineno);
    if (symmetric && j > i) throw ParseError("symmetric file stores an upper-triangle entry", lineno);
    entries.push_back({i - 1, j - 1, parse_value(tok[2], lineno), lineno});
  }
  if (!have_size) throw ParseError("missing size line", lineno + 1);
  if (entries.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " entries, found " +
                         std::to_string(entries.size()),
                     lineno + 1);
  }

  std::vector<std::size_t> order(entries.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(entries[a].row, entries[a].col) < std::tie(entries[b].row, entries[b].col);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Entry& prev = entries[order[k - 1]];
    const Entry& cur = entries[order[k]];
    if (prev.row == cur.row && prev.col == cur.col) {
      throw ParseError("duplicate entry (" + std::to_string(cur.row + 1) + ", " +
                           std::to_string(cur.col + 1) + ")",
                       std::max(prev.line, cur.line));
    }
  }

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries.size() : entries.size());
  for (const Entry& e : entries) {
    triplets.push_back({e.row, e.col, e.value});
    if (symmetric && e.row != e.col) triplets.push_back({e.col, e.row, e.value});
  }
  return SparseMatrix::from_triplets(rows, cols, triplets);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  return read_matrix_market(in);
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
      out << i + 1 << ' ' << cols[k] + 1 << ' ' << buf << '\n';
    }
  }
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_matrix_market(a, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_system(const SaddleSystem& sys, const std::filesystem::path& dir,
                  const std::string& description) {
  std::filesystem::create_directories(dir);
  write_matrix_market(sys.a(), dir / "A.mtx");
  write_matrix_market(sys.b(), dir / "B.mtx");
  write_matrix_market(sys.c(), dir / "C.mtx");
  const nlohmann::ordered_json manifest = {
      {"format", "epss-saddle-system"},
      {"version", 1},
      {"n", sys.n()},
      {"m", sys.m()},
      {"offsets", {{"x", 0}, {"y", sys.n()}}},
      {"files", {{"A", "A.mtx"}, {"B", "B.mtx"}, {"C", "C.mtx"}}},
      {"description", description},
  };
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + (dir / "manifest.json").string());
}

SaddleSystem read_system(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ParseError("cannot open " + manifest.string(), 0);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0);
  }
  try {
    const auto dir = manifest.parent_path();
    const auto& files = j.at("files");
    SparseMatrix a = read_matrix_market(dir / files.at("A").get<std::string>());
    SparseMatrix b = read_matrix_market(dir / files.at("B").get<std::string>());
    SparseMatrix c = read_matrix_market(dir / files.at("C").get<std::string>());
    if (a.rows() != j.at("n").get<std::size_t>() || c.rows() != j.at("m").get<std::size_t>()) {
      throw ParseError("manifest sizes do not match the matrix files", 0);
    }
    return SaddleSystem(std::move(a), std::move(b), std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0);
  }
}

}  // namespace epss
