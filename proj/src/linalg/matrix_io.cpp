#include "sketchlab/matrix_io.hpp"

#include "sketchlab/linalg.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace sketchlab::io {

namespace {

static_assert(std::endian::native == std::endian::little, "SKLB I/O assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void write_sklb(std::ostream& os, const DenseMatrix& M) {
  if (M.rows() > std::numeric_limits<std::uint32_t>::max() ||
      M.cols() > std::numeric_limits<std::uint32_t>::max())
    throw InvalidArgument("write_sklb: matrix too large");
  os.write("SKLB", 4);
  put_u32(os, static_cast<std::uint32_t>(M.rows()));
  put_u32(os, static_cast<std::uint32_t>(M.cols()));
  const std::uint8_t field = M.is_real() ? 0 : 1;
  os.put(static_cast<char>(field));
  if (M.is_real()) {
    const RMat& m = M.real();
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) put_f64(os, m(i, j));
  } else {
    const CMat& m = M.complex();
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) {
        put_f64(os, m(i, j).real());
        put_f64(os, m(i, j).imag());
      }
  }
  if (!os) throw std::runtime_error("write_sklb: stream failure");
}

DenseMatrix read_sklb(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SKLB", 4) != 0) throw InvalidInput("read_sklb: bad magic");
  const std::uint32_t rows = get_u32(is);
  const std::uint32_t cols = get_u32(is);
  const int field = is.get();
  if (!is || (field != 0 && field != 1)) throw InvalidInput("read_sklb: bad header");
  DenseMatrix out;
  if (field == 0) {
    RMat m(rows, cols);
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = get_f64(is);
    out = std::move(m);
  } else {
    CMat m(rows, cols);
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        m(i, j) = cd(re, im);
      }
    out = std::move(m);
  }
  if (!is) throw InvalidInput("read_sklb: truncated payload");
  return out;
}

void write_sklb_file(const std::string& path, const DenseMatrix& M) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_sklb(os, M);
}

DenseMatrix read_sklb_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_sklb(is);
}

void write_tsv(std::ostream& os, const DenseMatrix& M) {
  os << std::setprecision(17);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) os << '\t';
      const cd v = M(i, j);
      if (M.is_real()) {
        os << v.real();
      } else {
        os << v.real() << (std::signbit(v.imag()) ? '-' : '+') << std::abs(v.imag()) << 'i';
      }
    }
    os << '\n';
  }
}

namespace {

bool parse_entry(const std::string& tok, cd& out, bool& is_complex) {
  if (tok.empty()) return false;
  if (tok.back() != 'i') {
    std::size_t pos = 0;
    const double re = std::stod(tok, &pos);
    if (pos != tok.size()) return false;
    out = cd(re, 0.0);
    return true;
  }
  // re(+|-)imi: split at the last sign that is not part of an exponent.
  const std::string body = tok.substr(0, tok.size() - 1);
  for (std::size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      std::size_t p1 = 0;
      std::size_t p2 = 0;
      const std::string a = body.substr(0, k);
      const std::string b = body.substr(k);
      const double re = std::stod(a, &p1);
      const double im = std::stod(b, &p2);
      if (p1 != a.size() || p2 != b.size()) return false;
      out = cd(re, im);
      is_complex = true;
      return true;
    }
  }
  return false;
}

}  // namespace

DenseMatrix read_tsv(std::istream& is) {
  std::vector<std::vector<cd>> rows;
  bool any_complex = false;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<cd> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, '\t')) {
      while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) tok.pop_back();
      while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
      if (tok.empty()) continue;
      cd v;
      bool ok = false;
      try {
        ok = parse_entry(tok, v, any_complex);
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) throw InvalidInput("read_tsv: cannot parse entry '" + tok + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("read_tsv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty()) throw InvalidInput("read_tsv: no data");
  const auto m = static_cast<Index>(rows.size());
  const auto n = static_cast<Index>(rows.front().size());
  if (!any_complex) {
    RMat out(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) out(i, j) = rows[i][j].real();
    return out;
  }
  CMat out(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = rows[i][j];
  return out;
}

DenseMatrix read_tsv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_tsv(is);
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, 4);
  is.clear();
  is.seekg(0);
  if (std::memcmp(magic, "SKLB", 4) == 0) return read_sklb(is);
  return read_tsv(is);
}

}  // namespace sketchlab::io
