#pragma once

// SDPA sparse format (.dat-s), single-cone reading.
//
// Mapping into the standard-form primal: F_0 -> C, F_i -> A_i, c_i -> b_i,
// without sign changes. Multi-block inputs are flattened block-diagonally;
// negative block sizes denote diagonal blocks.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ippmm/problem.hpp"

namespace ippmm {

namespace detail {

inline std::vector<std::string> sdpa_tokens(std::string line) {
  for (char& c : line)
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',') c = ' ';
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

inline bool parse_int(std::string_view tok, long long& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool parse_real(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next non-blank line, or false at end of input.
  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  int lineno() const noexcept { return lineno_; }

 private:
  std::istream& is_;
  int lineno_ = 0;
};

inline bool is_comment(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t");
  return pos != std::string::npos && (line[pos] == '"' || line[pos] == '*');
}

}  // namespace detail

inline SdpProblem parse_sdpa(std::istream& is) {
  using detail::parse_int;
  using detail::parse_real;
  detail::LineReader reader(is);
  std::string line;

  do {
    if (!reader.next(line)) throw SyntaxError(reader.lineno(), "empty input");
  } while (detail::is_comment(line));

  auto first_int = [&](const char* what) {
    const auto toks = detail::sdpa_tokens(line);
    long long v = 0;
    // Header counts may carry trailing annotations such as "3 =mdim".
    if (toks.empty()) throw SyntaxError(reader.lineno(), std::string("expected integer ") + what);
    const std::string_view tok = toks.front();
    const auto eq = tok.find('=');
    if (!parse_int(tok.substr(0, eq), v))
      throw SyntaxError(reader.lineno(), std::string("expected integer ") + what);
    return v;
  };

  const long long m = first_int("m");
  if (m < 1) throw SyntaxError(reader.lineno(), "m must be >= 1");

  if (!reader.next(line)) throw SyntaxError(0, "missing block count");
  const long long nblocks = first_int("nblocks");
  if (nblocks < 1) throw SyntaxError(reader.lineno(), "block count must be >= 1");

  std::vector<long long> block_sizes;
  while (static_cast<long long>(block_sizes.size()) < nblocks) {
    if (!reader.next(line)) throw SyntaxError(0, "missing block sizes");
    for (const auto& tok : detail::sdpa_tokens(line)) {
      long long v = 0;
      if (!parse_int(tok, v) || v == 0)
        throw SyntaxError(reader.lineno(), "bad block size '" + tok + "'");
      block_sizes.push_back(v);
    }
  }
  if (static_cast<long long>(block_sizes.size()) != nblocks)
    throw SyntaxError(reader.lineno(), "block size count does not match nblocks");

  std::vector<double> b;
  while (static_cast<long long>(b.size()) < m) {
    if (!reader.next(line)) throw SyntaxError(0, "missing right-hand-side vector");
    for (const auto& tok : detail::sdpa_tokens(line)) {
      double v = 0.0;
      if (!parse_real(tok, v)) throw SyntaxError(reader.lineno(), "bad real '" + tok + "'");
      b.push_back(v);
    }
  }
  if (static_cast<long long>(b.size()) != m)
    throw SyntaxError(reader.lineno(), "right-hand-side vector has wrong length");

  std::vector<long long> offsets;
  long long n = 0;
  for (long long s : block_sizes) {
    offsets.push_back(n);
    n += std::llabs(s);
  }

  std::vector<Matrix> mats(static_cast<std::size_t>(m + 1), Matrix::Zero(n, n));
  std::set<std::tuple<long long, long long, long long, long long>> seen;

  while (reader.next(line)) {
    const int ln = reader.lineno();
    const auto toks = detail::sdpa_tokens(line);
    if (toks.size() != 5) throw SyntaxError(ln, "entry line needs 5 fields");
    long long k = 0, blk = 0, i = 0, j = 0;
    double value = 0.0;
    if (!parse_int(toks[0], k) || !parse_int(toks[1], blk) || !parse_int(toks[2], i) ||
        !parse_int(toks[3], j))
      throw SyntaxError(ln, "non-integer index");
    if (!parse_real(toks[4], value)) throw SyntaxError(ln, "bad real '" + toks[4] + "'");
    if (i > j) throw SyntaxError(ln, "lower-triangle entry");
    if (k < 0 || k > m)
      throw Error(Errc::IndexOutOfRange, "line " + std::to_string(ln) + ": matrix index " +
                                             std::to_string(k));
    if (blk < 1 || blk > nblocks)
      throw Error(Errc::IndexOutOfRange, "line " + std::to_string(ln) + ": block index " +
                                             std::to_string(blk));
    const long long size = block_sizes[static_cast<std::size_t>(blk - 1)];
    if (i < 1 || j > std::llabs(size))
      throw Error(Errc::IndexOutOfRange, "line " + std::to_string(ln) + ": entry (" +
                                             std::to_string(i) + "," + std::to_string(j) +
                                             ") outside block");
    if (size < 0 && i != j) throw SyntaxError(ln, "off-diagonal entry in diagonal block");
    if (!seen.emplace(k, blk, i, j).second)
      throw Error(Errc::DuplicateEntry, "line " + std::to_string(ln) + ": entry repeated");
    const long long off = offsets[static_cast<std::size_t>(blk - 1)];
    Matrix& target = mats[static_cast<std::size_t>(k)];
    target(off + i - 1, off + j - 1) = value;
    target(off + j - 1, off + i - 1) = value;
  }

  std::vector<SymMatrix> constraints;
  constraints.reserve(static_cast<std::size_t>(m));
  for (long long k = 1; k <= m; ++k) constraints.emplace_back(std::move(mats[static_cast<std::size_t>(k)]));
  return SdpProblem(std::move(constraints), Eigen::Map<const Vector>(b.data(), m),
                    SymMatrix(std::move(mats[0])));
}

inline SdpProblem parse_sdpa(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_sdpa(is);
}

inline SdpProblem read_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return parse_sdpa(in);
}

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Single-block output with 17 significant digits; zero entries are omitted.
inline void write_sdpa(const SdpProblem& p, std::ostream& os) {
  os << p.m() << "\n1\n" << p.n() << "\n";
  for (int i = 0; i < p.m(); ++i) os << (i ? " " : "") << detail::format_real(p.rhs()(i));
  os << "\n";
  auto emit = [&](int k, const SymMatrix& a) {
    for (int j = 0; j < a.dim(); ++j)
      for (int i = 0; i <= j; ++i)
        if (a(i, j) != 0.0)
          os << k << " 1 " << i + 1 << " " << j + 1 << " " << detail::format_real(a(i, j)) << "\n";
  };
  emit(0, p.cost());
  for (int k = 0; k < p.m(); ++k) emit(k + 1, p.constraint(k));
}

inline std::string write_sdpa(const SdpProblem& p) {
  std::ostringstream os;
  write_sdpa(p, os);
  return os.str();
}

inline void write_sdpa_file(const SdpProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  write_sdpa(p, out);
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

}  // namespace ippmm
