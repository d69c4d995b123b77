#ifndef TCOMP_IO_HPP
#define TCOMP_IO_HPP

// Text formats. All numbers are written with 17 significant digits, which
// round-trips IEEE doubles exactly.
//
//   tensor:         line 1 "d1 d2 d3", then d1*d2*d3 whitespace-separated
//                   values in canonical order (last index fastest)
//   sample set:     line 1 "d1 d2 d3 n", then n lines "a b c" (1-based)
//   decomposition:  line 1 "d1 d2 d3 r", a line of r weights, then r lines
//                   of d1 values (u_i), r of d2 values (v_i), r of d3 (w_i)
//
// Parse errors name the stream and the 1-based line.

#include "tcomp/norms.hpp"
#include "tcomp/sampling.hpp"
#include "tcomp/tensor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcomp {

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

// Whitespace tokenizer that remembers the line each token came from.
class TokenReader {
 public:
  TokenReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  bool next(std::string& token) {
    while (pos_ >= line_.size()) {
      if (!std::getline(in_, line_)) return false;
      ++line_no_;
      pos_ = 0;
      skip_space();
    }
    const std::size_t start = pos_;
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
    token = line_.substr(start, pos_ - start);
    skip_space();
    return true;
  }

  bool line_exhausted() const { return pos_ >= line_.size(); }
  int line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw std::runtime_error(name_ + ":" + std::to_string(std::max(line_no_, 1)) + ": " + message);
  }

  double read_double(const char* what) {
    std::string tok;
    if (!next(tok)) fail(std::string("missing ") + what);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) fail("bad " + std::string(what) + " '" + tok + "'");
    if (!std::isfinite(v)) fail(std::string(what) + " must be finite, got '" + tok + "'");
    return v;
  }

  std::int64_t read_int(const char* what) {
    std::string tok;
    if (!next(tok)) fail(std::string("missing ") + what);
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end != tok.c_str() + tok.size()) fail("bad " + std::string(what) + " '" + tok + "'");
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }

  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

inline void require_end(TokenReader& reader) {
  std::string extra;
  if (reader.next(extra)) reader.fail("unexpected trailing token '" + extra + "'");
}

}  // namespace detail

inline void write_tensor(std::ostream& out, const Tensor3& x) {
  out << x.d1() << ' ' << x.d2() << ' ' << x.d3() << '\n';
  for (std::int64_t i = 0; i < x.size(); ++i) out << format_value(x.values()[i]) << '\n';
}

inline Tensor3 read_tensor(std::istream& in, const std::string& name = "tensor") {
  detail::TokenReader reader(in, name);
  const std::int64_t d1 = reader.read_int("d1");
  const std::int64_t d2 = reader.read_int("d2");
  const std::int64_t d3 = reader.read_int("d3");
  if (d1 < 1 || d2 < 1 || d3 < 1) reader.fail("dimensions must be positive");
  if (!reader.line_exhausted()) reader.fail("header line must hold exactly 'd1 d2 d3'");
  Tensor3 x(static_cast<int>(d1), static_cast<int>(d2), static_cast<int>(d3));
  for (std::int64_t i = 0; i < x.size(); ++i) x.values()[i] = reader.read_double("tensor value");
  detail::require_end(reader);
  return x;
}

inline void write_sample_set(std::ostream& out, const SampleSet& omega) {
  const auto& dims = omega.dims();
  out << dims[0] << ' ' << dims[1] << ' ' << dims[2] << ' ' << omega.n() << '\n';
  for (std::int64_t i = 0; i < omega.n(); ++i) {
    const IndexTriple t = omega.triple(i);
    out << t.a << ' ' << t.b << ' ' << t.c << '\n';
  }
}

inline SampleSet read_sample_set(std::istream& in, const std::string& name = "samples") {
  detail::TokenReader reader(in, name);
  std::array<int, 3> dims{};
  for (int j = 0; j < 3; ++j) {
    const std::int64_t d = reader.read_int("dimension");
    if (d < 1) reader.fail("dimensions must be positive");
    dims[static_cast<std::size_t>(j)] = static_cast<int>(d);
  }
  const std::int64_t n = reader.read_int("sample count");
  if (n < 0) reader.fail("sample count must be nonnegative");
  std::vector<std::int64_t> linear;
  linear.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t a = reader.read_int("index a");
    const std::int64_t b = reader.read_int("index b");
    const std::int64_t c = reader.read_int("index c");
    if (a < 1 || a > dims[0] || b < 1 || b > dims[1] || c < 1 || c > dims[2])
      reader.fail("index triple outside the grid");
    linear.push_back(((a - 1) * dims[1] + (b - 1)) * dims[2] + (c - 1));
  }
  detail::require_end(reader);
  std::sort(linear.begin(), linear.end());
  if (std::adjacent_find(linear.begin(), linear.end()) != linear.end())
    throw std::runtime_error(name + ": duplicate sample triple");
  return SampleSet(dims, std::move(linear));
}

inline void write_decomposition(std::ostream& out, const OrthoDecomposition& dec) {
  dec.validate();
  out << dec.u.rows() << ' ' << dec.v.rows() << ' ' << dec.w.rows() << ' ' << dec.r() << '\n';
  for (int i = 0; i < dec.r(); ++i) out << (i ? " " : "") << format_value(dec.lambda[i]);
  out << '\n';
  for (const auto* f : {&dec.u, &dec.v, &dec.w})
    for (int i = 0; i < dec.r(); ++i) {
      for (Eigen::Index row = 0; row < f->rows(); ++row)
        out << (row ? " " : "") << format_value((*f)(row, i));
      out << '\n';
    }
}

inline OrthoDecomposition read_decomposition(std::istream& in, const std::string& name = "decomposition") {
  detail::TokenReader reader(in, name);
  std::array<std::int64_t, 3> dims{};
  for (auto& d : dims) {
    d = reader.read_int("dimension");
    if (d < 1) reader.fail("dimensions must be positive");
  }
  const std::int64_t r = reader.read_int("term count");
  if (r < 1) reader.fail("term count must be positive");
  OrthoDecomposition dec;
  dec.lambda.resize(r);
  for (std::int64_t i = 0; i < r; ++i) dec.lambda[i] = reader.read_double("weight");
  Eigen::MatrixXd* factors[3] = {&dec.u, &dec.v, &dec.w};
  for (int j = 0; j < 3; ++j) {
    factors[j]->resize(dims[static_cast<std::size_t>(j)], r);
    for (std::int64_t i = 0; i < r; ++i)
      for (std::int64_t row = 0; row < dims[static_cast<std::size_t>(j)]; ++row)
        (*factors[j])(row, i) = reader.read_double("factor value");
  }
  detail::require_end(reader);
  dec.validate();
  return dec;
}

namespace detail {

template <typename T, typename Reader>
T load_from_file(const std::string& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return reader(in, path);
}

template <typename Writer>
void save_to_file(const std::string& path, Writer writer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  writer(out);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace detail

inline Tensor3 load_tensor(const std::string& path) {
  return detail::load_from_file<Tensor3>(path, [](std::istream& in, const std::string& name) {
    return read_tensor(in, name);
  });
}

inline void save_tensor(const std::string& path, const Tensor3& x) {
  detail::save_to_file(path, [&](std::ostream& out) { write_tensor(out, x); });
}

inline SampleSet load_sample_set(const std::string& path) {
  return detail::load_from_file<SampleSet>(path, [](std::istream& in, const std::string& name) {
    return read_sample_set(in, name);
  });
}

inline void save_sample_set(const std::string& path, const SampleSet& omega) {
  detail::save_to_file(path, [&](std::ostream& out) { write_sample_set(out, omega); });
}

inline OrthoDecomposition load_decomposition(const std::string& path) {
  return detail::load_from_file<OrthoDecomposition>(path, [](std::istream& in, const std::string& name) {
    return read_decomposition(in, name);
  });
}

inline void save_decomposition(const std::string& path, const OrthoDecomposition& dec) {
  detail::save_to_file(path, [&](std::ostream& out) { write_decomposition(out, dec); });
}

}  // namespace tcomp

#endif  // TCOMP_IO_HPP
