// Copyright 2026 The sgwl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON spec files, base64 matrix blobs and report serialization.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sgwl/decomp.hpp"
#include "sgwl/gksl.hpp"
#include "sgwl/matcore.hpp"
#include "sgwl/posmap.hpp"
#include "sgwl/scenarios.hpp"

namespace sgwl {

using Json = nlohmann::ordered_json;

/// Malformed input; `path` locates the offending field (e.g. "/C/1/2").
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, const std::string& message, const std::string& source = "")
      : std::runtime_error((source.empty() ? "" : source + ": ") + (path.empty() ? "" : path + ": ") + message),
        path_(path),
        message_(message) {}
  const std::string& path() const noexcept { return path_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string path_;
  std::string message_;
};

struct SpecFile {
  KossakowskiSpec spec;
  std::string label;
};

namespace detail {

inline const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "/" + key, "missing field");
  return *it;
}

inline double number_at(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError(path, "non-finite number");
  return x;
}

}  // namespace detail

/// Complex matrix encoded as rows of [re, im] pairs.
inline CMatrix parse_complex_matrix(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ParseError(path, "expected a non-empty array of rows");
  const Eigen::Index rows = Eigen::Index(v.size());
  Eigen::Index cols = -1;
  CMatrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = v[std::size_t(i)];
    const std::string rp = path + "/" + std::to_string(i);
    if (!row.is_array()) throw ParseError(rp, "expected an array of [re, im] entries");
    if (cols < 0) {
      cols = Eigen::Index(row.size());
      if (cols == 0) throw ParseError(rp, "empty row");
      detail::require_size(rows, cols, "parse_complex_matrix");
      m.resize(rows, cols);
    } else if (Eigen::Index(row.size()) != cols) {
      throw ParseError(rp, "ragged row: expected " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Json& e = row[std::size_t(j)];
      const std::string ep = rp + "/" + std::to_string(j);
      if (!e.is_array() || e.size() != 2) throw ParseError(ep, "expected [re, im]");
      m(i, j) = Complex(detail::number_at(e[0], ep + "/0"), detail::number_at(e[1], ep + "/1"));
    }
  }
  return m;
}

inline Json complex_matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// {"dim", "basis": "pauli" | "gell-mann", "H", "C", optional "label"}.
inline SpecFile parse_spec(const Json& doc) {
  if (!doc.is_object()) throw ParseError("", "spec must be a JSON object");
  const Json& dim_v = detail::field(doc, "dim", "");
  if (!dim_v.is_number_integer()) throw ParseError("/dim", "expected an integer");
  const long long dim = dim_v.get<long long>();
  if (dim < 2 || dim > 64) throw ParseError("/dim", "dimension must be in [2, 64]");
  const int d = int(dim);

  const Json& basis_v = detail::field(doc, "basis", "");
  if (!basis_v.is_string()) throw ParseError("/basis", "expected a string");
  const std::string basis_name = basis_v.get<std::string>();
  HermitianBasis basis;
  if (basis_name == "pauli") {
    if (d != 2) throw ParseError("/basis", "the pauli basis requires dim = 2");
    basis = pauli_basis();
  } else if (basis_name == "gell-mann") {
    basis = gell_mann_basis(d);
  } else {
    throw ParseError("/basis", "unknown basis '" + basis_name + "' (expected pauli or gell-mann)");
  }

  const CMatrix h = parse_complex_matrix(detail::field(doc, "H", ""), "/H");
  if (h.rows() != d || h.cols() != d) throw ParseError("/H", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  const CMatrix c = parse_complex_matrix(detail::field(doc, "C", ""), "/C");
  const int n = d * d - 1;
  if (c.rows() != n || c.cols() != n)
    throw ParseError("/C", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");

  SpecFile out;
  try {
    out.spec = KossakowskiSpec(HermitianMatrix(h), HermitianMatrix(c), std::move(basis));
  } catch (const DomainError& e) {
    throw ParseError(max_abs_entry(h - h.adjoint()) > tol::kHerm ? "/H" : "/C", e.what());
  }
  if (auto it = doc.find("label"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("/label", "expected a string");
    out.label = it->get<std::string>();
  }
  return out;
}

inline SpecFile parse_spec(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

inline SpecFile load_spec(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("", "cannot open " + file);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec(std::string_view(ss.str()));
  } catch (const ParseError& e) {
    throw ParseError(e.path(), e.message(), file);
  }
}

inline Json spec_json(const SpecFile& s) {
  Json j;
  j["dim"] = s.spec.dim;
  j["basis"] = s.spec.dim == 2 ? "pauli" : "gell-mann";
  j["H"] = complex_matrix_json(s.spec.hamiltonian);
  j["C"] = complex_matrix_json(s.spec.kossakowski);
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

// ---- base64 ------------------------------------------------------------------

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = std::uint32_t(bytes[i]) << 16 | std::uint32_t(bytes[i + 1]) << 8 | bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63u]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = std::uint32_t(bytes[i]) << 16;
    if (rest == 2) v |= std::uint32_t(bytes[i + 1]) << 8;
    out.push_back(kAlphabet[(v >> 18) & 63u]);
    out.push_back(kAlphabet[(v >> 12) & 63u]);
    out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63u] : '=');
    out.push_back('=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) throw ParseError("", "base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + std::size_t(k)];
      int x = 0;
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
      } else {
        if (pad > 0 || (x = value(c)) < 0) throw ParseError("", "invalid base64 character");
      }
      v = v << 6 | std::uint32_t(x);
    }
    out.push_back(std::uint8_t(v >> 16));
    if (pad < 2) out.push_back(std::uint8_t(v >> 8));
    if (pad < 1) out.push_back(std::uint8_t(v));
  }
  return out;
}

namespace detail {

inline void append_le(std::vector<std::uint8_t>& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  for (int b = 0; b < 8; ++b) out.push_back(std::uint8_t(bits >> (8 * b)));
}

inline double read_le(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= std::uint64_t(p[b]) << (8 * b);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

}  // namespace detail

/// Little-endian float64, interleaved (re, im), row-major.
inline std::string matrix_to_base64(const CMatrix& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(std::size_t(m.size()) * 16);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::append_le(bytes, m(i, j).real());
      detail::append_le(bytes, m(i, j).imag());
    }
  return base64_encode(bytes);
}

inline CMatrix matrix_from_base64(std::string_view text, Eigen::Index rows, Eigen::Index cols) {
  const std::vector<std::uint8_t> bytes = base64_decode(text);
  if (bytes.size() != std::size_t(rows * cols) * 16) throw ParseError("", "base64 blob does not match the matrix shape");
  CMatrix m(rows, cols);
  const std::uint8_t* p = bytes.data();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j, p += 16) m(i, j) = Complex(detail::read_le(p), detail::read_le(p + 8));
  return m;
}

inline Json matrix_blob(const CMatrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["encoding"] = "base64-f64le-complex-rowmajor";
  j["data"] = matrix_to_base64(m);
  return j;
}

// ---- reports -----------------------------------------------------------------

/// Non-finite values become null.
inline Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const ScenarioReport& r) {
  Json j;
  j["name"] = r.name;
  j["status"] = r.passed() ? "pass" : "fail";
  Json params = Json::object();
  for (const auto& [k, v] : r.parameters) params[k] = number_json(v);
  j["parameters"] = std::move(params);
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = number_json(v);
  j["values"] = std::move(values);
  Json checks = Json::array();
  for (const ScenarioCheck& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["topic"] = c.topic;
    e["computed"] = number_json(c.computed);
    e["expected"] = number_json(c.expected);
    e["relation"] = to_string(c.relation);
    e["tolerance"] = c.tolerance;
    e["delta"] = number_json(c.delta);
    e["source"] = c.source;
    e["pass"] = c.pass;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

inline Json to_json(const PositivityVerdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  if (v.choi) j["choi_min_eigenvalue"] = number_json(v.choi->min_eigenvalue);
  if (v.violation) {
    j["violation"] = {{"value", v.violation->value},
                      {"psi", complex_matrix_json(v.violation->psi)},
                      {"phi", complex_matrix_json(v.violation->phi)}};
  }
  if (v.search) {
    j["search"] = {{"best_value", number_json(v.search->best_value)},
                   {"spread", number_json(v.search->spread)},
                   {"starts", v.search->starts},
                   {"evaluations", v.search->evaluations}};
  }
  return j;
}

inline Json to_json(const FeasibilityResult& r) {
  Json j;
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  if (r.certificate) {
    j["residual"] = r.certificate->residual;
    j["J1"] = matrix_blob(r.certificate->j1);
    j["J2"] = matrix_blob(r.certificate->j2);
  }
  if (r.witness) {
    j["pairing"] = r.witness->pairing;
    j["witness"] = matrix_blob(r.witness->state.mat);
    j["witness_trace"] = r.witness->state.mat.mat().trace().real();
    if (!r.witness->weights.empty()) j["weights"] = r.witness->weights;
  }
  if (r.status == FeasibilityStatus::MaxIterations) j["gap"] = number_json(r.gap);
  return j;
}

}  // namespace sgwl
