#pragma once

// JSON views of results. Exact rationals are emitted as "p/q" strings,
// complex numbers as {"re", "im"}.

#include <xeig/matrix_sigma.hpp>
#include <xeig/shift_sigma.hpp>
#include <xeig/volterra.hpp>
#include <xeig/weights.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <string>

namespace xeig::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "xeig-report-v1";

// JSON has no infinities; they become null.
inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json complex(std::complex<double> z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

inline Json scalar(const ComplexScalar& z) {
  Json j = complex(z.value());
  if (z.exact()) j["exact"] = z.str();
  return j;
}

inline Json exact_scalar(const ExactScalar& s) {
  return Json{{"value", s.str()}, {"approx", number(s.to_double())}, {"exact", s.exact()}};
}

inline Json matrix(const DenseOperator& m) {
  Json entries = Json::array();
  for (Index i = 0; i < m.dim(); ++i)
    for (Index j = 0; j < m.dim(); ++j) {
      if (m.exact())
        entries.push_back(to_string(m.rational()(i, j)));
      else
        entries.push_back(Json::array({number(m.numeric()(i, j).real()), number(m.numeric()(i, j).imag())}));
    }
  return Json{{"dim", m.dim()}, {"exact", m.exact()}, {"entries", std::move(entries)}};
}

inline Json matrix(const ComplexMatrix& m) { return matrix(DenseOperator(m)); }

inline Json verdict(const SigmaVerdict& v) {
  Json j{{"status", to_string(v.status)},
         {"witnessK", v.witness_k ? Json(*v.witness_k) : Json(nullptr)},
         {"mode", to_string(v.mode)},
         {"detail", v.detail}};
  if (v.witness_beyond_kmax) j["witnessBeyondKmax"] = true;
  return j;
}

inline Json sigma_set(const MatrixSigmaSet& s) {
  Json j{{"kind", to_string(s.kind)}, {"tolerance", s.tolerance}};
  Json values = Json::array();
  for (auto z : s.values) values.push_back(complex(z));
  j["values"] = std::move(values);
  if (s.exact_values) {
    Json exact = Json::array();
    for (const auto& q : *s.exact_values) exact.push_back(to_string(q));
    j["exactValues"] = std::move(exact);
  }
  return j;
}

}  // namespace xeig::report
