#pragma once

// Command-line front end. `run` parses arguments, executes one analysis and
// writes a JSON, CSV or plain-text report. Exit codes: 0 success, 1
// computational failure, 2 usage error.

#include <xeig/matrix_sigma.hpp>
#include <xeig/report.hpp>
#include <xeig/shift_sigma.hpp>
#include <xeig/volterra.hpp>
#include <xeig/weights.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace xeig::cli {

using report::Json;

enum class Format { Json, Csv, Human };

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  Json json;
  std::optional<Table> table;
};

/// Usage errors detected after argument parsing.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Parallel evaluation with ordered results

template <typename F>
auto parallel_map(std::size_t count, int workers, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || count < 2) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, count); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Inputs

namespace detail {

inline Rational json_rational(const Json& v, bool& exact, double& approx) {
  if (v.is_number_integer()) {
    exact = true;
    return Rational(mpz_class(v.dump(), 10));
  }
  if (v.is_number_float()) {
    approx = v.get<double>();
    exact = std::isfinite(approx) && approx == std::floor(approx) && std::fabs(approx) < 1e15;
    return exact ? Rational(approx) : Rational(0);
  }
  if (v.is_string()) {
    exact = true;
    return parse_rational(v.get<std::string>());
  }
  throw UsageError("matrix entries must be numbers, \"p/q\" strings or [re, im] pairs");
}

}  // namespace detail

/// Reads {"dim": n, "entries": [...]} with n*n row-major entries. An entry is
/// a number, a rational string such as "3/2", or a pair [re, im]. The matrix
/// is exact when every entry is real and given as an integer or a string.
inline DenseOperator parse_matrix_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("entries"))
    throw UsageError("matrix JSON must be an object with \"dim\" and \"entries\"");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
    throw UsageError("\"dim\" must be a positive integer");
  const auto n = static_cast<Index>(doc["dim"].get<long long>());
  const Json& entries = doc["entries"];
  if (!entries.is_array() || static_cast<Index>(entries.size()) != n * n)
    throw UsageError("\"entries\" must list dim*dim = " + std::to_string(n * n) + " values in row-major order");

  RationalMatrix exact(n, n);
  ComplexMatrix numeric(n, n);
  bool all_exact = true;
  for (Index idx = 0; idx < n * n; ++idx) {
    const Json& e = entries[static_cast<std::size_t>(idx)];
    const Index i = idx / n;
    const Index j = idx % n;
    Json re_part = e;
    Json im_part = 0;
    if (e.is_array()) {
      if (e.size() != 2) throw UsageError("complex entries must be [re, im] pairs");
      re_part = e[0];
      im_part = e[1];
    }
    bool re_exact = false;
    bool im_exact = false;
    double re_approx = 0;
    double im_approx = 0;
    const Rational re = detail::json_rational(re_part, re_exact, re_approx);
    const Rational im = detail::json_rational(im_part, im_exact, im_approx);
    const double re_d = re_exact ? to_double(re) : re_approx;
    const double im_d = im_exact ? to_double(im) : im_approx;
    numeric(i, j) = {re_d, im_d};
    if (re_exact && im_exact && im == 0)
      exact(i, j) = re;
    else
      all_exact = false;
  }
  return all_exact ? DenseOperator(std::move(exact)) : DenseOperator(std::move(numeric));
}

inline DenseOperator read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open matrix file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_matrix_json(doc);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline std::vector<Index> parse_grid_sizes(const std::string& text) {
  std::vector<Index> out;
  for (const auto& part : split(text, ',')) out.push_back(static_cast<Index>(parse_integer(part)));
  return out;
}

struct GridPoint {
  double modulus = 0;
  double phase = 0;
  ComplexScalar lambda;
};

/// `<c>pi` or a plain number.
inline double parse_angle(const std::string& text) {
  if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
    const std::string coef = text.substr(0, text.size() - 2);
    return (coef.empty() ? 1.0 : to_double(parse_rational(coef))) * M_PI;
  }
  return to_double(parse_rational(text));
}

/// `modulus:a..b:steps[:log]` or `modulus:v1;v2;...`, optionally followed by
/// `,phase:a..b:steps` (endpoint excluded) or `,phase:t1;t2;...`. Angles may
/// carry a `pi` suffix. Points are ordered by (modulus, phase).
inline std::vector<GridPoint> parse_grid(const std::string& spec) {
  std::vector<Rational> exact_moduli;
  std::vector<double> moduli;
  bool moduli_exact = true;
  std::vector<double> phases{0.0};
  bool have_modulus = false;

  for (const auto& component : split(spec, ',')) {
    const auto colon = component.find(':');
    if (colon == std::string::npos) throw UsageError("grid component '" + component + "' lacks a name");
    const std::string name = component.substr(0, colon);
    const std::string body = component.substr(colon + 1);
    const auto fields = split(body, ':');
    const bool range = fields[0].find("..") != std::string::npos;

    if (name == "modulus") {
      have_modulus = true;
      if (range) {
        if (fields.size() < 2 || fields.size() > 3) throw UsageError("modulus range must be a..b:steps[:log]");
        const auto dots = fields[0].find("..");
        const Rational a = parse_rational(fields[0].substr(0, dots));
        const Rational b = parse_rational(fields[0].substr(dots + 2));
        const auto steps = parse_integer(fields[1]);
        if (steps < 1) throw UsageError("grid steps must be positive");
        const bool log_spaced = fields.size() == 3;
        if (log_spaced && fields[2] != "log") throw UsageError("unknown modulus spacing '" + fields[2] + "'");
        if (log_spaced && (a <= 0 || b <= 0)) throw UsageError("log spacing needs positive endpoints");
        for (std::int64_t i = 0; i < steps; ++i) {
          if (log_spaced) {
            moduli_exact = false;
            const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
            moduli.push_back(std::exp(std::log(to_double(a)) * (1 - t) + std::log(to_double(b)) * t));
          } else {
            const Rational q = steps == 1 ? a : Rational(a + (b - a) * Rational(i, steps - 1));
            exact_moduli.push_back(q);
            moduli.push_back(to_double(q));
          }
        }
      } else {
        if (fields.size() != 1) throw UsageError("modulus list must be v1;v2;...");
        for (const auto& v : split(fields[0], ';')) {
          const Rational q = parse_rational(v);
          exact_moduli.push_back(q);
          moduli.push_back(to_double(q));
        }
      }
    } else if (name == "phase") {
      phases.clear();
      if (range) {
        if (fields.size() != 2) throw UsageError("phase range must be a..b:steps");
        const auto dots = fields[0].find("..");
        const double a = parse_angle(fields[0].substr(0, dots));
        const double b = parse_angle(fields[0].substr(dots + 2));
        const auto steps = parse_integer(fields[1]);
        if (steps < 1) throw UsageError("grid steps must be positive");
        for (std::int64_t i = 0; i < steps; ++i)
          phases.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(steps));
      } else {
        if (fields.size() != 1) throw UsageError("phase list must be t1;t2;...");
        for (const auto& v : split(fields[0], ';')) phases.push_back(parse_angle(v));
      }
    } else {
      throw UsageError("unknown grid component '" + name + "'");
    }
  }
  if (!have_modulus || moduli.empty() || phases.empty()) throw UsageError("empty grid");

  std::vector<GridPoint> points;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] < 0) throw UsageError("moduli must be non-negative");
    for (double phase : phases) {
      GridPoint p;
      p.modulus = moduli[i];
      p.phase = phase;
      if (moduli_exact && phase == 0.0)
        p.lambda = ComplexScalar::exact(exact_moduli[i]);
      else if (moduli[i] == 0.0)
        p.lambda = ComplexScalar::exact(0);
      else
        p.lambda = ComplexScalar::polar(moduli[i], phase);
      points.push_back(p);
    }
  }
  std::stable_sort(points.begin(), points.end(), [](const GridPoint& a, const GridPoint& b) {
    return a.modulus != b.modulus ? a.modulus < b.modulus : a.phase < b.phase;
  });
  return points;
}

// ---------------------------------------------------------------------------
// Output

inline std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline void emit(const Report& r, Format format, std::ostream& out) {
  if (format == Format::Json) {
    out << r.json.dump(2) << "\n";
    return;
  }
  if (format == Format::Csv) {
    if (r.table) {
      for (std::size_t i = 0; i < r.table->header.size(); ++i) out << (i ? "," : "") << csv_field(r.table->header[i]);
      out << "\n";
      for (const auto& row : r.table->rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << "\n";
      }
    } else {
      out << "key,value\n";
      for (const auto& [key, value] : r.json.items()) out << csv_field(key) << "," << csv_field(cell(value)) << "\n";
    }
    return;
  }
  // scalar fields, including those one object level down as parent.child
  std::vector<std::pair<std::string, std::string>> fields;
  for (const auto& [key, value] : r.json.items()) {
    if (value.is_primitive()) fields.emplace_back(key, cell(value));
    if (value.is_object())
      for (const auto& [sub, inner] : value.items())
        if (inner.is_primitive()) fields.emplace_back(key + "." + sub, cell(inner));
  }
  std::size_t width = 0;
  for (const auto& f : fields) width = std::max(width, f.first.size());
  for (const auto& [key, text] : fields) out << std::left << std::setw(static_cast<int>(width)) << key << "  " << text << "\n";
  if (r.table) {
    std::vector<std::size_t> w(r.table->header.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = r.table->header[i].size();
    for (const auto& row : r.table->rows)
      for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], row[i].size());
    out << "\n";
    const auto line = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "  " : "") << std::left << std::setw(static_cast<int>(w[i])) << row[i];
      out << "\n";
    };
    line(r.table->header);
    for (const auto& row : r.table->rows) line(row);
  } else {
    for (const auto& [key, value] : r.json.items())
      if (!value.is_primitive()) out << key << "  " << value.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// Commands

struct Options {
  std::string format = "json";
  int parallelism = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  std::string weights;
  std::string lambda = "1";
  std::string mode = "analytic";
  int kmax = -1;
  std::int64_t horizon = 10000;
  std::int64_t k = 0;
  std::int64_t window = 5;
  bool exact = false;
  double threshold = 0.25;

  std::string input;
  std::string target;
  double tol = 1e-10;
  double cond_max = 100;
  int samples = 50;

  std::int64_t n = 16;
  std::string scheme = "rectangle";
  std::string gamma = "1";
  std::string grids;
  int m = 0;
  int kk = 0;
  double j = 10;

  std::string grid;
};

inline Json header(const std::string& command) { return Json{{"schema", report::kSchema}, {"command", command}}; }

inline WeightFamily family_of(const Options& o) {
  try {
    return parse_family(o.weights);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--weights: ") + e.what());
  }
}

inline ComplexScalar complex_of(const std::string& text, const char* flag) {
  try {
    return parse_complex(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

inline Mode mode_of(const Options& o) {
  if (o.mode == "analytic") return Mode::Analytic;
  if (o.mode == "sampled") return Mode::Sampled;
  throw UsageError("--mode must be analytic or sampled");
}

inline Scheme scheme_of(const Options& o) {
  if (o.scheme == "rectangle") return Scheme::Rectangle;
  if (o.scheme == "trapezoid") return Scheme::Trapezoid;
  throw UsageError("--scheme must be rectangle or trapezoid");
}

inline std::string fmt(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  return Json(x).dump();
}

inline Report shift_member(const Options& o) {
  const WeightFamily f = family_of(o);
  const ComplexScalar lambda = complex_of(o.lambda, "--lambda");
  MembershipOptions mo;
  mo.k_max = o.kmax < 0 ? 20 : o.kmax;
  mo.mode = mode_of(o);
  mo.horizon = o.horizon;
  const SigmaVerdict v = shift_membership(f, lambda, mo);
  Json j = header("shift member");
  j["family"] = render(f);
  j["lambda"] = report::scalar(lambda);
  j["kMax"] = mo.k_max;
  const Json verdict = report::verdict(v);
  for (const auto& [key, value] : verdict.items()) j[key] = value;
  return {j, std::nullopt};
}

inline Report shift_annulus(const Options& o) {
  const WeightFamily f = family_of(o);
  const int k_max = o.kmax < 0 ? 20 : o.kmax;
  const AnnulusReport a = annulus(f, k_max);
  Json j = header("shift annulus");
  j["family"] = render(f);
  j["kMax"] = k_max;
  Json cs = Json::array(), ds = Json::array();
  Table t{{"k", "c_k", "d_k"}, {}};
  for (std::size_t k = 0; k < a.c_seq.size(); ++k) {
    cs.push_back(to_string(a.c_seq[k]));
    ds.push_back(to_string(a.d_seq[k]));
    t.rows.push_back({std::to_string(k), to_string(a.c_seq[k]), to_string(a.d_seq[k])});
  }
  j["cSeq"] = cs;
  j["dSeq"] = ds;
  j["c"] = a.c.str();
  j["d"] = a.d.str();
  j["innerBoundary"] = a.inner == Boundary::Closed ? "closed" : "open";
  j["outerBoundary"] = a.outer == Boundary::Closed ? "closed" : "open";
  j["shape"] = a.shape();
  j["containsUnitCircle"] = a.contains_unit_circle;
  return {j, t};
}

inline Report shift_norms(const Options& o) {
  const WeightFamily f = family_of(o);
  const int k_max = o.kmax < 0 ? 20 : o.kmax;
  if (k_max < 1) throw UsageError("--kmax must be at least 1");
  Json j = header("shift norms");
  j["family"] = render(f);
  j["kMax"] = k_max;
  j["exact"] = o.exact;
  Json norms = Json::array(), roots = Json::array(), argmax = Json::array();
  Table t{{"k", "norm", "root", "argmax"}, {}};
  for (int k = 1; k <= k_max; ++k) {
    const auto profile = xeig::detail::beta_profile(f, k, 2 * k);
    const double root = std::exp(profile.max.log() / k);
    norms.push_back(o.exact ? Json(profile.max.str()) : report::number(profile.max.to_double()));
    roots.push_back(report::number(root));
    argmax.push_back(profile.argmax);
    std::string am;
    for (std::size_t i = 0; i < profile.argmax.size(); ++i) am += (i ? ";" : "") + std::to_string(profile.argmax[i]);
    t.rows.push_back({std::to_string(k), o.exact ? profile.max.str() : fmt(profile.max.to_double()), fmt(root), am});
  }
  j["norms"] = norms;
  j["roots"] = roots;
  j["argmax"] = argmax;
  return {j, t};
}

inline Report shift_quasinilpotence(const Options& o) {
  const WeightFamily f = family_of(o);
  const int k_max = o.kmax < 0 ? 40 : o.kmax;
  if (k_max < 2) throw UsageError("--kmax must be at least 2");
  const NormProfile p = quasinilpotence_profile(f, k_max, o.threshold);
  Json j = header("shift quasinilpotence");
  j["family"] = render(f);
  j["kMax"] = k_max;
  j["threshold"] = o.threshold;
  Json roots = Json::array();
  Table t{{"k", "norm", "root"}, {}};
  for (std::size_t i = 0; i < p.roots.size(); ++i) {
    roots.push_back(report::number(p.roots[i]));
    t.rows.push_back({std::to_string(i + 1), p.norms[i].str(), fmt(p.roots[i])});
  }
  j["roots"] = roots;
  j["finalRoot"] = report::number(p.roots.back());
  j["quasinilpotent"] = p.quasinilpotent;
  j["basis"] = p.basis;
  return {j, t};
}

inline Report shift_witness(const Options& o) {
  const WeightFamily f = family_of(o);
  const ComplexScalar lambda = complex_of(o.lambda, "--lambda");
  const DenseOperator x = build_shift_witness(f, lambda, o.k, o.window);
  const IntertwiningCheck c = verify_intertwining(x, f, lambda, o.window);
  Json j = header("shift witness");
  j["family"] = render(f);
  j["lambda"] = report::scalar(lambda);
  j["k"] = o.k;
  j["window"] = o.window;
  j["exactPass"] = c.exact_pass;
  j["exactArithmetic"] = c.exact_arithmetic;
  j["interiorResidual"] = report::number(c.interior_residual);
  j["pairsChecked"] = c.pairs_checked;
  j["witness"] = report::matrix(x);
  return {j, std::nullopt};
}

inline DenseOperator input_matrix(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  return read_matrix_file(o.input);
}

inline Report matrix_sigma_cmd(const Options& o) {
  const DenseOperator t = input_matrix(o);
  const Spectrum s = spectrum(t, o.tol);
  const MatrixSigmaSet sigma = matrix_sigma(t, o.tol);
  Json j = header("matrix sigma");
  j["dim"] = t.dim();
  j["exactInput"] = t.exact();
  Json spec = Json::array();
  std::vector<Complex> sorted = s.values;
  std::sort(sorted.begin(), sorted.end(), modulus_phase_less);
  for (auto z : sorted) spec.push_back(report::complex(z));
  j["spectrum"] = spec;
  j["spectrumMethod"] = s.method;
  j["sigma"] = report::sigma_set(sigma);
  Table tab{{"re", "im"}, {}};
  for (auto z : sigma.values) tab.rows.push_back({fmt(z.real()), fmt(z.imag())});
  return {j, tab};
}

inline Report matrix_member(const Options& o) {
  const DenseOperator t = input_matrix(o);
  const ComplexScalar lambda = complex_of(o.lambda, "--lambda");
  SylvesterOptions so;
  so.tol = o.tol;
  const SylvesterResult r = sylvester_membership(t, lambda, so);
  Json j = header("matrix member");
  j["dim"] = t.dim();
  j["lambda"] = report::scalar(lambda);
  j["status"] = to_string(r.status);
  j["smin"] = report::number(r.smin);
  j["method"] = r.method;
  j["approximate"] = r.approximate;
  if (r.witness) {
    const WitnessResidual w = witness_residual(t, DenseOperator(*r.witness), lambda);
    j["witness"] = report::matrix(*r.witness);
    j["residual"] = report::number(w.residual);
    j["xnorm"] = report::number(w.xnorm);
  } else {
    j["witness"] = nullptr;
  }
  return {j, std::nullopt};
}

inline Report matrix_orbit(const Options& o, int workers) {
  if (!o.seed_given) throw UsageError("--seed is required for randomized commands");
  const DenseOperator t = input_matrix(o);
  Json j = header("matrix orbit");
  j["dim"] = t.dim();
  j["seed"] = o.seed;
  j["samples"] = o.samples;
  j["condMax"] = o.cond_max;
  if (!o.target.empty()) {
    const DenseOperator b = read_matrix_file(o.target);
    const OrbitDistance d = orbit_distance(t, b, o.samples, o.cond_max, o.seed);
    j["mode"] = "distance";
    j["distance"] = report::number(d.distance);
    j["deterministicDistance"] = report::number(d.deterministic);
    Json curve = Json::array();
    Table tab{{"samples", "distance"}, {}};
    for (std::size_t i = 0; i < d.curve.size(); ++i) {
      curve.push_back(report::number(d.curve[i]));
      tab.rows.push_back({std::to_string(i + 1), fmt(d.curve[i])});
    }
    j["curve"] = curve;
    return {j, tab};
  }
  if (o.samples < 1) throw UsageError("--samples must be positive");
  const MatrixSigmaSet reference = matrix_sigma(t, o.tol);
  const SimilaritySampler sampler(t.dim(), o.cond_max, o.seed);
  struct Sample {
    double condition;
    MatrixSigmaSet sigma;
  };
  const auto results = parallel_map(static_cast<std::size_t>(o.samples), workers, [&](std::size_t i) {
    const auto d = sampler.draw(i);
    return Sample{d.condition, matrix_sigma(conjugate(t, d), o.tol)};
  });
  j["mode"] = "invariance";
  j["reference"] = report::sigma_set(reference);
  Json rows = Json::array();
  Table tab{{"sample", "condition", "kind", "size", "matches"}, {}};
  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const bool match = results[i].sigma.same_as(reference);
    all = all && match;
    rows.push_back(Json{{"condition", report::number(results[i].condition)},
                        {"matches", match},
                        {"sigma", report::sigma_set(results[i].sigma)}});
    tab.rows.push_back({std::to_string(i), fmt(results[i].condition), to_string(results[i].sigma.kind),
                        std::to_string(results[i].sigma.values.size()), match ? "true" : "false"});
  }
  j["allMatch"] = all;
  j["conjugates"] = rows;
  return {j, tab};
}

inline Report volterra_discretize(const Options& o) {
  const auto v = discretize_volterra(o.n, scheme_of(o));
  const RationalMatrix& m = v.matrix.rational();
  Rational max_row = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    Rational row = 0;
    for (Index c = 0; c < m.cols(); ++c) row += m(i, c);
    max_row = std::max(max_row, row);
  }
  RationalMatrix power = m;
  for (Index p = 1; p < v.n; ++p) power = power * m;
  Json j = header("volterra discretize");
  j["n"] = v.n;
  j["scheme"] = to_string(v.scheme);
  j["norm"] = report::number(operator_norm(v.matrix.numeric()));
  j["maxRowSum"] = to_string(max_row);
  j["nilpotent"] = power.is_zero();
  j["matrix"] = report::matrix(v.matrix);
  return {j, std::nullopt};
}

inline Report volterra_evidence(const Options& o) {
  const ComplexScalar lambda = complex_of(o.lambda, "--lambda");
  if (!lambda.exact_real()) throw UsageError("--lambda must be a real rational for grid-aligned witnesses");
  const auto grids = parse_grid_sizes(o.grids.empty() ? "64,128,256,512" : o.grids);
  const MembershipEvidence e = volterra_membership_evidence(lambda.re(), grids);
  Json j = header("volterra evidence");
  j["lambda"] = report::scalar(lambda);
  Json rows = Json::array();
  Table t{{"N", "residual", "N_times_residual"}, {}};
  for (const auto& [n, r] : e.residuals) {
    rows.push_back(Json{{"N", n}, {"residual", report::number(r)}});
    t.rows.push_back({std::to_string(n), fmt(r), fmt(r * static_cast<double>(n))});
  }
  j["residuals"] = rows;
  j["allZero"] = e.convergence_order && std::isinf(*e.convergence_order);
  j["convergenceOrder"] = e.convergence_order ? report::number(*e.convergence_order) : Json(nullptr);
  return {j, t};
}

inline Report volterra_shifted(const Options& o) {
  const ComplexScalar gamma = complex_of(o.gamma, "--gamma");
  const MatrixSigmaSet s = shifted_volterra_sigma(gamma, o.n, scheme_of(o), o.tol);
  Json j = header("volterra shifted");
  j["gamma"] = report::scalar(gamma);
  j["n"] = o.n;
  j["scheme"] = o.scheme;
  j["sigma"] = report::sigma_set(s);
  return {j, std::nullopt};
}

inline Report volterra_probe(const Options& o, int workers) {
  const ComplexScalar lambda = complex_of(o.lambda, "--lambda");
  const auto grids = parse_grid_sizes(o.grids.empty() ? "32,64,128" : o.grids);
  const Scheme scheme = scheme_of(o);
  const auto curve = parallel_map(grids.size(), workers, [&](std::size_t i) {
    const auto v = discretize_volterra(grids[i], scheme);
    return constrained_residual_probe(v.matrix, lambda, o.m, o.kk, o.j);
  });
  Json j = header("volterra probe");
  j["lambda"] = report::scalar(lambda);
  j["m"] = o.m;
  j["k"] = o.kk;
  j["j"] = o.j;
  j["scheme"] = o.scheme;
  Json rows = Json::array();
  Table t{{"N", "residual", "xnorm", "ball_active", "converged", "iterations"}, {}};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const ProbeResult& p = curve[i];
    rows.push_back(Json{{"N", grids[i]},
                        {"minimalResidual", report::number(p.minimal_residual)},
                        {"xnorm", report::number(p.xnorm)},
                        {"ballActive", p.ball_active},
                        {"converged", p.converged},
                        {"iterations", p.iterations}});
    t.rows.push_back({std::to_string(grids[i]), fmt(p.minimal_residual), fmt(p.xnorm), p.ball_active ? "true" : "false",
                      p.converged ? "true" : "false", std::to_string(p.iterations)});
  }
  j["curve"] = rows;
  return {j, t};
}

inline Report sweep_shift(const Options& o, int workers) {
  const WeightFamily f = family_of(o);
  const auto points = parse_grid(o.grid);
  MembershipOptions mo;
  mo.k_max = o.kmax < 0 ? 20 : o.kmax;
  mo.mode = mode_of(o);
  mo.horizon = o.horizon;
  const auto verdicts =
      parallel_map(points.size(), workers, [&](std::size_t i) { return shift_membership(f, points[i].lambda, mo); });
  Json j = header("sweep shift");
  j["family"] = render(f);
  j["kMax"] = mo.k_max;
  j["mode"] = to_string(mo.mode);
  Json rows = Json::array();
  Table t{{"modulus", "phase", "re", "im", "status", "witnessK"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& v = verdicts[i];
    rows.push_back(Json{{"modulus", points[i].modulus},
                        {"phase", points[i].phase},
                        {"lambda", report::scalar(points[i].lambda)},
                        {"status", to_string(v.status)},
                        {"witnessK", v.witness_k ? Json(*v.witness_k) : Json(nullptr)}});
    t.rows.push_back({fmt(points[i].modulus), fmt(points[i].phase), fmt(points[i].lambda.value().real()),
                      fmt(points[i].lambda.value().imag()), to_string(v.status),
                      v.witness_k ? std::to_string(*v.witness_k) : ""});
  }
  j["points"] = rows;
  return {j, t};
}

inline Report sweep_matrix(const Options& o, int workers) {
  const DenseOperator t = input_matrix(o);
  const auto points = parse_grid(o.grid);
  const MatrixSigmaSet sigma = matrix_sigma(t, o.tol);
  SylvesterOptions so;
  so.tol = o.tol;
  const auto results =
      parallel_map(points.size(), workers, [&](std::size_t i) { return sylvester_membership(t, points[i].lambda, so); });
  Json j = header("sweep matrix");
  j["dim"] = t.dim();
  Json rows = Json::array();
  Table tab{{"modulus", "phase", "re", "im", "status", "in_ratio_set", "smin"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& lam = points[i].lambda;
    const bool in_set = lam.exact_real() ? sigma.contains(lam.re()) : sigma.contains(lam.value());
    rows.push_back(Json{{"modulus", points[i].modulus},
                        {"phase", points[i].phase},
                        {"lambda", report::scalar(lam)},
                        {"status", to_string(results[i].status)},
                        {"inRatioSet", in_set},
                        {"smin", report::number(results[i].smin)}});
    tab.rows.push_back({fmt(points[i].modulus), fmt(points[i].phase), fmt(lam.value().real()), fmt(lam.value().imag()),
                        to_string(results[i].status), in_set ? "true" : "false", fmt(results[i].smin)});
  }
  j["points"] = rows;
  return {j, tab};
}

inline int resolve_parallelism(int flag) {
  if (const char* env = std::getenv("XEIG_PARALLELISM"); env && *env) {
    const int v = std::atoi(env);
    if (v < 1) throw UsageError("XEIG_PARALLELISM must be a positive integer");
    return v;
  }
  if (flag > 0) return flag;
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

/// Entry point; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended eigenvalues of weighted shifts, matrices and the Volterra operator", "xeig"};
  app.require_subcommand(1);
  Options o;
  std::function<Report(int)> action;
  CLI::App* leaf = nullptr;

  const auto common = [&](CLI::App* c) {
    c->add_option("--format", o.format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
    c->add_option("--parallelism", o.parallelism, "worker threads (XEIG_PARALLELISM overrides)");
  };
  const auto add = [&](CLI::App* parent, const std::string& name, const std::string& desc,
                       std::function<Report(int)> fn) {
    CLI::App* c = parent->add_subcommand(name, desc);
    common(c);
    c->callback([&, fn, c] {
      action = fn;
      leaf = c;
    });
    return c;
  };

  CLI::App* shift = app.add_subcommand("shift", "bilateral weighted shifts");
  shift->require_subcommand(1);
  {
    auto* c = add(shift, "member", "decide lambda in Sigma(T)", [&](int) { return shift_member(o); });
    c->add_option("--weights", o.weights, "weight family")->required();
    c->add_option("--lambda", o.lambda, "complex literal a+bi");
    c->add_option("--kmax", o.kmax, "largest witness order (default 20)");
    c->add_option("--mode", o.mode, "analytic or sampled");
    c->add_option("--horizon", o.horizon, "sampling horizon N");

    c = add(shift, "annulus", "annulus radii and shape", [&](int) { return shift_annulus(o); });
    c->add_option("--weights", o.weights)->required();
    c->add_option("--kmax", o.kmax, "number of c_k, d_k terms (default 20)");

    c = add(shift, "norms", "norms of powers ||T^k||", [&](int) { return shift_norms(o); });
    c->add_option("--weights", o.weights)->required();
    c->add_option("--kmax", o.kmax, "largest power (default 20)");
    c->add_flag("--exact", o.exact, "print norms as exact rationals");

    c = add(shift, "quasinilpotence", "root sequence ||T^k||^(1/k)", [&](int) { return shift_quasinilpotence(o); });
    c->add_option("--weights", o.weights)->required();
    c->add_option("--kmax", o.kmax, "largest power (default 40)");
    c->add_option("--threshold", o.threshold, "bound on the final root");

    c = add(shift, "witness", "truncated eigenoperator and its check", [&](int) { return shift_witness(o); });
    c->add_option("--weights", o.weights)->required();
    c->add_option("--lambda", o.lambda);
    c->add_option("--k", o.k, "witness order");
    c->add_option("--window", o.window, "index window [-W, W]");
  }

  CLI::App* matrix = app.add_subcommand("matrix", "finite matrices");
  matrix->require_subcommand(1);
  {
    auto* c = add(matrix, "sigma", "ratio set of the spectrum", [&](int) { return matrix_sigma_cmd(o); });
    c->add_option("--input", o.input, "matrix JSON")->required();
    c->add_option("--tol", o.tol);

    c = add(matrix, "member", "kernel of X -> XT - lambda TX", [&](int) { return matrix_member(o); });
    c->add_option("--input", o.input)->required();
    c->add_option("--lambda", o.lambda);
    c->add_option("--tol", o.tol);

    c = add(matrix, "orbit", "similarity orbit sampling", [&](int w) { return matrix_orbit(o, w); });
    c->add_option("--input", o.input)->required();
    c->add_option("--target", o.target, "matrix B for the orbit distance");
    c->add_option("--samples", o.samples);
    c->add_option("--cond-max", o.cond_max);
    c->add_option("--tol", o.tol);
    c->add_option("--seed", o.seed)->required();
  }

  CLI::App* volterra = app.add_subcommand("volterra", "the Volterra operator");
  volterra->require_subcommand(1);
  {
    auto* c = add(volterra, "discretize", "grid matrix V_N", [&](int) { return volterra_discretize(o); });
    c->add_option("--n", o.n);
    c->add_option("--scheme", o.scheme);

    c = add(volterra, "evidence", "composition witness residuals", [&](int) { return volterra_evidence(o); });
    c->add_option("--lambda", o.lambda);
    c->add_option("--grids", o.grids, "comma-separated grid sizes");

    c = add(volterra, "shifted", "Sigma(gamma I + V_N)", [&](int) { return volterra_shifted(o); });
    c->add_option("--gamma", o.gamma);
    c->add_option("--n", o.n);
    c->add_option("--scheme", o.scheme);
    c->add_option("--tol", o.tol);

    c = add(volterra, "probe", "constrained residual minimization", [&](int w) { return volterra_probe(o, w); });
    c->add_option("--lambda", o.lambda);
    c->add_option("--m", o.m, "power of the x test vector");
    c->add_option("--k", o.kk, "power of the y test vector");
    c->add_option("--j", o.j, "normalized Frobenius bound");
    c->add_option("--grids", o.grids);
    c->add_option("--scheme", o.scheme);
  }

  CLI::App* sweep = app.add_subcommand("sweep", "lambda-grid sweeps");
  sweep->require_subcommand(1);
  {
    auto* c = add(sweep, "shift", "membership over a grid", [&](int w) { return sweep_shift(o, w); });
    c->add_option("--weights", o.weights)->required();
    c->add_option("--grid", o.grid, "modulus:a..b:steps[:log],phase:0..2pi:steps")->required();
    c->add_option("--kmax", o.kmax);
    c->add_option("--mode", o.mode);
    c->add_option("--horizon", o.horizon);

    c = add(sweep, "matrix", "Sylvester oracle over a grid", [&](int w) { return sweep_matrix(o, w); });
    c->add_option("--input", o.input)->required();
    c->add_option("--grid", o.grid)->required();
    c->add_option("--tol", o.tol);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* current = &app;
    while (!current->get_subcommands().empty()) current = current->get_subcommands().front();
    out << current->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return 2;
  }
  if (leaf) {
    if (auto* seed = leaf->get_option_no_throw("--seed")) o.seed_given = seed->count() > 0;
  }

  try {
    const Format format = o.format == "csv" ? Format::Csv : (o.format == "human" ? Format::Human : Format::Json);
    const int workers = resolve_parallelism(o.parallelism);
    const Report r = action(workers);
    emit(r, format, out);
    return 0;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace xeig::cli
