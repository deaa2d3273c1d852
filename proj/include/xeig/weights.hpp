#pragma once

// Two-sided weight sequences {w_n}, n in Z, described by a small DSL.
//
// Grammar (ASCII, no whitespace):
//
//   family  := kind ':' param (',' param)*
//   param   := key '=' value
//   value   := rational | integer | '[' family ']' | '[' entry (';' entry)* ']'
//   entry   := integer '=' rational
//
//   powerlaw:alpha=A               w_n = (1+|n|)^(-A),           A > 0
//   constant:r=R                   w_n = R,                      R > 0
//   exptail:pos=P,neg=Q            w_n = P^n (n>=0), Q^|n| (n<0), 0 < P,Q <= 1
//   piecewise:split=S,neg=[F],pos=[G]   w_n = F(n) for n < S, G(n) for n >= S
//   table:values=[n=v;...],tail=[F]     w_n = v for listed n, F(n) otherwise
//
// Every family evaluates to a bounded sequence of positive weights.

#include <xeig/scalar.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace xeig {

class WeightFamily;
using FamilyPtr = std::shared_ptr<const WeightFamily>;

struct PowerLaw {
  Rational alpha;
};
struct Constant {
  Rational value;
};
struct ExpTail {
  Rational positive_base;
  Rational negative_base;
};
struct Piecewise {
  FamilyPtr negative;
  FamilyPtr positive;
  std::int64_t split = 0;
};
struct Table {
  std::map<std::int64_t, Rational> values;
  FamilyPtr tail;
};

class WeightFamily {
 public:
  using Kind = std::variant<PowerLaw, Constant, ExpTail, Piecewise, Table>;

  static WeightFamily power_law(Rational alpha) {
    if (alpha < 0) throw std::invalid_argument("unbounded family: powerlaw alpha must be positive");
    if (alpha == 0) throw std::invalid_argument("non-positive parameter: powerlaw alpha must be positive");
    return WeightFamily(PowerLaw{std::move(alpha)});
  }
  static WeightFamily constant(Rational value) {
    if (value <= 0) throw std::invalid_argument("non-positive parameter: constant weight must be positive");
    return WeightFamily(Constant{std::move(value)});
  }
  static WeightFamily exp_tail(Rational positive_base, Rational negative_base) {
    for (const Rational* b : {&positive_base, &negative_base}) {
      if (*b <= 0) throw std::invalid_argument("non-positive parameter: exptail base must be positive");
      if (*b > 1) throw std::invalid_argument("unbounded family: exptail base must not exceed 1");
    }
    return WeightFamily(ExpTail{std::move(positive_base), std::move(negative_base)});
  }
  static WeightFamily piecewise(WeightFamily negative, WeightFamily positive, std::int64_t split) {
    return WeightFamily(Piecewise{std::make_shared<const WeightFamily>(std::move(negative)),
                                  std::make_shared<const WeightFamily>(std::move(positive)), split});
  }
  static WeightFamily table(std::map<std::int64_t, Rational> values, WeightFamily tail) {
    for (const auto& [n, v] : values)
      if (v <= 0)
        throw std::invalid_argument("non-positive parameter: table weight at n=" + std::to_string(n));
    return WeightFamily(Table{std::move(values), std::make_shared<const WeightFamily>(std::move(tail))});
  }

  const Kind& kind() const noexcept { return kind_; }

  /// True when every weight is an exact rational (no fractional powers).
  bool exact() const {
    return std::visit(
        [](const auto& k) -> bool {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, PowerLaw>) return is_integer(k.alpha);
          if constexpr (std::is_same_v<K, Piecewise>) return k.negative->exact() && k.positive->exact();
          if constexpr (std::is_same_v<K, Table>) return k.tail->exact();
          return true;
        },
        kind_);
  }

  friend bool operator==(const WeightFamily& a, const WeightFamily& b) {
    if (a.kind_.index() != b.kind_.index()) return false;
    return std::visit(
        [&](const auto& ka) -> bool {
          using K = std::decay_t<decltype(ka)>;
          const K& kb = std::get<K>(b.kind_);
          if constexpr (std::is_same_v<K, PowerLaw>) return ka.alpha == kb.alpha;
          if constexpr (std::is_same_v<K, Constant>) return ka.value == kb.value;
          if constexpr (std::is_same_v<K, ExpTail>)
            return ka.positive_base == kb.positive_base && ka.negative_base == kb.negative_base;
          if constexpr (std::is_same_v<K, Piecewise>)
            return ka.split == kb.split && *ka.negative == *kb.negative && *ka.positive == *kb.positive;
          if constexpr (std::is_same_v<K, Table>) return ka.values == kb.values && *ka.tail == *kb.tail;
        },
        a.kind_);
  }

 private:
  explicit WeightFamily(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

// Relative error of std::pow for the fractional power-law path.
inline constexpr double kPowRelativeError = 4.0 * 1.1102230246251565e-16;

/// w_n as an exact rational (or tracked-precision value for fractional powers).
inline ExactScalar eval_weight(const WeightFamily& family, std::int64_t n) {
  const std::uint64_t abs_n = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
  return std::visit(
      [&](const auto& k) -> ExactScalar {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) {
          const Rational base(static_cast<unsigned long>(abs_n) + 1UL);
          if (is_integer(k.alpha)) return ExactScalar(pow(Rational(1) / base, k.alpha.get_num().get_ui()));
          const double w = std::pow(to_double(base), -to_double(k.alpha));
          return ExactScalar::approximate(w, kPowRelativeError);
        } else if constexpr (std::is_same_v<K, Constant>) {
          return ExactScalar(k.value);
        } else if constexpr (std::is_same_v<K, ExpTail>) {
          return ExactScalar(pow(n >= 0 ? k.positive_base : k.negative_base, static_cast<unsigned long>(abs_n)));
        } else if constexpr (std::is_same_v<K, Piecewise>) {
          return eval_weight(n < k.split ? *k.negative : *k.positive, n);
        } else {
          const auto it = k.values.find(n);
          return it != k.values.end() ? ExactScalar(it->second) : eval_weight(*k.tail, n);
        }
      },
      family.kind());
}

/// log w_n in double precision, cheap for large |n|.
inline double log_weight(const WeightFamily& family, std::int64_t n) {
  const double abs_n = std::fabs(static_cast<double>(n));
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) {
          return -to_double(k.alpha) * std::log1p(abs_n);
        } else if constexpr (std::is_same_v<K, Constant>) {
          return log_abs(k.value);
        } else if constexpr (std::is_same_v<K, ExpTail>) {
          return abs_n * log_abs(n >= 0 ? k.positive_base : k.negative_base);
        } else if constexpr (std::is_same_v<K, Piecewise>) {
          return log_weight(n < k.split ? *k.negative : *k.positive, n);
        } else {
          const auto it = k.values.find(n);
          return it != k.values.end() ? log_abs(it->second) : log_weight(*k.tail, n);
        }
      },
      family.kind());
}

/// beta(k, n) = w_k * ... * w_n, with beta(n+1, n) = 1.
inline ExactScalar beta(const WeightFamily& family, std::int64_t k, std::int64_t n) {
  if (k > n + 1)
    throw std::invalid_argument("beta(k, n) requires k <= n+1 (got k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  ExactScalar product(Rational(1));
  for (std::int64_t j = k; j <= n; ++j) product *= eval_weight(family, j);
  return product;
}

// ---------------------------------------------------------------------------
// Asymptotic tail classes

struct TailClass {
  enum class Kind { Constant, Polynomial, Exponential };

  Kind kind = Kind::Constant;
  /// Constant: the limiting weight. Polynomial: exponent e with w ~ |n|^e.
  /// Exponential: base b with w ~ b^|n|, 0 < b < 1.
  Rational parameter{1};

  static TailClass constant(Rational value) { return {Kind::Constant, std::move(value)}; }
  static TailClass polynomial(Rational exponent) { return {Kind::Polynomial, std::move(exponent)}; }
  static TailClass exponential(Rational base) { return {Kind::Exponential, std::move(base)}; }

  /// Exponential growth rate of log w per unit |n| (log b, or 0).
  double rate() const { return kind == Kind::Exponential ? log_abs(parameter) : 0.0; }
  /// True when w_n -> 0 along this tail.
  bool decays() const { return kind != Kind::Constant; }

  std::string str() const {
    switch (kind) {
      case Kind::Constant: return "constant";
      case Kind::Polynomial: return "polynomial(" + to_string(parameter) + ")";
      case Kind::Exponential: return "exponential(log " + to_string(parameter) + ")";
    }
    return {};
  }

  friend bool operator==(const TailClass& a, const TailClass& b) {
    return a.kind == b.kind && a.parameter == b.parameter;
  }
};

struct GrowthDescriptor {
  TailClass plus;   // n -> +infinity
  TailClass minus;  // n -> -infinity
};

namespace detail {

inline TailClass exponential_or_constant(const Rational& base) {
  return base == 1 ? TailClass::constant(1) : TailClass::exponential(base);
}

}  // namespace detail

/// Tail classes read off the DSL structure (no sampling).
inline GrowthDescriptor growth_descriptor(const WeightFamily& family) {
  return std::visit(
      [](const auto& k) -> GrowthDescriptor {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) {
          const auto t = TailClass::polynomial(-k.alpha);
          return {t, t};
        } else if constexpr (std::is_same_v<K, Constant>) {
          const auto t = TailClass::constant(k.value);
          return {t, t};
        } else if constexpr (std::is_same_v<K, ExpTail>) {
          return {detail::exponential_or_constant(k.positive_base),
                  detail::exponential_or_constant(k.negative_base)};
        } else if constexpr (std::is_same_v<K, Piecewise>) {
          return {growth_descriptor(*k.positive).plus, growth_descriptor(*k.negative).minus};
        } else {
          return growth_descriptor(*k.tail);
        }
      },
      family.kind());
}

// ---------------------------------------------------------------------------
// DSL rendering and parsing

inline std::string render(const WeightFamily& family) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PowerLaw>) {
          return "powerlaw:alpha=" + to_string(k.alpha);
        } else if constexpr (std::is_same_v<K, Constant>) {
          return "constant:r=" + to_string(k.value);
        } else if constexpr (std::is_same_v<K, ExpTail>) {
          return "exptail:pos=" + to_string(k.positive_base) + ",neg=" + to_string(k.negative_base);
        } else if constexpr (std::is_same_v<K, Piecewise>) {
          return "piecewise:split=" + std::to_string(k.split) + ",neg=[" + render(*k.negative) + "],pos=[" +
                 render(*k.positive) + "]";
        } else {
          std::string out = "table:values=[";
          bool first = true;
          for (const auto& [n, v] : k.values) {
            if (!first) out += ';';
            first = false;
            out += std::to_string(n) + "=" + to_string(v);
          }
          return out + "],tail=[" + render(*k.tail) + "]";
        }
      },
      family.kind());
}

namespace detail {

class FamilyParser {
 public:
  explicit FamilyParser(std::string_view text) : text_(text) {}

  WeightFamily parse_all() {
    WeightFamily f = parse_family();
    if (pos_ != text_.size()) syntax("trailing characters");
    return f;
  }

 private:
  struct Param {
    std::string key;
    std::size_t key_pos;
    std::string_view scalar;  // empty when bracketed
    std::size_t value_pos;
    std::string_view bracketed;
  };

  [[noreturn]] void syntax(const std::string& what, std::size_t at) const {
    throw ParseError(ParseError::Kind::Syntax, what, at);
  }
  [[noreturn]] void syntax(const std::string& what) const { syntax(what, pos_); }

  WeightFamily parse_family() {
    const std::size_t kind_pos = pos_;
    std::string kind;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) kind += text_[pos_++];
    if (kind.empty()) syntax("expected family kind");
    expect(':');
    std::vector<Param> params;
    do {
      params.push_back(parse_param());
    } while (accept(','));

    std::map<std::string, const Param*> by_key;
    for (const auto& p : params)
      if (!by_key.emplace(p.key, &p).second) syntax("duplicate key '" + p.key + "'", p.key_pos);

    const auto allow = [&](std::initializer_list<const char*> keys) {
      for (const auto& p : params) {
        bool ok = false;
        for (const char* k : keys) ok = ok || p.key == k;
        if (!ok) syntax("unknown key '" + p.key + "' for " + kind, p.key_pos);
      }
      for (const char* k : keys)
        if (!by_key.count(k)) syntax(std::string("missing key '") + k + "' for " + kind, kind_pos);
    };
    const auto rational = [&](const char* key) {
      const Param& p = *by_key.at(key);
      if (p.scalar.empty()) syntax(std::string("expected a number for '") + key + "'", p.value_pos);
      return parse_rational(p.scalar, p.value_pos);
    };
    const auto nested = [&](const char* key) {
      const Param& p = *by_key.at(key);
      if (p.scalar.size() || p.bracketed.data() == nullptr)
        syntax(std::string("expected [family] for '") + key + "'", p.value_pos);
      FamilyParser inner(p.bracketed);
      try {
        return inner.parse_all();
      } catch (const ParseError& e) {
        throw ParseError(e.kind(), strip_position(e.what()), p.value_pos + 1 + e.position());
      }
    };

    try {
      if (kind == "powerlaw") {
        allow({"alpha"});
        return WeightFamily::power_law(rational("alpha"));
      }
      if (kind == "constant") {
        allow({"r"});
        return WeightFamily::constant(rational("r"));
      }
      if (kind == "exptail") {
        allow({"pos", "neg"});
        return WeightFamily::exp_tail(rational("pos"), rational("neg"));
      }
      if (kind == "piecewise") {
        allow({"split", "neg", "pos"});
        const Param& s = *by_key.at("split");
        if (s.scalar.empty()) syntax("expected an integer for 'split'", s.value_pos);
        const std::int64_t split = parse_integer(s.scalar, s.value_pos);
        return WeightFamily::piecewise(nested("neg"), nested("pos"), split);
      }
      if (kind == "table") {
        allow({"values", "tail"});
        return WeightFamily::table(parse_entries(*by_key.at("values")), nested("tail"));
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(ParseError::Kind::Semantic, e.what(), kind_pos);
    }
    syntax("unknown family kind '" + kind + "'", kind_pos);
  }

  static std::string strip_position(const std::string& message) {
    const auto colon = message.find(": ");
    std::string m = colon == std::string::npos ? message : message.substr(colon + 2);
    const auto at = m.rfind(" (at position");
    return at == std::string::npos ? m : m.substr(0, at);
  }

  std::map<std::int64_t, Rational> parse_entries(const Param& p) {
    if (p.bracketed.data() == nullptr) syntax("expected [n=v;...] for 'values'", p.value_pos);
    std::map<std::int64_t, Rational> values;
    std::size_t start = 0;
    const std::string_view body = p.bracketed;
    if (body.empty()) return values;
    while (start <= body.size()) {
      std::size_t end = body.find(';', start);
      if (end == std::string_view::npos) end = body.size();
      const std::string_view entry = body.substr(start, end - start);
      const std::size_t base = p.value_pos + 1 + start;
      // the key may carry a sign, so split on the first '=' after position 0
      const std::size_t eq = entry.find('=', 1);
      if (eq == std::string_view::npos) syntax("expected n=value in table entry", base);
      const std::int64_t n = parse_integer(entry.substr(0, eq), base);
      if (!values.emplace(n, parse_rational(entry.substr(eq + 1), base + eq + 1)).second)
        syntax("duplicate table index " + std::to_string(n), base);
      start = end + 1;
    }
    return values;
  }

  Param parse_param() {
    Param p;
    p.key_pos = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) p.key += text_[pos_++];
    if (p.key.empty()) syntax("expected key");
    expect('=');
    p.value_pos = pos_;
    if (accept('[')) {
      const std::size_t open = pos_;
      int depth = 1;
      while (pos_ < text_.size() && depth > 0) {
        if (text_[pos_] == '[') ++depth;
        if (text_[pos_] == ']') --depth;
        ++pos_;
      }
      if (depth != 0) syntax("unbalanced '['", p.value_pos);
      p.bracketed = text_.substr(open, pos_ - 1 - open);
    } else {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']') ++pos_;
      p.scalar = text_.substr(start, pos_ - start);
      if (p.scalar.empty()) syntax("expected value");
    }
    return p;
  }

  void expect(char c) {
    if (!accept(c)) syntax(std::string("expected '") + c + "'");
  }
  bool accept(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the weight-family DSL. Throws ParseError (syntax or semantic).
inline WeightFamily parse_family(std::string_view text) { return detail::FamilyParser(text).parse_all(); }

}  // namespace xeig
