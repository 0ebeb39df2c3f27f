#pragma once

#include <opmeans/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace opmeans {

// ---------------------------------------------------------------------------
// Polynomial field on R^n: a finite sum of real-coefficient monomials
// x^e = x1^e1 ... xn^en.  The Laplacian is symbolic and exact, which makes
// this the reference field type for closed-form checks.
// ---------------------------------------------------------------------------
class PolyField {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, double>;

  PolyField(int dim, TermMap terms) : dim_(dim), terms_(std::move(terms)) {
    if (dim_ < 1) throw InvalidArgument("PolyField: dimension must be >= 1");
    for (const auto& [e, c] : terms_) {
      if (static_cast<int>(e.size()) != dim_)
        throw InvalidArgument("PolyField: exponent arity does not match dimension");
      for (int p : e)
        if (p < 0) throw InvalidArgument("PolyField: negative exponent");
      if (!std::isfinite(c)) throw InvalidArgument("PolyField: non-finite coefficient");
    }
    prune();
  }

  static PolyField zero(int dim) { return PolyField(dim, TermMap{}); }

  static PolyField constant(int dim, double c) {
    TermMap t;
    t[Exponents(static_cast<size_t>(dim), 0)] = c;
    return PolyField(dim, std::move(t));
  }

  // |x|^2 = x1^2 + ... + xn^2, a convenient closed-form test subject.
  static PolyField norm_squared(int dim) {
    TermMap t;
    for (int i = 0; i < dim; ++i) {
      Exponents e(static_cast<size_t>(dim), 0);
      e[static_cast<size_t>(i)] = 2;
      t[e] = 1.0;
    }
    return PolyField(dim, std::move(t));
  }

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }

  double evaluate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw InvalidArgument("PolyField::evaluate: point arity mismatch");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double m = c;
      for (int i = 0; i < dim_; ++i)
        for (int p = 0; p < e[static_cast<size_t>(i)]; ++p) m *= x[static_cast<size_t>(i)];
      acc += m;
    }
    return acc;
  }

  PolyField laplacian() const {
    TermMap out;
    for (const auto& [e, c] : terms_) {
      for (int i = 0; i < dim_; ++i) {
        const int p = e[static_cast<size_t>(i)];
        if (p < 2) continue;
        Exponents d = e;
        d[static_cast<size_t>(i)] = p - 2;
        out[d] += c * p * (p - 1);
      }
    }
    return PolyField(dim_, std::move(out));
  }

  PolyField scaled(double s) const {
    TermMap out = terms_;
    for (auto& [e, c] : out) c *= s;
    return PolyField(dim_, std::move(out));
  }

  PolyField plus(const PolyField& o, double weight = 1.0) const {
    if (o.dim_ != dim_) throw InvalidArgument("PolyField::plus: dimension mismatch");
    TermMap out = terms_;
    for (const auto& [e, c] : o.terms_) out[e] += weight * c;
    return PolyField(dim_, std::move(out));
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  bool is_zero() const { return terms_.empty(); }

  bool operator==(const PolyField& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int t = 0;
      for (int p : e) t += p;
      d = std::max(d, t);
    }
    return d;
  }

  // --- JSON round-trip: {"dim": n, "terms": [{"exp": [...], "coef": c}]} ---

  nlohmann::json to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : terms_) terms.push_back({{"exp", e}, {"coef", c}});
    return {{"dim", dim_}, {"terms", terms}};
  }

  static PolyField from_json(const nlohmann::json& j) {
    try {
      const int dim = j.at("dim").get<int>();
      TermMap t;
      for (const auto& term : j.at("terms")) {
        auto e = term.at("exp").get<Exponents>();
        t[std::move(e)] += term.at("coef").get<double>();
      }
      return PolyField(dim, std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("PolyField JSON: ") + e.what());
    }
  }

 private:
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->second == 0.0) ? terms_.erase(it) : std::next(it);
  }

  int dim_;
  TermMap terms_;
};

}  // namespace opmeans
