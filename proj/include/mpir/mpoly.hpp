#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpir/field.hpp"

namespace mpir {

/// Exponent vector j = (j_1, ..., j_m) of a monomial X^j.
using Monomial = std::vector<unsigned>;
/// A point of F_q^m.
using Point = std::vector<Elem>;

unsigned total_degree(const Monomial& j);

/// Graded lexicographic order: lower total degree first, then the monomial
/// with the larger leading exponent first (1, X1, X2, X1^2, X1X2, X2^2, ...).
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// All monomials in `vars` variables of total degree exactly `degree`,
/// in graded-lex order.
std::vector<Monomial> monomials_of_degree(unsigned vars, unsigned degree);
/// All monomials of total degree <= `max_degree`, in graded-lex order.
std::vector<Monomial> monomials_up_to(unsigned vars, unsigned max_degree);

class PolyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense univariate polynomial; coeffs_[i] multiplies T^i. Trimmed so the
/// last coefficient is nonzero (the zero polynomial is empty).
class UniPoly {
 public:
  explicit UniPoly(FieldPtr field) : field_(std::move(field)) {}
  UniPoly(FieldPtr field, std::vector<Elem> coeffs);

  const FieldPtr& field() const { return field_; }
  std::span<const Elem> coeffs() const { return coeffs_; }
  /// Coefficient of T^i (zero past the end).
  Elem coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Elem{}; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  Elem eval(Elem t) const;
  UniPoly hasse_derivative(unsigned order) const;
  /// The order-th Hasse derivative evaluated at t, without building it.
  Elem hasse_eval(unsigned order, Elem t) const;

  UniPoly operator+(const UniPoly& rhs) const;
  UniPoly operator-(const UniPoly& rhs) const;
  UniPoly operator*(const UniPoly& rhs) const;
  UniPoly scaled(Elem c) const;

  /// Long division; returns {quotient, remainder}. Throws on zero divisor.
  std::pair<UniPoly, UniPoly> divmod(const UniPoly& divisor) const;

  bool operator==(const UniPoly& rhs) const { return coeffs_ == rhs.coeffs_; }

 private:
  void trim();

  FieldPtr field_;
  std::vector<Elem> coeffs_;
};

/// Sparse multivariate polynomial over GF(q); zero coefficients are never stored.
class MultiPoly {
 public:
  using Terms = std::map<Monomial, Elem, GradedLexLess>;

  MultiPoly(FieldPtr field, unsigned vars) : field_(std::move(field)), vars_(vars) {}

  const FieldPtr& field() const { return field_; }
  unsigned vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;

  Elem coeff(const Monomial& j) const;
  void set(const Monomial& j, Elem c);
  void add_term(const Monomial& j, Elem c);

  MultiPoly operator+(const MultiPoly& rhs) const;
  MultiPoly operator-(const MultiPoly& rhs) const;
  MultiPoly operator*(const MultiPoly& rhs) const;
  MultiPoly scaled(Elem c) const;

  bool operator==(const MultiPoly& rhs) const;

  static MultiPoly constant(FieldPtr field, unsigned vars, Elem c);
  /// The single variable X_{index} (0-based).
  static MultiPoly variable(FieldPtr field, unsigned vars, unsigned index);

 private:
  void check_compatible(const MultiPoly& rhs) const;

  FieldPtr field_;
  unsigned vars_;
  Terms terms_;
};

/// F^{(i)} = sum over j >> i of f_j * C(j, i) * X^{j-i}.
MultiPoly hasse_derivative(const MultiPoly& f, const Monomial& i);

/// F(P).
Elem eval(const MultiPoly& f, std::span<const Elem> point);

/// F(P + T*V) as a univariate polynomial in T, by substitution and expansion.
UniPoly restrict_to_line(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction);

/// sum over |j| = i of F^{(j)}(P) V^j: the coefficient of T^i of F(P + T*V).
Elem line_coeff_identity(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction,
                         unsigned i);

/// sum over |j| = i of F^{(j)}(P + alpha*V) V^j: the i-th Hasse derivative of
/// F(P + T*V) at T = alpha.
Elem line_hasse_identity(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction,
                         unsigned i, Elem alpha);

/// V^j = prod_k v_k^{j_k}.
Elem monomial_value(const Field& field, const Monomial& j, std::span<const Elem> v);

}  // namespace mpir
