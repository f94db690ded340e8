#include "mpir/mpoly.hpp"

#include <algorithm>
#include <numeric>

namespace mpir {
namespace {

bool is_zero_direction(std::span<const Elem> v) {
  return std::all_of(v.begin(), v.end(), [](Elem e) { return e.is_zero(); });
}

void check_point(const MultiPoly& f, std::span<const Elem> p, const char* what) {
  if (p.size() != f.vars())
    throw PolyError(std::string(what) + " has " + std::to_string(p.size()) + " coordinates, expected " +
                    std::to_string(f.vars()));
  for (Elem e : p)
    if (!f.field()->contains(e.value)) throw PolyError(std::string(what) + " coordinate outside the field");
}

void gen_degree(unsigned vars, unsigned remaining, Monomial& cur, unsigned pos, std::vector<Monomial>& out) {
  if (pos + 1 == vars) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (unsigned a = remaining + 1; a-- > 0;) {
    cur[pos] = a;
    gen_degree(vars, remaining - a, cur, pos + 1, out);
  }
}

}  // namespace

unsigned total_degree(const Monomial& j) { return std::accumulate(j.begin(), j.end(), 0u); }

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<Monomial> monomials_of_degree(unsigned vars, unsigned degree) {
  std::vector<Monomial> out;
  if (vars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  Monomial cur(vars, 0);
  gen_degree(vars, degree, cur, 0, out);
  return out;
}

std::vector<Monomial> monomials_up_to(unsigned vars, unsigned max_degree) {
  std::vector<Monomial> out;
  for (unsigned d = 0; d <= max_degree; ++d) {
    auto level = monomials_of_degree(vars, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// ---- UniPoly ----

UniPoly::UniPoly(FieldPtr field, std::vector<Elem> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  trim();
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Elem UniPoly::eval(Elem t) const {
  Elem acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = field_->add(field_->mul(acc, t), *it);
  return acc;
}

UniPoly UniPoly::hasse_derivative(unsigned order) const {
  std::vector<Elem> out;
  if (coeffs_.size() > order) {
    out.resize(coeffs_.size() - order);
    const unsigned p = field_->characteristic();
    for (std::size_t c = order; c < coeffs_.size(); ++c)
      out[c - order] = field_->mul(coeffs_[c], field_->from_int(binom_mod_p(c, order, p)));
  }
  return UniPoly(field_, std::move(out));
}

Elem UniPoly::hasse_eval(unsigned order, Elem t) const {
  const unsigned p = field_->characteristic();
  Elem acc{};
  for (std::size_t c = coeffs_.size(); c-- > order;) {
    const Elem term = field_->mul(coeffs_[c], field_->from_int(binom_mod_p(c, order, p)));
    acc = field_->add(field_->mul(acc, t), term);
  }
  return acc;
}

UniPoly UniPoly::operator+(const UniPoly& rhs) const {
  std::vector<Elem> out(std::max(coeffs_.size(), rhs.coeffs_.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field_->add(coeff(i), rhs.coeff(i));
  return UniPoly(field_, std::move(out));
}

UniPoly UniPoly::operator-(const UniPoly& rhs) const {
  std::vector<Elem> out(std::max(coeffs_.size(), rhs.coeffs_.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field_->sub(coeff(i), rhs.coeff(i));
  return UniPoly(field_, std::move(out));
}

UniPoly UniPoly::operator*(const UniPoly& rhs) const {
  if (is_zero() || rhs.is_zero()) return UniPoly(field_);
  std::vector<Elem> out(coeffs_.size() + rhs.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j)
      out[i + j] = field_->add(out[i + j], field_->mul(coeffs_[i], rhs.coeffs_[j]));
  }
  return UniPoly(field_, std::move(out));
}

UniPoly UniPoly::scaled(Elem c) const {
  std::vector<Elem> out(coeffs_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = field_->mul(coeffs_[i], c);
  return UniPoly(field_, std::move(out));
}

std::pair<UniPoly, UniPoly> UniPoly::divmod(const UniPoly& divisor) const {
  if (divisor.is_zero()) throw PolyError("division by the zero polynomial");
  std::vector<Elem> rem = coeffs_;
  const std::size_t dn = divisor.coeffs_.size();
  if (rem.size() < dn) return {UniPoly(field_), *this};
  std::vector<Elem> quot(rem.size() - dn + 1);
  const Elem lead_inv = field_->inv(divisor.coeffs_.back());
  for (std::size_t k = quot.size(); k-- > 0;) {
    const Elem factor = field_->mul(rem[k + dn - 1], lead_inv);
    quot[k] = factor;
    if (factor.is_zero()) continue;
    for (std::size_t i = 0; i < dn; ++i)
      rem[k + i] = field_->sub(rem[k + i], field_->mul(factor, divisor.coeffs_[i]));
  }
  rem.resize(dn - 1);
  return {UniPoly(field_, std::move(quot)), UniPoly(field_, std::move(rem))};
}

// ---- MultiPoly ----

int MultiPoly::degree() const {
  int deg = -1;
  for (const auto& [j, c] : terms_) deg = std::max(deg, static_cast<int>(total_degree(j)));
  return deg;
}

Elem MultiPoly::coeff(const Monomial& j) const {
  auto it = terms_.find(j);
  return it == terms_.end() ? Elem{} : it->second;
}

void MultiPoly::set(const Monomial& j, Elem c) {
  if (j.size() != vars_) throw PolyError("monomial dimension mismatch");
  if (!field_->contains(c.value)) throw PolyError("coefficient outside the field");
  if (c.is_zero())
    terms_.erase(j);
  else
    terms_[j] = c;
}

void MultiPoly::add_term(const Monomial& j, Elem c) { set(j, field_->add(coeff(j), c)); }

void MultiPoly::check_compatible(const MultiPoly& rhs) const {
  if (vars_ != rhs.vars_) throw PolyError("variable count mismatch");
  if (field_ != rhs.field_ && !field_->same_as(*rhs.field_)) throw PolyError("field mismatch");
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
  check_compatible(rhs);
  MultiPoly out = *this;
  for (const auto& [j, c] : rhs.terms_) out.add_term(j, c);
  return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& rhs) const {
  check_compatible(rhs);
  MultiPoly out = *this;
  for (const auto& [j, c] : rhs.terms_) out.add_term(j, field_->neg(c));
  return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& rhs) const {
  check_compatible(rhs);
  MultiPoly out(field_, vars_);
  Monomial sum(vars_);
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : rhs.terms_) {
      for (unsigned k = 0; k < vars_; ++k) sum[k] = a[k] + b[k];
      out.add_term(sum, field_->mul(ca, cb));
    }
  }
  return out;
}

MultiPoly MultiPoly::scaled(Elem c) const {
  MultiPoly out(field_, vars_);
  for (const auto& [j, v] : terms_) out.set(j, field_->mul(v, c));
  return out;
}

bool MultiPoly::operator==(const MultiPoly& rhs) const {
  return vars_ == rhs.vars_ && field_->same_as(*rhs.field_) && terms_ == rhs.terms_;
}

MultiPoly MultiPoly::constant(FieldPtr field, unsigned vars, Elem c) {
  MultiPoly out(std::move(field), vars);
  out.set(Monomial(vars, 0), c);
  return out;
}

MultiPoly MultiPoly::variable(FieldPtr field, unsigned vars, unsigned index) {
  if (index >= vars) throw PolyError("variable index out of range");
  MultiPoly out(std::move(field), vars);
  Monomial j(vars, 0);
  j[index] = 1;
  out.set(j, Elem{1});
  return out;
}

// ---- free functions ----

MultiPoly hasse_derivative(const MultiPoly& f, const Monomial& i) {
  if (i.size() != f.vars()) throw PolyError("derivative multi-index dimension mismatch");
  const Field& field = *f.field();
  const unsigned p = field.characteristic();
  MultiPoly out(f.field(), f.vars());
  Monomial shifted(f.vars());
  for (const auto& [j, c] : f.terms()) {
    unsigned coef = 1;
    bool dominates = true;
    for (unsigned k = 0; k < f.vars() && coef; ++k) {
      if (j[k] < i[k]) {
        dominates = false;
        break;
      }
      coef = coef * binom_mod_p(j[k], i[k], p) % p;
      shifted[k] = j[k] - i[k];
    }
    if (!dominates || coef == 0) continue;
    out.add_term(shifted, field.mul(c, field.from_int(coef)));
  }
  return out;
}

Elem monomial_value(const Field& field, const Monomial& j, std::span<const Elem> v) {
  Elem acc{1};
  for (std::size_t k = 0; k < j.size(); ++k)
    if (j[k]) acc = field.mul(acc, field.pow(v[k], j[k]));
  return acc;
}

Elem eval(const MultiPoly& f, std::span<const Elem> point) {
  check_point(f, point, "point");
  const Field& field = *f.field();
  const int deg = std::max(f.degree(), 0);
  // powers[k][e] = P_k^e
  std::vector<std::vector<Elem>> powers(f.vars(), std::vector<Elem>(deg + 1));
  for (unsigned k = 0; k < f.vars(); ++k) {
    powers[k][0] = Elem{1};
    for (int e = 1; e <= deg; ++e) powers[k][e] = field.mul(powers[k][e - 1], point[k]);
  }
  Elem acc{};
  for (const auto& [j, c] : f.terms()) {
    Elem term = c;
    for (unsigned k = 0; k < f.vars(); ++k) term = field.mul(term, powers[k][j[k]]);
    acc = field.add(acc, term);
  }
  return acc;
}

UniPoly restrict_to_line(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction) {
  check_point(f, base, "base point");
  check_point(f, direction, "direction");
  if (is_zero_direction(direction)) throw PolyError("zero direction");
  const FieldPtr& field = f.field();
  const int deg = std::max(f.degree(), 0);

  // linear_powers[k][e] = (P_k + V_k T)^e, built by repeated multiplication.
  std::vector<std::vector<UniPoly>> linear_powers(f.vars());
  for (unsigned k = 0; k < f.vars(); ++k) {
    const UniPoly linear(field, {base[k], direction[k]});
    auto& row = linear_powers[k];
    row.reserve(deg + 1);
    row.emplace_back(field, std::vector<Elem>{Elem{1}});
    for (int e = 1; e <= deg; ++e) row.push_back(row.back() * linear);
  }

  std::vector<Elem> acc(deg + 1);
  for (const auto& [j, c] : f.terms()) {
    UniPoly term(field, {c});
    for (unsigned k = 0; k < f.vars(); ++k)
      if (j[k]) term = term * linear_powers[k][j[k]];
    for (std::size_t e = 0; e < term.coeffs().size(); ++e) acc[e] = field->add(acc[e], term.coeffs()[e]);
  }
  return UniPoly(field, std::move(acc));
}

Elem line_coeff_identity(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction,
                         unsigned i) {
  check_point(f, base, "base point");
  check_point(f, direction, "direction");
  if (is_zero_direction(direction)) throw PolyError("zero direction");
  const Field& field = *f.field();
  Elem acc{};
  for (const Monomial& j : monomials_of_degree(f.vars(), i)) {
    const Elem d = eval(hasse_derivative(f, j), base);
    acc = field.add(acc, field.mul(d, monomial_value(field, j, direction)));
  }
  return acc;
}

Elem line_hasse_identity(const MultiPoly& f, std::span<const Elem> base, std::span<const Elem> direction,
                         unsigned i, Elem alpha) {
  check_point(f, base, "base point");
  check_point(f, direction, "direction");
  if (is_zero_direction(direction)) throw PolyError("zero direction");
  const Field& field = *f.field();
  Point shifted(f.vars());
  for (unsigned k = 0; k < f.vars(); ++k) shifted[k] = field.add(base[k], field.mul(alpha, direction[k]));
  return line_coeff_identity(f, shifted, direction, i);
}

}  // namespace mpir
