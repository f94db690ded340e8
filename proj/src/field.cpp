#include "mpir/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace mpir {
namespace {

using Digits = std::vector<unsigned>;  // coefficients over GF(p), low first

Digits to_digits(std::uint32_t v, unsigned p, unsigned e) {
  Digits d(e, 0);
  for (unsigned i = 0; i < e; ++i) {
    d[i] = v % p;
    v /= p;
  }
  return d;
}

std::uint32_t from_digits(const Digits& d, unsigned p) {
  std::uint32_t v = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) v = v * p + *it;
  return v;
}

void trim(Digits& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

unsigned inv_mod_p(unsigned a, unsigned p) {
  // p is prime, so a^(p-2) is the inverse.
  std::uint64_t result = 1, base = a % p;
  for (unsigned n = p - 2; n; n >>= 1) {
    if (n & 1) result = result * base % p;
    base = base * base % p;
  }
  return static_cast<unsigned>(result);
}

// Remainder of a modulo b over GF(p); b must be nonzero after trimming.
Digits poly_mod(Digits a, Digits b, unsigned p) {
  trim(a);
  trim(b);
  const unsigned lead_inv = inv_mod_p(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t factor = std::uint64_t(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::uint64_t sub = factor * b[i] % p;
      a[shift + i] = static_cast<unsigned>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

Digits poly_mulmod(const Digits& a, const Digits& b, const Digits& modulus, unsigned p) {
  Digits prod(a.size() + b.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      prod[i + j] = static_cast<unsigned>((prod[i + j] + std::uint64_t(a[i]) * b[j]) % p);
  }
  Digits r = poly_mod(std::move(prod), modulus, p);
  r.resize(modulus.size() - 1, 0);
  return r;
}

std::vector<unsigned> prime_factors(unsigned n) {
  std::vector<unsigned> out;
  for (unsigned f = 2; f * f <= n; ++f) {
    if (n % f == 0) {
      out.push_back(f);
      while (n % f == 0) n /= f;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(unsigned n) {
  if (n < 2) return false;
  for (unsigned f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

bool is_irreducible(unsigned p, std::span<const unsigned> modulus) {
  Digits m(modulus.begin(), modulus.end());
  trim(m);
  if (m.size() < 2) return false;
  const unsigned e = static_cast<unsigned>(m.size() - 1);
  if (e == 1) return true;
  // Trial division by every monic polynomial of degree 1..e/2.
  for (unsigned deg = 1; deg <= e / 2; ++deg) {
    std::uint64_t count = 1;
    for (unsigned i = 0; i < deg; ++i) count *= p;
    for (std::uint64_t t = 0; t < count; ++t) {
      Digits divisor = to_digits(static_cast<std::uint32_t>(t), p, deg);
      divisor.push_back(1);
      if (poly_mod(m, divisor, p).empty()) return false;
    }
  }
  return true;
}

unsigned binom_mod_p(std::uint64_t j, std::uint64_t i, unsigned p) {
  if (i > j) return 0;
  std::uint64_t result = 1;
  while (j || i) {
    const unsigned jd = static_cast<unsigned>(j % p);
    const unsigned id = static_cast<unsigned>(i % p);
    if (id > jd) return 0;
    // C(jd, id) mod p with jd < p: multiplicative formula with inverses.
    std::uint64_t num = 1, den = 1;
    for (unsigned k = 0; k < id; ++k) {
      num = num * (jd - k) % p;
      den = den * (k + 1) % p;
    }
    result = result * num % p * inv_mod_p(static_cast<unsigned>(den), p) % p;
    j /= p;
    i /= p;
  }
  return static_cast<unsigned>(result);
}

Field::Field(unsigned p, unsigned e, std::vector<unsigned> modulus)
    : p_(p), e_(e), q_(1), modulus_(std::move(modulus)) {
  for (unsigned i = 0; i < e; ++i) q_ *= p;
  build_tables();
}

std::shared_ptr<const Field> Field::make(unsigned p, unsigned e) {
  if (!is_prime(p)) throw FieldError("characteristic " + std::to_string(p) + " is not prime");
  if (e < 1 || e > 16) throw FieldError("extension degree must be in [1, 16]");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < e; ++i) q *= p;
  if (q > 65536) throw FieldError("field order exceeds 2^16");

  if (p == 2 && e == 4) return with_modulus(p, e, {1, 1, 0, 0, 1});
  if (p == 2 && e == 8) return with_modulus(p, e, {1, 1, 0, 1, 1, 0, 0, 0, 1});

  for (std::uint64_t t = 0; t < q; ++t) {
    Digits candidate = to_digits(static_cast<std::uint32_t>(t), p, e);
    candidate.push_back(1);
    if (is_irreducible(p, candidate))
      return std::shared_ptr<const Field>(new Field(p, e, std::move(candidate)));
  }
  throw FieldError("no irreducible polynomial of degree " + std::to_string(e) + " found");
}

std::shared_ptr<const Field> Field::with_modulus(unsigned p, unsigned e, std::vector<unsigned> modulus) {
  if (!is_prime(p)) throw FieldError("characteristic " + std::to_string(p) + " is not prime");
  if (e < 1 || e > 16) throw FieldError("extension degree must be in [1, 16]");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < e; ++i) q *= p;
  if (q > 65536) throw FieldError("field order exceeds 2^16");
  if (modulus.size() != e + 1 || modulus.back() != 1)
    throw FieldError("modulus must be monic of degree " + std::to_string(e));
  for (unsigned c : modulus)
    if (c >= p) throw FieldError("modulus coefficient out of range");
  if (!is_irreducible(p, modulus)) throw FieldError("modulus is reducible");
  return std::shared_ptr<const Field>(new Field(p, e, std::move(modulus)));
}

void Field::build_tables() {
  const unsigned group = q_ - 1;
  log_.assign(q_, 0);
  exp_.assign(2 * std::max(group, 1u), 0);

  const auto factors = prime_factors(group);
  auto power = [&](const Digits& base, std::uint64_t n) {
    Digits result(e_, 0);
    result[0] = 1;
    Digits b = base;
    for (; n; n >>= 1) {
      if (n & 1) result = poly_mulmod(result, b, modulus_, p_);
      b = poly_mulmod(b, b, modulus_, p_);
    }
    return result;
  };

  std::uint32_t gen = 0;
  for (std::uint32_t cand = 1; cand < q_ && !gen; ++cand) {
    const Digits c = to_digits(cand, p_, e_);
    bool primitive = true;
    for (unsigned f : factors) {
      if (from_digits(power(c, group / f), p_) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) gen = cand;
  }
  if (!gen) throw FieldError("no multiplicative generator found");

  const Digits g = to_digits(gen, p_, e_);
  Digits cur(e_, 0);
  cur[0] = 1;
  for (unsigned i = 0; i < group; ++i) {
    const std::uint32_t v = from_digits(cur, p_);
    exp_[i] = static_cast<std::uint16_t>(v);
    exp_[i + group] = static_cast<std::uint16_t>(v);
    log_[v] = i;
    cur = poly_mulmod(cur, g, modulus_, p_);
  }

  if (p_ != 2 && e_ > 1) {
    zech_.assign(group, -1);
    for (unsigned n = 0; n < group; ++n) {
      const std::uint32_t v = exp_[n];
      const std::uint32_t c0 = v % p_;
      const std::uint32_t shifted = v - c0 + (c0 + 1) % p_;
      zech_[n] = shifted == 0 ? -1 : static_cast<std::int32_t>(log_[shifted]);
    }
  }
}

double Field::symbol_bits() const { return std::log2(static_cast<double>(q_)); }

unsigned Field::symbol_bytes() const {
  const unsigned bits = static_cast<unsigned>(std::bit_width(q_ - 1));
  return std::max(1u, (bits + 7) / 8);
}

Elem Field::alpha(std::uint32_t i) const {
  if (i >= q_) throw FieldError("element index " + std::to_string(i) + " out of range");
  return Elem{i};
}

Elem Field::from_int(std::int64_t n) const {
  const std::int64_t p = p_;
  return Elem{static_cast<std::uint32_t>(((n % p) + p) % p)};
}

Elem Field::add(Elem a, Elem b) const {
  if (p_ == 2) return Elem{static_cast<std::uint32_t>(a.value ^ b.value)};
  if (e_ == 1) return Elem{(static_cast<std::uint32_t>(a.value) + b.value) % p_};
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const unsigned group = q_ - 1;
  const unsigned la = log_[a.value];
  const unsigned r = (log_[b.value] + group - la) % group;
  const std::int32_t z = zech_[r];
  if (z < 0) return Elem{};
  return Elem{exp_[la + static_cast<unsigned>(z)]};
}

Elem Field::neg(Elem a) const {
  if (p_ == 2 || a.is_zero()) return a;
  if (e_ == 1) return Elem{p_ - a.value};
  return mul(a, Elem{exp_[(q_ - 1) / 2]});
}

Elem Field::inv(Elem a) const {
  if (a.is_zero()) throw FieldError("inversion of zero");
  const unsigned group = q_ - 1;
  return Elem{exp_[(group - log_[a.value]) % group]};
}

Elem Field::pow(Elem a, std::uint64_t n) const {
  if (n == 0) return Elem{1};
  if (a.is_zero()) return Elem{};
  const std::uint64_t group = q_ - 1;
  return Elem{exp_[static_cast<std::size_t>((log_[a.value] * (n % group)) % group)]};
}

std::string Field::describe() const {
  std::ostringstream os;
  os << "GF(" << p_;
  if (e_ > 1) os << "^" << e_;
  os << ") mod ";
  bool first = true;
  for (unsigned i = e_ + 1; i-- > 0;) {
    if (!modulus_[i]) continue;
    if (!first) os << "+";
    first = false;
    if (modulus_[i] != 1 || i == 0) os << modulus_[i];
    if (i > 0) os << "x";
    if (i > 1) os << "^" << i;
  }
  return os.str();
}

FieldElement::FieldElement(FieldPtr field, Elem value) : field_(std::move(field)), value_(value) {
  if (!field_) throw FieldError("null field");
  if (!field_->contains(value.value)) throw FieldError("element out of range");
}

void FieldElement::check_same(const FieldElement& rhs) const {
  if (field_ != rhs.field_ && !field_->same_as(*rhs.field_))
    throw FieldError("operands belong to different fields");
}

FieldElement FieldElement::operator+(const FieldElement& rhs) const {
  check_same(rhs);
  return {field_, field_->add(value_, rhs.value_)};
}

FieldElement FieldElement::operator-(const FieldElement& rhs) const {
  check_same(rhs);
  return {field_, field_->sub(value_, rhs.value_)};
}

FieldElement FieldElement::operator*(const FieldElement& rhs) const {
  check_same(rhs);
  return {field_, field_->mul(value_, rhs.value_)};
}

FieldElement FieldElement::operator/(const FieldElement& rhs) const {
  check_same(rhs);
  return {field_, field_->div(value_, rhs.value_)};
}

FieldElement FieldElement::operator-() const { return {field_, field_->neg(value_)}; }
FieldElement FieldElement::inv() const { return {field_, field_->inv(value_)}; }
FieldElement FieldElement::pow(std::uint64_t n) const { return {field_, field_->pow(value_, n)}; }

bool FieldElement::operator==(const FieldElement& rhs) const {
  check_same(rhs);
  return value_ == rhs.value_;
}

}  // namespace mpir
