#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpir {

/// A field symbol. `value` is the index i of the enumerated element α_i,
/// i.e. the element's coefficient vector over GF(p) read as a base-p integer.
struct Elem {
  std::uint16_t value = 0;

  constexpr Elem() = default;
  constexpr explicit Elem(std::uint32_t v) : value(static_cast<std::uint16_t>(v)) {}

  constexpr bool is_zero() const { return value == 0; }
  friend constexpr auto operator<=>(Elem, Elem) = default;
};

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GF(p^e) with q <= 2^16, backed by log/antilog tables.
///
/// Immutable after construction. Arithmetic is on `Elem`, whose integer value
/// is the base-p reading of the coefficient vector (constant term least
/// significant), so α_0 = 0, α_1 = 1 and the enumeration is canonical.
class Field {
 public:
  /// Builds GF(p^e) with the canonical modulus (x^4+x+1 for GF(16),
  /// x^8+x^4+x^3+x+1 for GF(256), otherwise the smallest monic irreducible).
  static std::shared_ptr<const Field> make(unsigned p, unsigned e);

  /// Builds GF(p^e) from an explicit modulus, low coefficient first.
  /// The modulus must be monic of degree e and irreducible.
  static std::shared_ptr<const Field> with_modulus(unsigned p, unsigned e,
                                                   std::vector<unsigned> modulus);

  unsigned characteristic() const { return p_; }
  unsigned degree() const { return e_; }
  unsigned order() const { return q_; }
  std::span<const unsigned> modulus() const { return modulus_; }

  /// Bits of information carried by one symbol (log2 q).
  double symbol_bits() const;
  /// Bytes one symbol occupies in files and on the wire (ceil(log2 q / 8)).
  unsigned symbol_bytes() const;

  bool same_as(const Field& other) const {
    return p_ == other.p_ && e_ == other.e_ && modulus_ == other.modulus_;
  }

  Elem alpha(std::uint32_t i) const;
  bool contains(std::uint32_t raw) const { return raw < q_; }
  /// Image of an integer in the prime subfield.
  Elem from_int(std::int64_t n) const;

  Elem add(Elem a, Elem b) const;
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem neg(Elem a) const;
  Elem mul(Elem a, Elem b) const {
    if (a.is_zero() || b.is_zero()) return Elem{};
    return Elem{exp_[log_[a.value] + log_[b.value]]};
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t n) const;

  /// The fixed multiplicative generator used for the tables.
  Elem generator() const { return Elem{exp_[1]}; }

  std::string describe() const;

 private:
  Field(unsigned p, unsigned e, std::vector<unsigned> modulus);
  void build_tables();

  unsigned p_;
  unsigned e_;
  unsigned q_;
  std::vector<unsigned> modulus_;
  std::vector<std::uint16_t> exp_;  // length 2(q-1)
  std::vector<std::uint32_t> log_;  // log_[0] unused
  std::vector<std::int32_t> zech_;  // log(1 + g^n), -1 when 1 + g^n = 0; odd p, e > 1 only
};

using FieldPtr = std::shared_ptr<const Field>;

inline FieldPtr make_field(unsigned p, unsigned e) { return Field::make(p, e); }

/// True when `modulus` (low coefficient first, monic) is irreducible over GF(p).
bool is_irreducible(unsigned p, std::span<const unsigned> modulus);

bool is_prime(unsigned n);

/// C(j, i) reduced modulo the prime p (Lucas' theorem). Zero when i > j.
unsigned binom_mod_p(std::uint64_t j, std::uint64_t i, unsigned p);

/// Field element bound to its field. Mixing elements of different fields
/// throws FieldError.
class FieldElement {
 public:
  FieldElement(FieldPtr field, Elem value);
  FieldElement(FieldPtr field, std::uint32_t raw) : FieldElement(std::move(field), Elem{raw}) {}

  const FieldPtr& field() const { return field_; }
  Elem value() const { return value_; }

  FieldElement operator+(const FieldElement& rhs) const;
  FieldElement operator-(const FieldElement& rhs) const;
  FieldElement operator*(const FieldElement& rhs) const;
  FieldElement operator/(const FieldElement& rhs) const;
  FieldElement operator-() const;
  FieldElement inv() const;
  FieldElement pow(std::uint64_t n) const;

  bool operator==(const FieldElement& rhs) const;

 private:
  void check_same(const FieldElement& rhs) const;

  FieldPtr field_;
  Elem value_;
};

}  // namespace mpir
