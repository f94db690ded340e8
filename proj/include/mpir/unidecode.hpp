#pragma once

#include <optional>
#include <vector>

#include "mpir/field.hpp"
#include "mpir/linalg.hpp"
#include "mpir/mpoly.hpp"

namespace mpir {

/// Received word of a univariate multiplicity code of length q-1: for each
/// nonzero evaluation point alpha_1..alpha_{q-1}, the claimed Hasse
/// derivatives of orders 0..s-1.
struct LineWord {
  unsigned s = 1;
  std::vector<Elem> values;  // position-major, (q-1) * s

  std::size_t positions() const { return values.size() / s; }
  /// Value of order `order` at position `pos` (evaluation point alpha_{pos+1}).
  Elem at(std::size_t pos, unsigned order) const { return values[pos * s + order]; }
  Elem& at(std::size_t pos, unsigned order) { return values[pos * s + order]; }

  bool operator==(const LineWord&) const = default;
};

/// ev^s of g on alpha_1..alpha_{q-1}.
LineWord line_encode(const UniPoly& g, unsigned s);

/// Number of positions whose s-tuples differ.
std::size_t line_distance(const LineWord& a, const LineWord& b);

/// Decoding radius floor((n - d/s)/2) for n positions.
unsigned line_radius(std::size_t n, unsigned s, unsigned d);

class DecodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The unique g with deg g <= d matching every value of the word, found by
/// solving the s(q-1) x (d+1) confluent Vandermonde system. Returns nullopt
/// when the values are inconsistent with any such g. Throws DecodeError when
/// s(q-1) < d+1.
std::optional<UniPoly> hermite_interpolate(const FieldPtr& field, const LineWord& word, unsigned d);

/// Homogeneous key-equation system: unknowns are the coefficients of N
/// (numerator_degree+1 of them) followed by those of E (locator_degree+1);
/// one row per (position, order):
///   H^(e)N(alpha) = sum_{j<=e} H^(j)E(alpha) * y_{e-j}.
Matrix bw_system(const Field& field, const LineWord& word, unsigned numerator_degree, unsigned locator_degree);

struct BwBounds {
  unsigned numerator_degree;  // ceil((sn+d)/2)
  unsigned locator_degree;    // floor((sn-d)/2)
};

/// The widest degree bounds for N and E; these give at least sn+2 unknowns.
BwBounds bw_full_bounds(std::size_t n, unsigned s, unsigned d);

enum class BwStatus { decoded, failure, ambiguous };

struct BwResult {
  BwStatus status = BwStatus::failure;
  std::optional<UniPoly> poly;
  std::size_t errors = 0;  // positions where the word disagrees with poly
  /// When ambiguous: every codeword found within the radius.
  std::vector<UniPoly> candidates;
};

/// Berlekamp-Welch decoding of a univariate multiplicity code with
/// multiplicity s = word.s and degree bound d. Succeeds whenever the word is
/// within line_radius(n, s, d) positions of a unique codeword.
BwResult bw_decode(const FieldPtr& field, const LineWord& word, unsigned d);

}  // namespace mpir
