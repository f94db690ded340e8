#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpir/field.hpp"
#include "mpir/mpoly.hpp"

namespace mpir {

class ParamsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact C(n, k); throws ParamsError if the result does not fit in 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Checked integer power.
std::uint64_t ipow(std::uint64_t base, unsigned exp);

/// Parameters of the multiplicity code Mult^s_d over F_q^m and its derived
/// quantities.
struct CodeParams {
  FieldPtr field;
  unsigned m = 0;  // variables
  unsigned s = 0;  // derivative order
  unsigned d = 0;  // degree bound
  std::uint64_t sigma = 0;  // C(m+s-1, m): derivatives per symbol
  std::uint64_t k = 0;      // C(m+d, m): message symbols
  std::uint64_t n = 0;      // q^m: code length
  double rate = 0;          // k / (sigma n)
  double distance_bound = 0;  // q^m - (d/s) q^(m-1)
  unsigned nu = 0;            // floor((q-1-d/s)/2), Byzantine servers tolerated
  /// The sigma multi-indices v with |v| < s, in graded-lex order. This is the
  /// coordinate order of every EvalTuple.
  std::vector<Monomial> derivative_orders;

  unsigned q() const { return field->order(); }
  /// Points per hyperplane, q^(m-1).
  std::uint64_t hyperplane_size() const { return n / q(); }
  /// Line decoding radius on the q-1 points off the target.
  unsigned line_radius() const { return nu; }
  bool fits_transversal_lines() const { return sigma <= hyperplane_size(); }

  bool operator==(const CodeParams& rhs) const {
    return field->same_as(*rhs.field) && m == rhs.m && s == rhs.s && d == rhs.d;
  }
};

/// Code-level validation only: m >= 1, s >= 1, d < s(q-1).
CodeParams make_code_params(FieldPtr field, unsigned m, unsigned s, unsigned d);

/// Code-level validation plus the protocol constraint sigma <= q^(m-1)
/// (enough transversal lines through every point).
CodeParams make_params(FieldPtr field, unsigned m, unsigned s, unsigned d);

/// One codeword symbol: the sigma Hasse derivatives at a point, ordered like
/// CodeParams::derivative_orders.
using EvalTuple = std::vector<Elem>;

/// Canonical point order: index = sum_k x_k q^k over coordinate enumeration
/// values, so the first coordinate varies fastest and each hyperplane
/// {x_m = alpha_l} is one contiguous block.
std::uint64_t point_index(const CodeParams& params, std::span<const Elem> point);
Point index_point(const CodeParams& params, std::uint64_t index);

/// Index of the hyperplane H_l = {x : x_m = alpha_l} containing the point.
unsigned hyperplane_of(const CodeParams& params, std::span<const Elem> point);
/// Position of a point inside its hyperplane (reads x_1..x_{m-1}).
std::uint64_t local_index(const CodeParams& params, std::span<const Elem> point);
Point hyperplane_point(const CodeParams& params, unsigned hyperplane, std::uint64_t local);

struct Codeword {
  CodeParams params;
  std::vector<Elem> symbols;  // n * sigma, point-major

  std::span<const Elem> at(std::uint64_t index) const {
    return std::span<const Elem>(symbols).subspan(index * params.sigma, params.sigma);
  }
  EvalTuple tuple(std::uint64_t index) const {
    auto s = at(index);
    return {s.begin(), s.end()};
  }
};

/// What one server stores: the codeword restricted to H_l.
struct Share {
  CodeParams params;
  unsigned hyperplane = 0;
  std::vector<Elem> symbols;  // q^(m-1) * sigma, canonical local order

  std::span<const Elem> at(std::uint64_t local) const {
    return std::span<const Elem>(symbols).subspan(local * params.sigma, params.sigma);
  }
  bool operator==(const Share& rhs) const {
    return params == rhs.params && hyperplane == rhs.hyperplane && symbols == rhs.symbols;
  }
};

/// Values of f at every point of F_q^m, in canonical point order.
std::vector<Elem> evaluate_on_grid(const MultiPoly& f);

/// ev^s: the tuple of Hasse derivatives of order < s at every point.
Codeword encode(const CodeParams& params, const MultiPoly& f);

/// Recovers the message polynomial from a full codeword by solving the
/// evaluation system; nullopt when the word is not a codeword.
std::optional<MultiPoly> decode_codeword(const Codeword& cw);

std::vector<Share> partition(const Codeword& cw);
Codeword concatenate(std::span<const Share> shares);

/// Transversal directions are (u_1, ..., u_{m-1}, 1); there are q^(m-1).
std::uint64_t transversal_direction_count(const CodeParams& params);
Point transversal_direction(const CodeParams& params, std::uint64_t index);

/// All direction classes of F_q^m, normalized so the last nonzero coordinate
/// is 1. The first q^(m-1) classes are exactly the transversal directions, in
/// the same order as transversal_direction().
std::uint64_t direction_class_count(const CodeParams& params);
Point direction_class(const CodeParams& params, std::uint64_t index);

/// One row of the scheme properties table. Communication in bits.
struct SchemeRow {
  unsigned q = 0, m = 0, s = 0, d = 0;
  std::uint64_t k = 0;
  std::uint64_t sigma = 0;
  std::uint64_t queries = 0;  // LDC-locality (q-1) sigma
  std::uint64_t servers = 0;  // PIR-locality q
  double rate = 0;
  double std_overhead = 0;   // (q-1)/R
  double ours_overhead = 0;  // 1/R
  double std_comm_bits = 0;  // (q-1) sigma (m+sigma) log2 q
  double ours_comm_bits = 0; // (m-1+sigma) q sigma log2 q
  bool deployable = false;   // sigma <= q^(m-1): enough transversal lines
};

/// Computes the table row; validates d < s(q-1) but reports the transversal
/// line constraint through `deployable` instead of rejecting.
SchemeRow scheme_table(FieldPtr field, unsigned m, unsigned s, unsigned d);

}  // namespace mpir
