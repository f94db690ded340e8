#pragma once

#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpir/multcode.hpp"
#include "mpir/unidecode.hpp"

namespace mpir {

using Rng = std::mt19937_64;

/// Resampling budget when random directions give a rank-deficient system.
inline constexpr unsigned kMaxDirectionRetries = 32;

/// sigma lines through a base point and their q-1 query points each.
struct LineQuerySet {
  Point base;
  std::vector<Point> directions;                 // U_1..U_sigma, normalized representatives
  std::vector<std::uint64_t> direction_classes;  // index into direction_class()
  std::vector<std::vector<Point>> query_points;  // [i][b-1] = base + alpha_b * U_i
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Builds the query set for explicit direction class indices (distinct).
LineQuerySet make_line_query_set(const CodeParams& params, std::span<const Elem> base,
                                 std::span<const std::uint64_t> direction_classes);

/// True when, for every derivative order e < s, the vectors (U_i^v)_{|v|=e}
/// span the space of order-e unknowns, so the coefficient system is solvable.
bool directions_solvable(const CodeParams& params, std::span<const Point> directions);

/// Samples sigma distinct direction classes uniformly without replacement,
/// from the transversal directions or from all classes, resampling (at most
/// kMaxDirectionRetries times) until directions_solvable holds.
LineQuerySet plan_lines(const CodeParams& params, std::span<const Elem> base, Rng& rng, bool transversal_only);

/// Samples direction class indices only (same law as plan_lines).
std::vector<std::uint64_t> sample_direction_classes(const CodeParams& params, Rng& rng, bool transversal_only);

/// value(b, e) = sum over |v| = e of (y_b)_v * U^v: the claimed e-th Hasse
/// derivative of F restricted to the line, at alpha_b.
LineWord side_values(const CodeParams& params, std::span<const EvalTuple> answers, std::span<const Elem> direction);

enum class RecoverStatus { ok, line_undecodable, singular_system, inconsistent_system };

const char* to_string(RecoverStatus status);

struct RecoverResult {
  RecoverStatus status = RecoverStatus::ok;
  EvalTuple value;              // ev^s at the base point when status == ok
  std::size_t failed_line = 0;  // first undecodable line
};

/// Decodes each line (Hermite interpolation, falling back to Berlekamp-Welch)
/// and solves the order-stratified system for the Hasse derivatives at the
/// base point. answers[i][b-1] is the symbol received for query_points[i][b-1].
RecoverResult recover_symbol(const CodeParams& params, const LineQuerySet& lines,
                             std::span<const std::vector<EvalTuple>> answers);

/// Full local self-correction against an oracle for the (possibly corrupted)
/// codeword.
using SymbolOracle = std::function<EvalTuple(const Point&)>;
RecoverResult local_decode(const CodeParams& params, std::uint64_t index, const SymbolOracle& oracle, Rng& rng,
                           bool transversal_only = false);

}  // namespace mpir
