#include "mpir/unidecode.hpp"

#include <algorithm>
#include <span>
#include <string>

namespace mpir {
namespace {

// Projective combinations of the kernel basis tried at the decoding boundary.
constexpr std::uint64_t kMaxKernelCombinations = 1u << 16;
// Erasure patterns tried when the kernel is too large to enumerate.
constexpr std::uint64_t kMaxErasurePatterns = 1u << 14;

// pow_table[k] = alpha^k for k <= max_exp.
std::vector<Elem> powers_of(const Field& field, Elem alpha, unsigned max_exp) {
  std::vector<Elem> out(max_exp + 1);
  out[0] = Elem{1};
  for (unsigned k = 1; k <= max_exp; ++k) out[k] = field.mul(out[k - 1], alpha);
  return out;
}

// C(c, e) alpha^(c-e): the weight of coefficient c in the e-th Hasse derivative at alpha.
Elem hasse_weight(const Field& field, const std::vector<Elem>& pw, unsigned c, unsigned e) {
  if (c < e) return Elem{};
  const unsigned b = binom_mod_p(c, e, field.characteristic());
  if (!b) return Elem{};
  return field.mul(field.from_int(b), pw[c - e]);
}

std::optional<UniPoly> candidate_from(const FieldPtr& field, const std::vector<Elem>& v, unsigned numerator_degree,
                                      unsigned d) {
  const auto split = v.begin() + numerator_degree + 1;
  const UniPoly num(field, std::vector<Elem>(v.begin(), split));
  const UniPoly loc(field, std::vector<Elem>(split, v.end()));
  if (loc.is_zero()) return std::nullopt;
  auto [quot, rem] = num.divmod(loc);
  if (!rem.is_zero() || quot.degree() > static_cast<int>(d)) return std::nullopt;
  return quot;
}

}  // namespace

LineWord line_encode(const UniPoly& g, unsigned s) {
  const Field& field = *g.field();
  const unsigned n = field.order() - 1;
  LineWord w{s, std::vector<Elem>(static_cast<std::size_t>(n) * s)};
  for (unsigned pos = 0; pos < n; ++pos)
    for (unsigned e = 0; e < s; ++e) w.at(pos, e) = g.hasse_eval(e, Elem{pos + 1});
  return w;
}

std::size_t line_distance(const LineWord& a, const LineWord& b) {
  if (a.s != b.s || a.values.size() != b.values.size()) throw DecodeError("line words have different shapes");
  std::size_t dist = 0;
  for (std::size_t pos = 0; pos < a.positions(); ++pos) {
    for (unsigned e = 0; e < a.s; ++e) {
      if (a.at(pos, e) != b.at(pos, e)) {
        ++dist;
        break;
      }
    }
  }
  return dist;
}

unsigned line_radius(std::size_t n, unsigned s, unsigned d) {
  const std::uint64_t total = static_cast<std::uint64_t>(s) * n;
  if (total <= d) return 0;
  return static_cast<unsigned>((total - d) / (2ull * s));
}

namespace {

// Hermite interpolation through the listed positions only.
std::optional<UniPoly> hermite_on(const FieldPtr& field, const LineWord& word, std::span<const std::size_t> positions,
                                  unsigned d) {
  Matrix a(word.s * positions.size(), d + 1);
  std::vector<Elem> rhs(a.rows());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const std::size_t pos = positions[i];
    const auto pw = powers_of(*field, Elem{static_cast<std::uint32_t>(pos + 1)}, d);
    for (unsigned e = 0; e < word.s; ++e) {
      const std::size_t row = i * word.s + e;
      rhs[row] = word.at(pos, e);
      for (unsigned c = e; c <= d; ++c) a.at(row, c) = hasse_weight(*field, pw, c, e);
    }
  }
  const LinearSolution sol = solve(*field, a, rhs);
  if (sol.status == SolveStatus::inconsistent) return std::nullopt;
  if (sol.status == SolveStatus::underdetermined) throw DecodeError("confluent Vandermonde system is singular");
  return UniPoly(field, sol.x);
}

// C(n, k), saturating at limit + 1.
std::uint64_t capped_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t limit) {
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > limit) return limit + 1;
  }
  return c;
}

}  // namespace

std::optional<UniPoly> hermite_interpolate(const FieldPtr& field, const LineWord& word, unsigned d) {
  const std::size_t n = word.positions();
  if (static_cast<std::uint64_t>(word.s) * n < static_cast<std::uint64_t>(d) + 1)
    throw DecodeError("Hermite interpolation underdetermined: " + std::to_string(word.s * n) + " values for " +
                      std::to_string(d + 1) + " coefficients");
  std::vector<std::size_t> all(n);
  for (std::size_t pos = 0; pos < n; ++pos) all[pos] = pos;
  return hermite_on(field, word, all, d);
}

Matrix bw_system(const Field& field, const LineWord& word, unsigned numerator_degree, unsigned locator_degree) {
  const std::size_t n = word.positions();
  const unsigned s = word.s;
  const std::size_t loc0 = numerator_degree + 1;
  Matrix a(s * n, loc0 + locator_degree + 1);
  const unsigned max_exp = std::max(numerator_degree, locator_degree);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto pw = powers_of(field, Elem{static_cast<std::uint32_t>(pos + 1)}, max_exp);
    for (unsigned e = 0; e < s; ++e) {
      const std::size_t row = pos * s + e;
      for (unsigned c = e; c <= numerator_degree; ++c) a.at(row, c) = hasse_weight(field, pw, c, e);
      for (unsigned c = 0; c <= locator_degree; ++c) {
        Elem acc{};
        for (unsigned j = 0; j <= e && j <= c; ++j)
          acc = field.add(acc, field.mul(hasse_weight(field, pw, c, j), word.at(pos, e - j)));
        a.at(row, loc0 + c) = field.neg(acc);
      }
    }
  }
  return a;
}

BwBounds bw_full_bounds(std::size_t n, unsigned s, unsigned d) {
  const std::uint64_t sn = static_cast<std::uint64_t>(s) * n;
  if (sn < d) throw DecodeError("degree bound exceeds the number of values");
  return {static_cast<unsigned>((sn + d + 1) / 2), static_cast<unsigned>((sn - d) / 2)};
}

BwResult bw_decode(const FieldPtr& field, const LineWord& word, unsigned d) {
  const std::size_t n = word.positions();
  const unsigned s = word.s;
  if (static_cast<std::uint64_t>(s) * n < static_cast<std::uint64_t>(d) + 1)
    throw DecodeError("word too short for degree bound " + std::to_string(d));

  const unsigned radius = line_radius(n, s, d);
  // Two codewords agree on at most floor(d/s) positions.
  const std::size_t min_distance = n - d / s;
  const bool unique_within_radius = 2ull * radius < min_distance;

  std::vector<UniPoly> found;
  std::size_t found_errors = 0;
  auto consider = [&](const std::optional<UniPoly>& g) {
    if (!g) return;
    for (const UniPoly& f : found)
      if (f == *g) return;
    const std::size_t dist = line_distance(line_encode(*g, s), word);
    if (dist > radius) return;
    found.push_back(*g);
    found_errors = dist;
  };

  // Error-locator degree s*tau for tau = 0..radius. The pair (E*F, E) with
  // E vanishing to order s at the erroneous positions solves the system once
  // tau reaches the true error count.
  for (unsigned tau = 0; tau <= radius; ++tau) {
    const unsigned locator_degree = s * tau;
    const unsigned numerator_degree = locator_degree + d;
    const auto kernel = kernel_basis(*field, bw_system(*field, word, numerator_degree, locator_degree));
    if (kernel.empty()) continue;

    if (static_cast<std::uint64_t>(s) * (n - 2 * tau) > d) {
      // N - E*F has more zeros than its degree for every solution, so any
      // kernel vector determines F.
      consider(candidate_from(field, kernel.back(), numerator_degree, d));
    } else {
      const unsigned q = field->order();
      const std::size_t dim = kernel.size();
      std::uint64_t combos = 0;
      for (std::size_t lead = 0; lead < dim && combos <= kMaxKernelCombinations; ++lead) {
        std::uint64_t block = 1;
        for (std::size_t k = lead + 1; k < dim && block <= kMaxKernelCombinations; ++k) block *= q;
        combos += block;
      }
      if (combos > kMaxKernelCombinations && capped_binomial(n, tau, kMaxErasurePatterns) <= kMaxErasurePatterns) {
        // Too many kernel combinations: erase every tau-subset instead and
        // interpolate through the rest. The kept s(n - tau) >= d + 1 values
        // pin down any codeword within distance tau.
        std::vector<std::size_t> erased(tau), kept;
        for (unsigned i = 0; i < tau; ++i) erased[i] = i;
        while (true) {
          kept.clear();
          for (std::size_t pos = 0, e = 0; pos < n; ++pos) {
            if (e < tau && erased[e] == pos)
              ++e;
            else
              kept.push_back(pos);
          }
          consider(hermite_on(field, word, kept, d));
          std::size_t i = tau;
          while (i > 0 && erased[i - 1] == n - tau + i - 1) --i;
          if (i == 0) break;
          ++erased[i - 1];
          for (std::size_t j = i; j < tau; ++j) erased[j] = erased[j - 1] + 1;
        }
      } else if (combos > kMaxKernelCombinations) {
        for (const auto& v : kernel) consider(candidate_from(field, v, numerator_degree, d));
      } else {
        std::vector<Elem> v(kernel.front().size());
        for (std::size_t lead = 0; lead < dim; ++lead) {
          std::vector<std::uint32_t> digits(dim - lead - 1, 0);
          while (true) {
            for (std::size_t c = 0; c < v.size(); ++c) {
              Elem acc = kernel[lead][c];
              for (std::size_t k = 0; k < digits.size(); ++k)
                if (digits[k]) acc = field->add(acc, field->mul(Elem{digits[k]}, kernel[lead + 1 + k][c]));
              v[c] = acc;
            }
            consider(candidate_from(field, v, numerator_degree, d));
            std::size_t k = 0;
            while (k < digits.size() && ++digits[k] == q) digits[k++] = 0;
            if (k == digits.size()) break;
          }
        }
      }
    }
    if (unique_within_radius && !found.empty()) break;
  }

  if (found.size() == 1) return {BwStatus::decoded, found.front(), found_errors, {}};
  if (found.size() > 1) return {BwStatus::ambiguous, std::nullopt, 0, std::move(found)};
  return {BwStatus::failure, std::nullopt, 0, {}};
}

}  // namespace mpir
