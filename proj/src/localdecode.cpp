#include "mpir/localdecode.hpp"

#include <algorithm>
#include <string>

#include "mpir/linalg.hpp"

namespace mpir {
namespace {

// Cap on joint candidate choices across ambiguously decoded lines.
constexpr std::uint64_t kMaxCandidateCombinations = 4096;

// Positions (into derivative_orders) of the multi-indices of total degree e.
std::vector<std::size_t> order_block(const CodeParams& params, unsigned e) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < params.derivative_orders.size(); ++v)
    if (total_degree(params.derivative_orders[v]) == e) out.push_back(v);
  return out;
}

Matrix block_matrix(const CodeParams& params, std::span<const Point> directions, const std::vector<std::size_t>& block) {
  const Field& field = *params.field;
  Matrix a(directions.size(), block.size());
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t c = 0; c < block.size(); ++c)
      a.at(i, c) = monomial_value(field, params.derivative_orders[block[c]], directions[i]);
  return a;
}

}  // namespace

const char* to_string(RecoverStatus status) {
  switch (status) {
    case RecoverStatus::ok: return "ok";
    case RecoverStatus::line_undecodable: return "line undecodable";
    case RecoverStatus::singular_system: return "singular system";
    case RecoverStatus::inconsistent_system: return "inconsistent system";
  }
  return "unknown";
}

LineQuerySet make_line_query_set(const CodeParams& params, std::span<const Elem> base,
                                 std::span<const std::uint64_t> direction_classes) {
  if (base.size() != params.m) throw PlanningError("base point dimension mismatch");
  const Field& field = *params.field;
  LineQuerySet set;
  set.base.assign(base.begin(), base.end());
  set.direction_classes.assign(direction_classes.begin(), direction_classes.end());
  std::vector<std::uint64_t> sorted = set.direction_classes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PlanningError("direction classes must be distinct");

  const unsigned q = params.q();
  for (std::uint64_t cls : set.direction_classes) {
    Point u = direction_class(params, cls);
    std::vector<Point> pts;
    pts.reserve(q - 1);
    for (unsigned b = 1; b < q; ++b) {
      Point r(params.m);
      for (unsigned k = 0; k < params.m; ++k) r[k] = field.add(base[k], field.mul(Elem{b}, u[k]));
      pts.push_back(std::move(r));
    }
    set.directions.push_back(std::move(u));
    set.query_points.push_back(std::move(pts));
  }
  return set;
}

bool directions_solvable(const CodeParams& params, std::span<const Point> directions) {
  for (unsigned e = 0; e < params.s; ++e) {
    const auto block = order_block(params, e);
    if (rank(*params.field, block_matrix(params, directions, block)) < block.size()) return false;
  }
  return true;
}

std::vector<std::uint64_t> sample_direction_classes(const CodeParams& params, Rng& rng, bool transversal_only) {
  const std::uint64_t available =
      transversal_only ? transversal_direction_count(params) : direction_class_count(params);
  if (params.sigma > available)
    throw PlanningError("sigma = " + std::to_string(params.sigma) + " exceeds the " + std::to_string(available) +
                        " available direction classes");

  std::uniform_int_distribution<std::uint64_t> pick(0, available - 1);
  for (unsigned attempt = 0; attempt <= kMaxDirectionRetries; ++attempt) {
    std::vector<std::uint64_t> classes;
    classes.reserve(params.sigma);
    while (classes.size() < params.sigma) {
      const std::uint64_t c = pick(rng);
      if (std::find(classes.begin(), classes.end(), c) == classes.end()) classes.push_back(c);
    }
    std::vector<Point> dirs;
    dirs.reserve(classes.size());
    for (std::uint64_t c : classes) dirs.push_back(direction_class(params, c));
    if (directions_solvable(params, dirs)) return classes;
  }
  throw PlanningError("no solvable set of directions after " + std::to_string(kMaxDirectionRetries) + " retries");
}

LineQuerySet plan_lines(const CodeParams& params, std::span<const Elem> base, Rng& rng, bool transversal_only) {
  const auto classes = sample_direction_classes(params, rng, transversal_only);
  return make_line_query_set(params, base, classes);
}

LineWord side_values(const CodeParams& params, std::span<const EvalTuple> answers, std::span<const Elem> direction) {
  const Field& field = *params.field;
  if (answers.size() != params.q() - 1)
    throw DecodeError("expected " + std::to_string(params.q() - 1) + " answers on a line, got " +
                      std::to_string(answers.size()));
  if (direction.size() != params.m) throw DecodeError("direction dimension mismatch");

  std::vector<Elem> weights(params.sigma);
  for (std::size_t v = 0; v < params.sigma; ++v)
    weights[v] = monomial_value(field, params.derivative_orders[v], direction);

  LineWord word{params.s, std::vector<Elem>(answers.size() * params.s)};
  for (std::size_t b = 0; b < answers.size(); ++b) {
    if (answers[b].size() != params.sigma) throw DecodeError("answer tuple has the wrong length");
    for (std::size_t v = 0; v < params.sigma; ++v) {
      const unsigned e = total_degree(params.derivative_orders[v]);
      word.at(b, e) = field.add(word.at(b, e), field.mul(answers[b][v], weights[v]));
    }
  }
  return word;
}

RecoverResult recover_symbol(const CodeParams& params, const LineQuerySet& lines,
                             std::span<const std::vector<EvalTuple>> answers) {
  const Field& field = *params.field;
  if (answers.size() != lines.directions.size()) throw DecodeError("answers do not match the line count");

  // Coefficients of T^e, e < s, of each line polynomial. A line decoded
  // ambiguously keeps every candidate; the lines share the base point, so the
  // overdetermined system below usually singles one out.
  std::vector<std::vector<std::vector<Elem>>> options(lines.directions.size());
  std::uint64_t combinations = 1;
  std::optional<std::size_t> first_ambiguous;
  for (std::size_t i = 0; i < lines.directions.size(); ++i) {
    const LineWord word = side_values(params, answers[i], lines.directions[i]);
    std::vector<UniPoly> polys;
    if (std::optional<UniPoly> g = hermite_interpolate(params.field, word, params.d)) {
      polys.push_back(std::move(*g));
    } else {
      BwResult bw = bw_decode(params.field, word, params.d);
      if (bw.status == BwStatus::failure) return {RecoverStatus::line_undecodable, {}, i};
      if (bw.status == BwStatus::decoded) {
        polys.push_back(std::move(*bw.poly));
      } else {
        polys = std::move(bw.candidates);
        if (!first_ambiguous) first_ambiguous = i;
      }
    }
    for (const UniPoly& g : polys) {
      std::vector<Elem> c(params.s);
      for (unsigned e = 0; e < params.s; ++e) c[e] = g.coeff(e);
      if (std::find(options[i].begin(), options[i].end(), c) == options[i].end()) options[i].push_back(std::move(c));
    }
    combinations *= options[i].size();
    if (combinations > kMaxCandidateCombinations) return {RecoverStatus::line_undecodable, {}, *first_ambiguous};
  }

  std::vector<Matrix> blocks;
  for (unsigned e = 0; e < params.s; ++e) blocks.push_back(block_matrix(params, lines.directions, order_block(params, e)));

  std::vector<EvalTuple> consistent;
  std::vector<std::size_t> pick(options.size(), 0);
  for (std::uint64_t combo = 0; combo < combinations; ++combo) {
    EvalTuple value(params.sigma);
    bool ok = true;
    for (unsigned e = 0; e < params.s && ok; ++e) {
      const auto block = order_block(params, e);
      std::vector<Elem> rhs(options.size());
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = options[i][pick[i]][e];
      const LinearSolution sol = solve(field, blocks[e], rhs);
      if (sol.status == SolveStatus::underdetermined) return {RecoverStatus::singular_system, {}, 0};
      if (sol.status == SolveStatus::inconsistent) {
        ok = false;
        break;
      }
      for (std::size_t c = 0; c < block.size(); ++c) value[block[c]] = sol.x[c];
    }
    if (ok && std::find(consistent.begin(), consistent.end(), value) == consistent.end())
      consistent.push_back(std::move(value));
    for (std::size_t i = 0; i < pick.size() && ++pick[i] == options[i].size(); ++i) pick[i] = 0;
  }

  if (consistent.size() == 1) return {RecoverStatus::ok, std::move(consistent.front()), 0};
  if (consistent.empty() && !first_ambiguous) return {RecoverStatus::inconsistent_system, {}, 0};
  return {RecoverStatus::line_undecodable, {}, first_ambiguous.value_or(0)};
}

RecoverResult local_decode(const CodeParams& params, std::uint64_t index, const SymbolOracle& oracle, Rng& rng,
                           bool transversal_only) {
  const Point base = index_point(params, index);
  const LineQuerySet lines = plan_lines(params, base, rng, transversal_only);
  std::vector<std::vector<EvalTuple>> answers(lines.directions.size());
  for (std::size_t i = 0; i < lines.directions.size(); ++i)
    for (const Point& r : lines.query_points[i]) answers[i].push_back(oracle(r));
  return recover_symbol(params, lines, answers);
}

}  // namespace mpir
