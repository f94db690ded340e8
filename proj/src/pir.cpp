#include "mpir/pir.hpp"

#include <algorithm>
#include <numeric>

namespace mpir {

bool FanoutResult::complete() const {
  return std::all_of(answers.begin(), answers.end(), [](const auto& a) { return a.has_value(); });
}

std::vector<Share> preprocess(const CodeParams& params, const MultiPoly& f) {
  return partition(encode(params, f));
}

QueryPlan gen_queries(const CodeParams& params, std::uint64_t target, Rng& rng) {
  if (target >= params.n) throw ProtocolError("target index " + std::to_string(target) + " out of range");
  if (!params.fits_transversal_lines())
    throw PlanningError("sigma exceeds the number of transversal lines through a point");
  const Field& field = *params.field;
  const unsigned q = params.q();
  const std::size_t sigma = params.sigma;

  QueryPlan plan;
  plan.target = target;
  plan.target_point = index_point(params, target);
  plan.hiding_server = hyperplane_of(params, plan.target_point);
  plan.lines = plan_lines(params, plan.target_point, rng, /*transversal_only=*/true);
  plan.batches.resize(q);

  const Elem last = plan.target_point.back();
  for (unsigned l = 0; l < q; ++l) {
    ServerBatch& batch = plan.batches[l];
    std::vector<int> order(sigma);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    if (l == plan.hiding_server) {
      // Fake points: the in-hyperplane coordinates of a fresh solvable set of
      // transversal directions, which has the same law as a real batch.
      const auto fake = sample_direction_classes(params, rng, /*transversal_only=*/true);
      for (int k : order) {
        Point pt = transversal_direction(params, fake[static_cast<std::size_t>(k)]);
        pt.back() = Elem{l};
        batch.points.push_back(std::move(pt));
        batch.line_of.push_back(-1);
      }
    } else {
      // Every transversal direction has last coordinate 1, so line i meets H_l
      // at parameter t = alpha_l - x_m.
      const Elem t = field.sub(Elem{l}, last);
      for (int i : order) {
        batch.points.push_back(plan.lines.query_points[static_cast<std::size_t>(i)][t.value - 1]);
        batch.line_of.push_back(i);
      }
    }
  }
  return plan;
}

ServerAnswer answer(const Share& share, std::span<const Point> points) {
  const CodeParams& params = share.params;
  if (points.size() != params.sigma)
    throw ProtocolError("expected " + std::to_string(params.sigma) + " query points, got " +
                        std::to_string(points.size()));
  ServerAnswer out;
  out.reserve(points.size());
  for (const Point& pt : points) {
    if (pt.size() != params.m) throw ProtocolError("query point has the wrong dimension");
    for (Elem c : pt)
      if (!params.field->contains(c.value)) throw ProtocolError("query coordinate outside the field");
    if (hyperplane_of(params, pt) != share.hyperplane) throw ProtocolError("query point outside the server's hyperplane");
    auto sym = share.at(local_index(params, pt));
    out.emplace_back(sym.begin(), sym.end());
  }
  return out;
}

RecoverResult reconstruct(const CodeParams& params, const QueryPlan& plan,
                          std::span<const std::optional<ServerAnswer>> answers) {
  const Field& field = *params.field;
  const unsigned q = params.q();
  if (answers.size() != q) throw ProtocolError("expected one answer per server");

  const std::size_t lines = plan.lines.directions.size();
  std::vector<std::vector<EvalTuple>> per_line(lines, std::vector<EvalTuple>(q - 1, EvalTuple(params.sigma)));
  const Elem last = plan.target_point.back();
  for (unsigned l = 0; l < q; ++l) {
    if (l == plan.hiding_server) continue;
    const ServerBatch& batch = plan.batches[l];
    const auto& reply = answers[l];
    const bool well_formed =
        reply && reply->size() == batch.points.size() &&
        std::all_of(reply->begin(), reply->end(), [&](const EvalTuple& t) {
          return t.size() == params.sigma &&
                 std::all_of(t.begin(), t.end(), [&](Elem e) { return field.contains(e.value); });
        });
    const std::size_t b = field.sub(Elem{l}, last).value;
    for (std::size_t k = 0; k < batch.points.size(); ++k) {
      const auto line = static_cast<std::size_t>(batch.line_of[k]);
      // A malformed reply stays as zero tuples, i.e. an erroneous position.
      if (well_formed) per_line[line][b - 1] = (*reply)[k];
    }
  }
  return recover_symbol(params, plan.lines, per_line);
}

RetrievalResult retrieve_record(const CodeParams& params, QueryTransport& transport, std::uint64_t target, Rng& rng) {
  const QueryPlan plan = gen_queries(params, target, rng);
  FanoutResult fan = transport.fanout(params, plan);

  RetrievalResult result;
  result.traffic = fan.traffic;
  if (!fan.complete()) {
    result.status = RetrievalStatus::transport_error;
    for (unsigned l = 0; l < fan.errors.size(); ++l)
      if (!fan.errors[l].empty()) result.transport_errors.push_back("server " + std::to_string(l) + ": " + fan.errors[l]);
    return result;
  }
  result.recovery = reconstruct(params, plan, fan.answers);
  result.status = result.recovery.status == RecoverStatus::ok ? RetrievalStatus::ok : RetrievalStatus::decode_error;
  return result;
}

}  // namespace mpir
