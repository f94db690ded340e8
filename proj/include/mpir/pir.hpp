#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpir/localdecode.hpp"
#include "mpir/multcode.hpp"

namespace mpir {

/// Queries sent to one server: sigma points of its hyperplane.
struct ServerBatch {
  std::vector<Point> points;
  /// Line index served by each batch position; -1 marks a fake query.
  std::vector<int> line_of;
};

/// Everything the client needs to run one retrieval. `lines`, `batches[l].line_of`
/// and `hiding_server` are client secrets; only `batches[l].points` is sent.
struct QueryPlan {
  std::uint64_t target = 0;
  Point target_point;
  unsigned hiding_server = 0;  // l with P_j in H_l
  LineQuerySet lines;
  std::vector<ServerBatch> batches;  // one per server, index = hyperplane
};

using ServerAnswer = std::vector<EvalTuple>;

/// A malformed query: wrong point count or a point outside the hyperplane.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Encodes and partitions; share l goes to server l.
std::vector<Share> preprocess(const CodeParams& params, const MultiPoly& f);

/// Picks sigma transversal lines through P_j, sends each server l != l_j the
/// sigma intersections with H_l and server l_j sigma fake points, with every
/// batch in uniformly shuffled order.
QueryPlan gen_queries(const CodeParams& params, std::uint64_t target, Rng& rng);

/// Stored symbols at the queried points, in query order.
ServerAnswer answer(const Share& share, std::span<const Point> points);

/// Drops the hiding server's answers, rebuilds each line from the other q-1
/// servers and runs the local decoder. Answers of the wrong shape count as
/// erroneous positions.
RecoverResult reconstruct(const CodeParams& params, const QueryPlan& plan,
                          std::span<const std::optional<ServerAnswer>> answers);

/// Bits as the protocol counts them (log2 q per symbol) and bytes as they
/// travel, excluding the 5-byte frame headers, which are counted separately.
struct TrafficReport {
  double uplink_info_bits = 0;
  double downlink_info_bits = 0;
  std::uint64_t uplink_payload_bytes = 0;
  std::uint64_t downlink_payload_bytes = 0;
  std::uint64_t frame_header_bytes = 0;

  double total_info_bits() const { return uplink_info_bits + downlink_info_bits; }
};

struct FanoutResult {
  std::vector<std::optional<ServerAnswer>> answers;  // one per server
  std::vector<std::string> errors;                   // empty string when the server answered
  TrafficReport traffic;

  bool complete() const;
};

/// Delivers each server its batch and collects the answers.
class QueryTransport {
 public:
  virtual ~QueryTransport() = default;
  virtual FanoutResult fanout(const CodeParams& params, const QueryPlan& plan) = 0;
};

enum class RetrievalStatus { ok, transport_error, decode_error };

struct RetrievalResult {
  RetrievalStatus status = RetrievalStatus::ok;
  RecoverResult recovery;
  TrafficReport traffic;
  std::vector<std::string> transport_errors;
};

/// One private retrieval of ev^s_{P_j}(F): gen_queries, fanout, reconstruct.
RetrievalResult retrieve_record(const CodeParams& params, QueryTransport& transport, std::uint64_t target, Rng& rng);

}  // namespace mpir
