#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mpir/multcode.hpp"
#include "mpir/pir.hpp"

namespace mpir {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- share files ----
//
// "MPIR1", then p, e as u16 LE, the e+1 modulus coefficients as single bytes,
// then m, s, d, l as u16 LE, then q^(m-1) * sigma symbols of symbol_bytes()
// bytes each, little-endian, points in canonical order and derivatives in
// graded-lex order.

inline constexpr char kShareMagic[] = "MPIR1";

std::size_t share_header_size(const CodeParams& params);
std::size_t share_file_size(const CodeParams& params);

std::vector<std::uint8_t> serialize_share(const Share& share);
Share deserialize_share(std::span<const std::uint8_t> bytes);

void write_share(const std::filesystem::path& path, const Share& share);
Share read_share(const std::filesystem::path& path);
/// Also rejects files whose parameters differ from `expected`.
Share read_share(const std::filesystem::path& path, const CodeParams& expected);

// ---- wire messages ----
//
// frame = u32 LE payload length, u8 type, payload.

enum class MessageType : std::uint8_t { query = 0x01, answer = 0x02, error = 0x03, ping = 0x04 };

inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::size_t kMaxFramePayload = 16u << 20;

struct Frame {
  MessageType type = MessageType::ping;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);
/// Parses exactly one complete frame.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// QUERY payload: u16 LE point count, then x_1..x_{m-1} of each point.
std::vector<std::uint8_t> encode_query_payload(const CodeParams& params, std::span<const Point> points);
/// Rebuilds full points, setting x_m = alpha_hyperplane.
std::vector<Point> decode_query_payload(const CodeParams& params, unsigned hyperplane,
                                        std::span<const std::uint8_t> payload);

/// ANSWER payload: the tuples back to back, sigma symbols each.
std::vector<std::uint8_t> encode_answer_payload(const CodeParams& params, const ServerAnswer& answer);
ServerAnswer decode_answer_payload(const CodeParams& params, std::span<const std::uint8_t> payload);

// ---- servers ----

enum class ByzantineMode { honest, garbage, fixed, bitflip };

ByzantineMode parse_byzantine_mode(const std::string& name);
const char* to_string(ByzantineMode mode);

/// Answers wire requests over one immutable share. In a Byzantine mode every
/// ANSWER is corrupted accordingly. Safe to call from several threads.
class ShareServer {
 public:
  explicit ShareServer(Share share, ByzantineMode mode = ByzantineMode::honest, std::uint64_t seed = 0,
                       Elem fixed_value = Elem{});

  const Share& share() const { return share_; }
  ByzantineMode mode() const { return mode_; }

  Frame handle(const Frame& request);

 private:
  void corrupt(ServerAnswer& answer);

  Share share_;
  ByzantineMode mode_;
  Elem fixed_value_;
  std::mutex rng_mutex_;
  Rng rng_;
};

/// Calls the servers directly but still moves every request and reply through
/// the wire encoding, so traffic is measured the same way as over sockets.
class InProcessTransport : public QueryTransport {
 public:
  explicit InProcessTransport(std::vector<std::shared_ptr<ShareServer>> servers);

  /// Simulates an unreachable server.
  void disconnect(unsigned server) { down_.at(server) = true; }

  FanoutResult fanout(const CodeParams& params, const QueryPlan& plan) override;

 private:
  std::vector<std::shared_ptr<ShareServer>> servers_;
  std::vector<bool> down_;
};

/// TCP listener serving one ShareServer; each connection may carry any
/// number of request/response exchanges.
class SocketServer {
 public:
  explicit SocketServer(std::shared_ptr<ShareServer> server, const std::string& host = "127.0.0.1",
                        std::uint16_t port = 0);
  ~SocketServer();
  SocketServer(const SocketServer&) = delete;
  SocketServer& operator=(const SocketServer&) = delete;

  std::uint16_t port() const { return port_; }
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Connection {
    int fd = -1;  // closed by the worker when it finishes
    bool done = false;
    std::thread worker;
  };

  void accept_loop();
  void serve_connection(Connection* conn);

  std::shared_ptr<ShareServer> server_;
  int listen_fd_ = -1;
  int wake_fds_[2] = {-1, -1};  // written by stop() to interrupt the accept poll
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex conn_mutex_;
  std::list<Connection> connections_;  // guarded by conn_mutex_
};

struct Endpoint {
  unsigned index = 0;
  std::string host;
  std::uint16_t port = 0;
};

/// One "index host:port" per line; blank lines and '#' comments are skipped.
std::vector<Endpoint> parse_endpoints(std::istream& in);
std::vector<Endpoint> read_endpoints_file(const std::filesystem::path& path);

/// 5 s unless MPIR_TIMEOUT_MS is set.
std::chrono::milliseconds default_timeout();

/// Sends one frame and waits for the reply.
Frame exchange(const Endpoint& endpoint, const Frame& request, std::chrono::milliseconds timeout);

class SocketTransport : public QueryTransport {
 public:
  explicit SocketTransport(std::vector<Endpoint> endpoints, std::chrono::milliseconds timeout = default_timeout());

  FanoutResult fanout(const CodeParams& params, const QueryPlan& plan) override;

 private:
  std::vector<Endpoint> endpoints_;  // indexed by server
  std::chrono::milliseconds timeout_;
};

}  // namespace mpir
