#include "mpir/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <future>
#include <sstream>

namespace mpir {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  if (v > 0xFFFF) throw FormatError("value " + std::to_string(v) + " does not fit in 16 bits");
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::uint32_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8);
}

void put_symbol(std::vector<std::uint8_t>& out, Elem e, unsigned width) {
  std::uint32_t v = e.value;
  for (unsigned i = 0; i < width; ++i, v >>= 8) out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

Elem get_symbol(const Field& field, std::span<const std::uint8_t> in, std::size_t at, unsigned width) {
  std::uint32_t v = 0;
  for (unsigned i = width; i-- > 0;) v = (v << 8) | in[at + i];
  if (!field.contains(v)) throw FormatError("symbol " + std::to_string(v) + " outside the field");
  return Elem{v};
}

Frame error_frame(const std::string& message) {
  return Frame{MessageType::error, std::vector<std::uint8_t>(message.begin(), message.end())};
}

std::string payload_text(const Frame& f) { return std::string(f.payload.begin(), f.payload.end()); }

// ---- blocking socket helpers with deadlines ----

using Clock = std::chrono::steady_clock;

int remaining_ms(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

bool wait_fd(int fd, short events, Clock::time_point deadline) {
  pollfd pfd{fd, events, 0};
  while (true) {
    const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
    if (rc > 0) return true;
    if (rc == 0) return false;
    if (errno != EINTR) return false;
  }
}

void send_all(int fd, std::span<const std::uint8_t> data, Clock::time_point deadline) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    if (!wait_fd(fd, POLLOUT, deadline)) throw TransportError("send timed out");
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

// Returns false on a clean EOF before any byte was read.
bool recv_all(int fd, std::uint8_t* buf, std::size_t len, Clock::time_point deadline) {
  std::size_t got = 0;
  while (got < len) {
    if (!wait_fd(fd, POLLIN, deadline)) throw TransportError("receive timed out");
    const ssize_t n = ::recv(fd, buf + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      throw TransportError("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw TransportError(std::string("receive failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

struct FrameRead {
  bool eof = false;
  bool oversized = false;
  Frame frame;
};

FrameRead read_frame(int fd, Clock::time_point deadline) {
  std::uint8_t header[kFrameHeaderBytes];
  FrameRead out;
  if (!recv_all(fd, header, sizeof header, deadline)) {
    out.eof = true;
    return out;
  }
  const std::uint32_t len = static_cast<std::uint32_t>(header[0]) | (static_cast<std::uint32_t>(header[1]) << 8) |
                            (static_cast<std::uint32_t>(header[2]) << 16) |
                            (static_cast<std::uint32_t>(header[3]) << 24);
  if (len > kMaxFramePayload) {
    out.oversized = true;
    return out;
  }
  out.frame.type = static_cast<MessageType>(header[4]);
  out.frame.payload.resize(len);
  if (len && !recv_all(fd, out.frame.payload.data(), len, deadline))
    throw TransportError("connection closed mid-frame");
  return out;
}

class FdGuard {
 public:
  explicit FdGuard(int fd) : fd_(fd) {}
  ~FdGuard() {
    if (fd_ >= 0) ::close(fd_);
  }
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

int connect_to(const Endpoint& ep, Clock::time_point deadline) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(ep.port);
  if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0)
    throw TransportError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);

  std::string last_error = "no address";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return fd;
    if (errno == EINPROGRESS && wait_fd(fd, POLLOUT, deadline)) {
      int err = 0;
      socklen_t len = sizeof err;
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      if (err == 0) return fd;
      last_error = std::strerror(err);
    } else {
      last_error = errno == EINPROGRESS ? "connect timed out" : std::strerror(errno);
    }
    ::close(fd);
  }
  throw TransportError("cannot connect to " + ep.host + ":" + port + ": " + last_error);
}

// Runs one server's exchange and fills in its slot of the fanout result.
struct ServerOutcome {
  std::optional<ServerAnswer> answer;
  std::string error;
  std::uint64_t uplink_bytes = 0;
  std::uint64_t downlink_bytes = 0;
  double uplink_bits = 0;
  double downlink_bits = 0;
  std::uint64_t header_bytes = 0;
};

Frame query_frame(const CodeParams& params, const ServerBatch& batch) {
  return Frame{MessageType::query, encode_query_payload(params, batch.points)};
}

void interpret_reply(const CodeParams& params, const Frame& request, const Frame& reply, ServerOutcome& out) {
  const Field& field = *params.field;
  const double bits = field.symbol_bits();
  const unsigned width = field.symbol_bytes();
  out.uplink_bytes = request.payload.size();
  out.uplink_bits = static_cast<double>((request.payload.size() - 2) / width) * bits;
  out.header_bytes = 2 * kFrameHeaderBytes;
  out.downlink_bytes = reply.payload.size();
  if (reply.type == MessageType::error) {
    out.error = "server error: " + payload_text(reply);
    return;
  }
  if (reply.type != MessageType::answer) {
    out.error = "unexpected reply type";
    return;
  }
  out.downlink_bits = static_cast<double>(reply.payload.size() / width) * bits;
  try {
    out.answer = decode_answer_payload(params, reply.payload);
  } catch (const FormatError&) {
    // Malformed symbols: keep the server in the fanout, the decoder treats
    // its positions as errors.
    out.answer = ServerAnswer{};
  }
}

FanoutResult collect(std::vector<ServerOutcome>& outcomes) {
  FanoutResult result;
  for (ServerOutcome& o : outcomes) {
    result.answers.push_back(std::move(o.answer));
    result.errors.push_back(o.error);
    result.traffic.uplink_payload_bytes += o.uplink_bytes;
    result.traffic.downlink_payload_bytes += o.downlink_bytes;
    result.traffic.uplink_info_bits += o.uplink_bits;
    result.traffic.downlink_info_bits += o.downlink_bits;
    result.traffic.frame_header_bytes += o.header_bytes;
  }
  return result;
}

}  // namespace

// ---- share files ----

std::size_t share_header_size(const CodeParams& params) {
  return sizeof(kShareMagic) - 1 + 4 + (params.field->degree() + 1) + 8;
}

std::size_t share_file_size(const CodeParams& params) {
  return share_header_size(params) + params.hyperplane_size() * params.sigma * params.field->symbol_bytes();
}

std::vector<std::uint8_t> serialize_share(const Share& share) {
  const CodeParams& params = share.params;
  const Field& field = *params.field;
  std::vector<std::uint8_t> out;
  out.reserve(share_file_size(params));
  out.insert(out.end(), kShareMagic, kShareMagic + sizeof(kShareMagic) - 1);
  put_u16(out, field.characteristic());
  put_u16(out, field.degree());
  for (unsigned c : field.modulus()) {
    if (c > 0xFF) throw FormatError("modulus coefficient does not fit in a byte");
    out.push_back(static_cast<std::uint8_t>(c));
  }
  put_u16(out, params.m);
  put_u16(out, params.s);
  put_u16(out, params.d);
  put_u16(out, share.hyperplane);
  if (share.symbols.size() != params.hyperplane_size() * params.sigma) throw FormatError("share has the wrong length");
  const unsigned width = field.symbol_bytes();
  for (Elem e : share.symbols) put_symbol(out, e, width);
  return out;
}

Share deserialize_share(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = sizeof(kShareMagic) - 1;
  if (bytes.size() < magic_len + 4) throw FormatError("share file truncated");
  if (std::memcmp(bytes.data(), kShareMagic, magic_len) != 0) throw FormatError("bad share file magic");
  std::size_t at = magic_len;
  const unsigned p = get_u16(bytes, at);
  const unsigned e = get_u16(bytes, at + 2);
  at += 4;
  if (e < 1 || e > 16) throw FormatError("bad extension degree in share header");
  if (bytes.size() < at + e + 1 + 8) throw FormatError("share file truncated");
  std::vector<unsigned> modulus(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                                bytes.begin() + static_cast<std::ptrdiff_t>(at + e + 1));
  at += e + 1;
  const unsigned m = get_u16(bytes, at);
  const unsigned s = get_u16(bytes, at + 2);
  const unsigned d = get_u16(bytes, at + 4);
  const unsigned l = get_u16(bytes, at + 6);
  at += 8;

  FieldPtr field;
  CodeParams params;
  try {
    field = Field::with_modulus(p, e, modulus);
    params = make_code_params(field, m, s, d);
  } catch (const std::exception& ex) {
    throw FormatError(std::string("invalid share header: ") + ex.what());
  }
  if (l >= params.q()) throw FormatError("hyperplane index out of range");
  const unsigned width = field->symbol_bytes();
  const std::size_t count = params.hyperplane_size() * params.sigma;
  if (bytes.size() - at < count * width) throw FormatError("share file truncated");
  if (bytes.size() - at > count * width) throw FormatError("trailing bytes after share body");

  Share share{params, l, std::vector<Elem>(count)};
  for (std::size_t i = 0; i < count; ++i) share.symbols[i] = get_symbol(*field, bytes, at + i * width, width);
  return share;
}

void write_share(const std::filesystem::path& path, const Share& share) {
  const auto bytes = serialize_share(share);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Share read_share(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_share(bytes);
}

Share read_share(const std::filesystem::path& path, const CodeParams& expected) {
  Share share = read_share(path);
  if (!(share.params == expected)) throw FormatError("share parameters do not match the expected code");
  return share;
}

// ---- wire messages ----

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  if (frame.payload.size() > kMaxFramePayload) throw FormatError("frame payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + frame.payload.size());
  const auto len = static_cast<std::uint32_t>(frame.payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((len >> (8 * i)) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(frame.type));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) throw FormatError("frame truncated");
  const std::uint32_t len = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
                            (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
  if (len > kMaxFramePayload) throw FormatError("frame payload too large");
  if (bytes.size() != kFrameHeaderBytes + len) throw FormatError("frame length mismatch");
  return Frame{static_cast<MessageType>(bytes[4]),
               std::vector<std::uint8_t>(bytes.begin() + kFrameHeaderBytes, bytes.end())};
}

std::vector<std::uint8_t> encode_query_payload(const CodeParams& params, std::span<const Point> points) {
  const unsigned width = params.field->symbol_bytes();
  std::vector<std::uint8_t> out;
  out.reserve(2 + points.size() * (params.m - 1) * width);
  put_u16(out, static_cast<std::uint32_t>(points.size()));
  for (const Point& pt : points) {
    if (pt.size() != params.m) throw FormatError("query point has the wrong dimension");
    for (unsigned k = 0; k + 1 < params.m; ++k) put_symbol(out, pt[k], width);
  }
  return out;
}

std::vector<Point> decode_query_payload(const CodeParams& params, unsigned hyperplane,
                                        std::span<const std::uint8_t> payload) {
  const Field& field = *params.field;
  const unsigned width = field.symbol_bytes();
  if (payload.size() < 2) throw FormatError("query payload truncated");
  const std::size_t count = get_u16(payload, 0);
  const std::size_t per_point = static_cast<std::size_t>(params.m - 1) * width;
  if (payload.size() != 2 + count * per_point) throw FormatError("query payload length mismatch");
  std::vector<Point> points(count, Point(params.m));
  for (std::size_t i = 0; i < count; ++i) {
    for (unsigned k = 0; k + 1 < params.m; ++k)
      points[i][k] = get_symbol(field, payload, 2 + i * per_point + k * width, width);
    points[i].back() = Elem{hyperplane};
  }
  return points;
}

std::vector<std::uint8_t> encode_answer_payload(const CodeParams& params, const ServerAnswer& answer) {
  const unsigned width = params.field->symbol_bytes();
  std::vector<std::uint8_t> out;
  out.reserve(answer.size() * params.sigma * width);
  for (const EvalTuple& t : answer) {
    if (t.size() != params.sigma) throw FormatError("answer tuple has the wrong length");
    for (Elem e : t) put_symbol(out, e, width);
  }
  return out;
}

ServerAnswer decode_answer_payload(const CodeParams& params, std::span<const std::uint8_t> payload) {
  const Field& field = *params.field;
  const unsigned width = field.symbol_bytes();
  const std::size_t tuple_bytes = params.sigma * width;
  if (payload.size() % tuple_bytes != 0) throw FormatError("answer payload length is not a whole number of tuples");
  ServerAnswer out(payload.size() / tuple_bytes, EvalTuple(params.sigma));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t v = 0; v < params.sigma; ++v)
      out[i][v] = get_symbol(field, payload, i * tuple_bytes + v * width, width);
  return out;
}

// ---- servers ----

ByzantineMode parse_byzantine_mode(const std::string& name) {
  if (name == "honest" || name.empty()) return ByzantineMode::honest;
  if (name == "garbage") return ByzantineMode::garbage;
  if (name == "fixed") return ByzantineMode::fixed;
  if (name == "bitflip" || name == "bit-flip") return ByzantineMode::bitflip;
  throw std::invalid_argument("unknown Byzantine mode '" + name + "'");
}

const char* to_string(ByzantineMode mode) {
  switch (mode) {
    case ByzantineMode::honest: return "honest";
    case ByzantineMode::garbage: return "garbage";
    case ByzantineMode::fixed: return "fixed";
    case ByzantineMode::bitflip: return "bitflip";
  }
  return "unknown";
}

ShareServer::ShareServer(Share share, ByzantineMode mode, std::uint64_t seed, Elem fixed_value)
    : share_(std::move(share)), mode_(mode), fixed_value_(fixed_value), rng_(seed) {
  if (!share_.params.field->contains(fixed_value_.value)) throw std::invalid_argument("fixed value outside the field");
}

void ShareServer::corrupt(ServerAnswer& answer) {
  const unsigned q = share_.params.q();
  switch (mode_) {
    case ByzantineMode::honest:
      return;
    case ByzantineMode::garbage: {
      std::lock_guard lock(rng_mutex_);
      std::uniform_int_distribution<std::uint32_t> pick(0, q - 1);
      for (EvalTuple& t : answer)
        for (Elem& e : t) e = Elem{pick(rng_)};
      return;
    }
    case ByzantineMode::fixed:
      for (EvalTuple& t : answer)
        for (Elem& e : t) e = fixed_value_;
      return;
    case ByzantineMode::bitflip:
      for (EvalTuple& t : answer) {
        for (Elem& e : t) {
          const std::uint32_t flipped = e.value ^ 1u;
          e = Elem{flipped < q ? flipped : e.value - 1u};
        }
      }
      return;
  }
}

Frame ShareServer::handle(const Frame& request) {
  switch (request.type) {
    case MessageType::ping:
      return Frame{MessageType::ping, request.payload};
    case MessageType::query:
      try {
        const auto points = decode_query_payload(share_.params, share_.hyperplane, request.payload);
        ServerAnswer reply = answer(share_, points);
        corrupt(reply);
        return Frame{MessageType::answer, encode_answer_payload(share_.params, reply)};
      } catch (const std::exception& ex) {
        return error_frame(ex.what());
      }
    default:
      return error_frame("unsupported message type");
  }
}

// ---- in-process transport ----

InProcessTransport::InProcessTransport(std::vector<std::shared_ptr<ShareServer>> servers)
    : servers_(std::move(servers)), down_(servers_.size(), false) {}

FanoutResult InProcessTransport::fanout(const CodeParams& params, const QueryPlan& plan) {
  if (servers_.size() != plan.batches.size()) throw TransportError("server count does not match the query plan");
  std::vector<ServerOutcome> outcomes(servers_.size());
  for (std::size_t l = 0; l < servers_.size(); ++l) {
    if (down_[l]) {
      outcomes[l].error = "unreachable";
      continue;
    }
    const Frame request = query_frame(params, plan.batches[l]);
    const Frame delivered = decode_frame(encode_frame(request));
    const Frame reply = decode_frame(encode_frame(servers_[l]->handle(delivered)));
    interpret_reply(params, request, reply, outcomes[l]);
  }
  return collect(outcomes);
}

// ---- socket server ----

SocketServer::SocketServer(std::shared_ptr<ShareServer> server, const std::string& host, std::uint16_t port)
    : server_(std::move(server)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError(std::string("socket failed: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw TransportError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  if (::pipe2(wake_fds_, O_CLOEXEC) != 0) {
    ::close(listen_fd_);
    throw TransportError(std::string("pipe failed: ") + std::strerror(errno));
  }
  acceptor_ = std::thread([this] { accept_loop(); });
}

SocketServer::~SocketServer() { stop(); }

void SocketServer::accept_loop() {
  while (!stopping_) {
    pollfd pfds[2] = {{listen_fd_, POLLIN, 0}, {wake_fds_[0], POLLIN, 0}};
    if (::poll(pfds, 2, -1) <= 0 || pfds[1].revents) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(conn_mutex_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (it->done) {
        it->worker.join();
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    Connection& conn = connections_.emplace_back();
    conn.fd = fd;
    conn.worker = std::thread([this, c = &conn] { serve_connection(c); });
  }
}

void SocketServer::serve_connection(Connection* conn) {
  const int fd = conn->fd;
  try {
    while (!stopping_) {
      // Idle connections are dropped after a minute.
      const FrameRead in = read_frame(fd, Clock::now() + std::chrono::seconds(60));
      if (in.eof) break;
      const auto deadline = Clock::now() + std::chrono::seconds(10);
      if (in.oversized) {
        send_all(fd, encode_frame(error_frame("frame exceeds 16 MiB")), deadline);
        break;
      }
      send_all(fd, encode_frame(server_->handle(in.frame)), deadline);
    }
  } catch (const TransportError&) {
  }
  std::lock_guard lock(conn_mutex_);
  ::close(fd);
  conn->fd = -1;
  conn->done = true;
}

void SocketServer::stop() {
  if (stopping_.exchange(true)) return;
  const char byte = 0;
  [[maybe_unused]] const auto written = ::write(wake_fds_[1], &byte, 1);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(conn_mutex_);
    for (const Connection& c : connections_)
      if (c.fd >= 0) ::shutdown(c.fd, SHUT_RDWR);
  }
  // The acceptor is gone, so the list no longer changes shape.
  for (Connection& c : connections_) c.worker.join();
  connections_.clear();
  ::close(listen_fd_);
  ::close(wake_fds_[0]);
  ::close(wake_fds_[1]);
  listen_fd_ = -1;
}

void SocketServer::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

// ---- endpoints and socket transport ----

std::vector<Endpoint> parse_endpoints(std::istream& in) {
  std::vector<Endpoint> out;
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Endpoint ep;
    std::string addr;
    if (!(ls >> ep.index)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw FormatError("endpoints line " + std::to_string(lineno) + ": expected 'index host:port'");
    }
    if (!(ls >> addr)) throw FormatError("endpoints line " + std::to_string(lineno) + ": missing host:port");
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw FormatError("endpoints line " + std::to_string(lineno) + ": missing port");
    ep.host = addr.substr(0, colon);
    const int port = std::atoi(addr.c_str() + colon + 1);
    if (port <= 0 || port > 65535) throw FormatError("endpoints line " + std::to_string(lineno) + ": bad port");
    ep.port = static_cast<std::uint16_t>(port);
    out.push_back(std::move(ep));
  }
  return out;
}

std::vector<Endpoint> read_endpoints_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return parse_endpoints(in);
}

std::chrono::milliseconds default_timeout() {
  if (const char* env = std::getenv("MPIR_TIMEOUT_MS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return std::chrono::milliseconds(v);
  }
  return std::chrono::milliseconds(5000);
}

Frame exchange(const Endpoint& endpoint, const Frame& request, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  FdGuard fd(connect_to(endpoint, deadline));
  send_all(fd.get(), encode_frame(request), deadline);
  const FrameRead in = read_frame(fd.get(), deadline);
  if (in.eof) throw TransportError("connection closed before a reply");
  if (in.oversized) throw TransportError("reply exceeds 16 MiB");
  return in.frame;
}

SocketTransport::SocketTransport(std::vector<Endpoint> endpoints, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  std::sort(endpoints.begin(), endpoints.end(), [](const Endpoint& a, const Endpoint& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < endpoints.size(); ++i)
    if (endpoints[i].index != i) throw FormatError("endpoints must cover server indices 0..q-1 exactly once");
  endpoints_ = std::move(endpoints);
}

FanoutResult SocketTransport::fanout(const CodeParams& params, const QueryPlan& plan) {
  if (endpoints_.size() != plan.batches.size())
    throw TransportError("have " + std::to_string(endpoints_.size()) + " endpoints for " +
                         std::to_string(plan.batches.size()) + " servers");
  std::vector<std::future<ServerOutcome>> pending;
  pending.reserve(endpoints_.size());
  for (std::size_t l = 0; l < endpoints_.size(); ++l) {
    pending.push_back(std::async(std::launch::async, [&, l] {
      ServerOutcome out;
      const Frame request = query_frame(params, plan.batches[l]);
      try {
        interpret_reply(params, request, exchange(endpoints_[l], request, timeout_), out);
      } catch (const std::exception& ex) {
        out.error = ex.what();
      }
      return out;
    }));
  }
  std::vector<ServerOutcome> outcomes;
  outcomes.reserve(pending.size());
  for (auto& f : pending) outcomes.push_back(f.get());
  return collect(outcomes);
}

}  // namespace mpir
