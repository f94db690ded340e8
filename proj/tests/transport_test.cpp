#include <gtest/gtest.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "mpir/transport.hpp"
#include "oracles.hpp"

using namespace mpir;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mpir_transport_" + std::to_string(::getpid()) + "_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

struct Deployment {
  CodeParams params;
  Codeword cw;
  std::vector<Share> shares;
};

Deployment deploy(unsigned p, unsigned e, unsigned m, unsigned s, unsigned d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CodeParams params = make_params(make_field(p, e), m, s, d);
  Codeword cw = encode(params, oracle::random_poly(params.field, m, d, rng));
  auto shares = partition(cw);
  return {params, std::move(cw), std::move(shares)};
}

std::vector<std::shared_ptr<ShareServer>> servers_for(const std::vector<Share>& shares) {
  std::vector<std::shared_ptr<ShareServer>> out;
  for (const Share& s : shares) out.push_back(std::make_shared<ShareServer>(s));
  return out;
}

struct SocketCluster {
  std::vector<std::unique_ptr<SocketServer>> listeners;
  std::vector<Endpoint> endpoints;

  explicit SocketCluster(const std::vector<std::shared_ptr<ShareServer>>& servers) {
    for (unsigned l = 0; l < servers.size(); ++l) {
      listeners.push_back(std::make_unique<SocketServer>(servers[l]));
      endpoints.push_back({l, "127.0.0.1", listeners.back()->port()});
    }
  }
};

}  // namespace

TEST(ShareFile, RoundTripAndSize) {
  TempDir dir;
  for (const auto& [p, e, m, s, d] : {std::tuple{2u, 4u, 2u, 2u, 29u}, std::tuple{2u, 2u, 3u, 2u, 5u},
                                      std::tuple{257u, 1u, 2u, 1u, 100u}, std::tuple{3u, 2u, 2u, 2u, 9u}}) {
    const Deployment dep = deploy(p, e, m, s, d, 61);
    for (const Share& sh : dep.shares) {
      const auto path = dir.path / ("s" + std::to_string(sh.hyperplane));
      write_share(path, sh);
      EXPECT_EQ(std::filesystem::file_size(path), share_file_size(dep.params));
      EXPECT_EQ(share_file_size(dep.params), share_header_size(dep.params) + dep.params.hyperplane_size() *
                                                                                 dep.params.sigma *
                                                                                 dep.params.field->symbol_bytes());
      EXPECT_EQ(read_share(path), sh);
      EXPECT_EQ(read_share(path, dep.params), sh);
    }
  }
}

TEST(ShareFile, RejectsMismatchesAndDamage) {
  const Deployment dep = deploy(2, 4, 2, 2, 29, 62);
  auto bytes = serialize_share(dep.shares[0]);
  TempDir dir;
  const auto path = dir.path / "share";
  write_share(path, dep.shares[0]);
  EXPECT_THROW(read_share(path, make_params(make_field(2, 4), 2, 3, 29)), FormatError);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_share(bad_magic), FormatError);
  EXPECT_THROW(deserialize_share(std::span(bytes).first(bytes.size() - 1)), FormatError);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_share(trailing), FormatError);
  // s sits after magic (5), p and e (4) and the modulus (5), m (2).
  auto wrong_s = bytes;
  wrong_s[16] = 1;  // s = 1 makes d = 29 exceed s(q-1)
  EXPECT_THROW(deserialize_share(wrong_s), FormatError);
  auto bad_symbol = bytes;
  bad_symbol.back() = 16;
  EXPECT_THROW(deserialize_share(bad_symbol), FormatError);
}

TEST(Wire, FramesAndPayloads) {
  const Frame f{MessageType::query, {1, 2, 3}};
  const auto bytes = encode_frame(f);
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{3, 0, 0, 0, 1, 1, 2, 3}));
  const Frame back = decode_frame(bytes);
  EXPECT_EQ(back.type, MessageType::query);
  EXPECT_EQ(back.payload, f.payload);
  EXPECT_THROW(decode_frame(std::span(bytes).first(6)), FormatError);
  const std::vector<std::uint8_t> huge_header = {0, 0, 0, 2, 1};
  EXPECT_THROW(decode_frame(huge_header), FormatError);

  const Deployment dep = deploy(2, 4, 2, 2, 29, 63);
  Rng rng(1);
  const QueryPlan plan = gen_queries(dep.params, 77, rng);
  const auto& pts = plan.batches[5].points;
  const auto payload = encode_query_payload(dep.params, pts);
  EXPECT_EQ(payload.size(), 2u + dep.params.sigma * (dep.params.m - 1));
  EXPECT_EQ(decode_query_payload(dep.params, 5, payload), pts);
  EXPECT_THROW(decode_query_payload(dep.params, 5, std::span(payload).first(payload.size() - 1)), FormatError);

  const ServerAnswer ans = answer(dep.shares[5], pts);
  const auto ap = encode_answer_payload(dep.params, ans);
  EXPECT_EQ(ap.size(), dep.params.sigma * dep.params.sigma);
  EXPECT_EQ(decode_answer_payload(dep.params, ap), ans);
}

TEST(Wire, SixteenBitSymbolsAreLittleEndian) {
  const CodeParams params = make_params(make_field(257, 1), 2, 1, 10);
  const ServerAnswer ans = {{Elem{0x0102}}};
  EXPECT_EQ(encode_answer_payload(params, ans), (std::vector<std::uint8_t>{0x02, 0x01}));
}

TEST(ShareServer, PingQueryAndErrors) {
  const Deployment dep = deploy(2, 4, 2, 2, 29, 64);
  ShareServer server(dep.shares[2]);
  const Frame ping = server.handle({MessageType::ping, {9, 8}});
  EXPECT_EQ(ping.type, MessageType::ping);
  EXPECT_EQ(ping.payload, (std::vector<std::uint8_t>{9, 8}));

  Rng rng(2);
  const QueryPlan plan = gen_queries(dep.params, 10, rng);
  const auto& pts = plan.batches[2].points;
  const Frame reply = server.handle({MessageType::query, encode_query_payload(dep.params, pts)});
  ASSERT_EQ(reply.type, MessageType::answer);
  EXPECT_EQ(decode_answer_payload(dep.params, reply.payload), answer(dep.shares[2], pts));

  const Frame short_query =
      server.handle({MessageType::query, encode_query_payload(dep.params, std::span(pts).first(2))});
  EXPECT_EQ(short_query.type, MessageType::error);
  EXPECT_EQ(server.handle({MessageType::answer, {}}).type, MessageType::error);
  EXPECT_EQ(server.handle({MessageType::query, {1}}).type, MessageType::error);
}

TEST(ShareServer, ByzantineModes) {
  const Deployment dep = deploy(2, 4, 2, 2, 29, 65);
  Rng rng(3);
  const QueryPlan plan = gen_queries(dep.params, 10, rng);
  const auto& pts = plan.batches[7].points;
  const Frame req{MessageType::query, encode_query_payload(dep.params, pts)};
  const ServerAnswer honest = answer(dep.shares[7], pts);

  ShareServer fixed(dep.shares[7], ByzantineMode::fixed, 0, Elem{6});
  for (const EvalTuple& t : decode_answer_payload(dep.params, fixed.handle(req).payload))
    for (Elem e : t) EXPECT_EQ(e, Elem{6});

  ShareServer flip(dep.shares[7], ByzantineMode::bitflip);
  const ServerAnswer flipped = decode_answer_payload(dep.params, flip.handle(req).payload);
  for (std::size_t i = 0; i < honest.size(); ++i)
    for (std::size_t v = 0; v < honest[i].size(); ++v) EXPECT_NE(flipped[i][v], honest[i][v]);

  ShareServer garbage(dep.shares[7], ByzantineMode::garbage, 5);
  const ServerAnswer g1 = decode_answer_payload(dep.params, garbage.handle(req).payload);
  const ServerAnswer g2 = decode_answer_payload(dep.params, garbage.handle(req).payload);
  EXPECT_NE(g1, g2);
  EXPECT_NE(g1, honest);

  EXPECT_EQ(parse_byzantine_mode("bit-flip"), ByzantineMode::bitflip);
  EXPECT_THROW(parse_byzantine_mode("evil"), std::invalid_argument);
}

TEST(InProcess, TrafficMatchesAccounting) {
  for (const auto& [s, d, bits, up, down] :
       {std::tuple{2u, 29u, 768.0, 192.0, 576.0}, std::tuple{1u, 14u, 128.0, 64.0, 64.0}}) {
    const Deployment dep = deploy(2, 4, 2, s, d, 66);
    InProcessTransport transport(servers_for(dep.shares));
    Rng rng(4);
    const RetrievalResult r = retrieve_record(dep.params, transport, 200, rng);
    ASSERT_EQ(r.status, RetrievalStatus::ok);
    EXPECT_EQ(r.recovery.value, dep.cw.tuple(200));
    EXPECT_DOUBLE_EQ(r.traffic.uplink_info_bits, up);
    EXPECT_DOUBLE_EQ(r.traffic.downlink_info_bits, down);
    EXPECT_DOUBLE_EQ(r.traffic.total_info_bits(), bits);
    // One byte per GF(16) symbol plus the 2-byte count per query.
    EXPECT_EQ(r.traffic.uplink_payload_bytes, 16u * (2 + dep.params.sigma));
    EXPECT_EQ(r.traffic.downlink_payload_bytes, 16u * dep.params.sigma * dep.params.sigma);
    EXPECT_EQ(r.traffic.frame_header_bytes, 16u * 2 * kFrameHeaderBytes);
  }
}

TEST(InProcess, LostServerIsATransportError) {
  const Deployment dep = deploy(2, 4, 2, 2, 29, 67);
  InProcessTransport transport(servers_for(dep.shares));
  transport.disconnect(4);
  Rng rng(5);
  const RetrievalResult r = retrieve_record(dep.params, transport, 3, rng);
  EXPECT_EQ(r.status, RetrievalStatus::transport_error);
  ASSERT_EQ(r.transport_errors.size(), 1u);
  EXPECT_NE(r.transport_errors[0].find("server 4"), std::string::npos);
}

TEST(Endpoints, Parsing) {
  std::istringstream in("# cluster\n0 127.0.0.1:7000\n\n1 localhost:7001  # second\n");
  const auto eps = parse_endpoints(in);
  ASSERT_EQ(eps.size(), 2u);
  EXPECT_EQ(eps[1].index, 1u);
  EXPECT_EQ(eps[1].host, "localhost");
  EXPECT_EQ(eps[1].port, 7001);
  std::istringstream bad("0 127.0.0.1\n");
  EXPECT_THROW(parse_endpoints(bad), FormatError);
  std::istringstream bad_port("0 127.0.0.1:70000\n");
  EXPECT_THROW(parse_endpoints(bad_port), FormatError);
  EXPECT_THROW(SocketTransport({{0, "127.0.0.1", 1}, {2, "127.0.0.1", 2}}), FormatError);
}

TEST(Sockets, PingAndOversizedFrame) {
  const Deployment dep = deploy(2, 2, 3, 2, 5, 68);
  SocketServer server(std::make_shared<ShareServer>(dep.shares[0]));
  const Endpoint ep{0, "127.0.0.1", server.port()};
  const Frame pong = exchange(ep, {MessageType::ping, {1, 2, 3}}, std::chrono::seconds(2));
  EXPECT_EQ(pong.type, MessageType::ping);
  EXPECT_EQ(pong.payload, (std::vector<std::uint8_t>{1, 2, 3}));

  // A raw header announcing 32 MiB gets an ERROR reply.
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(server.port());
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  const std::uint8_t header[] = {0, 0, 0, 2, 1};
  ASSERT_EQ(::send(fd, header, sizeof header, 0), 5);
  std::uint8_t reply[5];
  ASSERT_EQ(::recv(fd, reply, 5, MSG_WAITALL), 5);
  EXPECT_EQ(reply[4], static_cast<std::uint8_t>(MessageType::error));
  ::close(fd);
}

TEST(Sockets, SameResultAsInProcess) {
  const Deployment dep = deploy(2, 4, 2, 2, 29, 69);
  const auto servers = servers_for(dep.shares);
  SocketCluster cluster(servers);
  SocketTransport sockets(cluster.endpoints, std::chrono::seconds(5));
  InProcessTransport local(servers);
  for (std::uint64_t j : {0ull, 17ull, 255ull}) {
    Rng a(j + 1), b(j + 1);
    const RetrievalResult rs = retrieve_record(dep.params, sockets, j, a);
    const RetrievalResult rl = retrieve_record(dep.params, local, j, b);
    ASSERT_EQ(rs.status, RetrievalStatus::ok);
    EXPECT_EQ(rs.recovery.value, rl.recovery.value);
    EXPECT_EQ(rs.recovery.value, dep.cw.tuple(j));
    EXPECT_EQ(rs.traffic.total_info_bits(), rl.traffic.total_info_bits());
    EXPECT_EQ(rs.traffic.uplink_payload_bytes, rl.traffic.uplink_payload_bytes);
  }
}

TEST(Sockets, ConcurrentClientsMatchSequential) {
  const Deployment dep = deploy(2, 2, 3, 2, 5, 70);
  SocketCluster cluster(servers_for(dep.shares));
  Rng rng(6);
  std::vector<QueryPlan> plans;
  for (int i = 0; i < 8; ++i) plans.push_back(gen_queries(dep.params, rng() % dep.params.n, rng));

  auto run_all = [&](SocketTransport& t) {
    std::vector<FanoutResult> out;
    for (const QueryPlan& p : plans) out.push_back(t.fanout(dep.params, p));
    return out;
  };
  SocketTransport seq(cluster.endpoints);
  const auto sequential = run_all(seq);
  std::vector<std::future<std::vector<FanoutResult>>> clients;
  for (int c = 0; c < 4; ++c)
    clients.push_back(std::async(std::launch::async, [&] {
      SocketTransport t(cluster.endpoints);
      return run_all(t);
    }));
  for (auto& c : clients) {
    const auto got = c.get();
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_TRUE(got[i].complete());
      EXPECT_EQ(got[i].answers, sequential[i].answers);
    }
  }
}

TEST(Sockets, RestartedServerAnswersIdentically) {
  const Deployment dep = deploy(2, 2, 3, 2, 5, 71);
  Rng rng(7);
  const QueryPlan plan = gen_queries(dep.params, 5, rng);
  const Frame req{MessageType::query, encode_query_payload(dep.params, plan.batches[1].points)};
  std::vector<std::uint8_t> first;
  for (int round = 0; round < 2; ++round) {
    SocketServer server(std::make_shared<ShareServer>(dep.shares[1]));
    const Frame reply = exchange({1, "127.0.0.1", server.port()}, req, std::chrono::seconds(2));
    ASSERT_EQ(reply.type, MessageType::answer);
    if (round == 0)
      first = reply.payload;
    else
      EXPECT_EQ(reply.payload, first);
  }
}

TEST(Sockets, UnreachableAndSilentServers) {
  const Deployment dep = deploy(2, 2, 3, 2, 5, 72);
  SocketCluster cluster(servers_for(dep.shares));
  Rng rng(8);

  // A stopped server refuses connections.
  auto endpoints = cluster.endpoints;
  cluster.listeners[2]->stop();
  SocketTransport down(endpoints, std::chrono::milliseconds(500));
  RetrievalResult r = retrieve_record(dep.params, down, 3, rng);
  EXPECT_EQ(r.status, RetrievalStatus::transport_error);
  ASSERT_EQ(r.transport_errors.size(), 1u);
  EXPECT_NE(r.transport_errors[0].find("server 2"), std::string::npos);

  // A listener that never answers trips the timeout.
  const int silent = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ASSERT_EQ(::bind(silent, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  ASSERT_EQ(::listen(silent, 8), 0);
  socklen_t len = sizeof addr;
  ::getsockname(silent, reinterpret_cast<sockaddr*>(&addr), &len);
  endpoints = cluster.endpoints;
  endpoints[2].port = ntohs(addr.sin_port);
  SocketTransport slow(endpoints, std::chrono::milliseconds(300));
  const auto start = std::chrono::steady_clock::now();
  r = retrieve_record(dep.params, slow, 3, rng);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
  EXPECT_EQ(r.status, RetrievalStatus::transport_error);
  ASSERT_EQ(r.transport_errors.size(), 1u);
  EXPECT_NE(r.transport_errors[0].find("timed out"), std::string::npos);
  ::close(silent);
}

TEST(Sockets, TimeoutFromEnvironment) {
  ::setenv("MPIR_TIMEOUT_MS", "1234", 1);
  EXPECT_EQ(default_timeout(), std::chrono::milliseconds(1234));
  ::unsetenv("MPIR_TIMEOUT_MS");
  EXPECT_EQ(default_timeout(), std::chrono::milliseconds(5000));
}
