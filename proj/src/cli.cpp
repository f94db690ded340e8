#include "mpir/cli.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpir/pir.hpp"
#include "mpir/transport.hpp"

namespace mpir::cli {
namespace {

constexpr unsigned kDefaultOrders[] = {16, 256};

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

unsigned log2_exact(unsigned q) {
  if (q < 2 || (q & (q - 1)) != 0) throw ParamsError("byte packing needs q to be a power of two, got " + std::to_string(q));
  return static_cast<unsigned>(std::countr_zero(q));
}

unsigned default_degree(unsigned q, unsigned s) { return s * (q - 1) - 1; }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double comm_formula_bits(const CodeParams& p) {
  return static_cast<double>((p.m - 1 + p.sigma) * p.q() * p.sigma) * p.field->symbol_bits();
}

void print_traffic(std::ostream& out, const CodeParams& params, const TrafficReport& t, std::uint64_t runs) {
  out << "traffic: uplink " << t.uplink_info_bits << " bits, downlink " << t.downlink_info_bits << " bits, total "
      << t.total_info_bits() << " bits (expected " << comm_formula_bits(params) * static_cast<double>(runs) << ")\n"
      << "wire: uplink payload " << t.uplink_payload_bytes << " B, downlink payload " << t.downlink_payload_bytes
      << " B, frame headers " << t.frame_header_bytes << " B\n";
}

void print_tuple(std::ostream& out, std::span<const Elem> tuple) {
  for (std::size_t i = 0; i < tuple.size(); ++i) out << (i ? " " : "") << tuple[i].value;
}

void add_traffic(TrafficReport& acc, const TrafficReport& t) {
  acc.uplink_info_bits += t.uplink_info_bits;
  acc.downlink_info_bits += t.downlink_info_bits;
  acc.uplink_payload_bytes += t.uplink_payload_bytes;
  acc.downlink_payload_bytes += t.downlink_payload_bytes;
  acc.frame_header_bytes += t.frame_header_bytes;
}

struct CodeOptions {
  unsigned q = 16;
  unsigned m = 2;
  unsigned s = 2;
  std::optional<unsigned> d;

  CodeParams params(bool protocol) const {
    FieldPtr field = field_of_order(q);
    const unsigned deg = d.value_or(default_degree(q, s));
    return protocol ? make_params(field, m, s, deg) : make_code_params(field, m, s, deg);
  }
};

void add_code_options(CLI::App* cmd, CodeOptions& o) {
  cmd->add_option("--q", o.q, "field order")->capture_default_str();
  cmd->add_option("--m", o.m, "number of variables")->capture_default_str();
  cmd->add_option("--s", o.s, "derivative order")->capture_default_str();
  cmd->add_option("--d", o.d, "degree bound (default s(q-1)-1)");
}

int cmd_params(std::ostream& out, bool table, std::optional<unsigned> q, std::optional<unsigned> m,
               std::optional<unsigned> s, std::optional<unsigned> d, const std::string& db) {
  if (!db.empty()) {
    const DbConfig cfg = parse_db(db);
    std::vector<unsigned> orders;
    if (q) orders.push_back(*q);
    const SchemeRow row = select_params(cfg, orders, m, s);
    out << "database bits N = " << cfg.total_bits() << "\n";
    out << "selected q=" << row.q << " m=" << row.m << " s=" << row.s << " d=" << row.d << ": k = " << row.k
        << " symbols (" << std::llround(static_cast<double>(row.k) * std::log2(row.q)) << " bits), expansion "
        << format_sig2(row.ours_overhead) << ", LDC-locality " << row.queries << ", PIR-locality " << row.servers
        << ", communication " << static_cast<std::uint64_t>(std::llround(row.ours_comm_bits)) << " bits\n";
    return 0;
  }
  if (table || !m || !s) {
    std::vector<SchemeRow> rows;
    for (unsigned order : q ? std::vector<unsigned>{*q} : std::vector<unsigned>(std::begin(kDefaultOrders),
                                                                                 std::end(kDefaultOrders))) {
      auto part = table_rows(field_of_order(order));
      rows.insert(rows.end(), part.begin(), part.end());
    }
    print_table(out, rows);
    return 0;
  }
  const unsigned order = q.value_or(16);
  const CodeParams p = make_code_params(field_of_order(order), *m, *s, d.value_or(default_degree(order, *s)));
  const SchemeRow row = scheme_table(p.field, p.m, p.s, p.d);
  print_table(out, std::span<const SchemeRow>(&row, 1));
  out << "sigma " << p.sigma << ", n " << p.n << ", rate " << p.rate << ", distance >= " << p.distance_bound
      << ", Byzantine servers tolerated " << p.nu << "\n";
  return 0;
}

int cmd_encode(std::ostream& out, const CodeOptions& o, const std::filesystem::path& input,
               const std::filesystem::path& dir) {
  const CodeParams params = o.params(/*protocol=*/true);
  const unsigned bits = log2_exact(params.q());
  const auto bytes = read_file(input);
  if (static_cast<double>(bytes.size()) * 8 > static_cast<double>(params.k) * bits)
    throw ParamsError("input of " + std::to_string(bytes.size()) + " bytes exceeds the code capacity of " +
                      std::to_string(params.k * bits / 8) + " bytes");
  const MultiPoly f = pack_message(params, bytes_to_symbols(bytes, bits));
  const auto shares = preprocess(params, f);
  std::filesystem::create_directories(dir);
  for (const Share& sh : shares) write_share(share_path(dir, sh.hyperplane), sh);
  write_manifest(dir / "manifest.json", Manifest{params.q(), params.m, params.s, params.d, bytes.size()});
  out << "wrote " << shares.size() << " shares of " << share_file_size(params) << " bytes and manifest.json to "
      << dir.string() << "\n";
  return 0;
}

int cmd_serve(std::ostream& out, const std::filesystem::path& share_file, const std::string& host, std::uint16_t port,
              const std::string& mode, std::optional<std::uint64_t> seed, unsigned fixed_value) {
  Share share = read_share(share_file);
  auto server = std::make_shared<ShareServer>(std::move(share), parse_byzantine_mode(mode),
                                              seed.value_or(entropy_seed()), Elem{fixed_value});
  SocketServer listener(server, host, port);
  g_stop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  out << "server " << server->share().hyperplane << " (" << mode << ") listening on " << host << ":"
      << listener.port() << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  listener.stop();
  return 0;
}

struct RetrieveOptions {
  std::filesystem::path endpoints;
  std::filesystem::path manifest;
  std::optional<std::uint64_t> index;
  std::optional<std::uint64_t> record;
  std::uint64_t record_size = 0;
  bool all = false;
  std::filesystem::path output;
  std::optional<std::uint64_t> seed;
};

int cmd_retrieve(std::ostream& out, std::ostream& err, const RetrieveOptions& o) {
  const Manifest man = read_manifest(o.manifest);
  const CodeParams params = make_params(field_of_order(man.q), man.m, man.s, man.d);
  SocketTransport transport(read_endpoints_file(o.endpoints));
  Rng rng(o.seed.value_or(entropy_seed()));

  auto report_failure = [&](const RetrievalResult& r, std::uint64_t j) {
    if (r.status == RetrievalStatus::transport_error) {
      err << "transport error retrieving symbol " << j << "\n";
      for (const auto& e : r.transport_errors) err << "  " << e << "\n";
      return 2;
    }
    err << "decode error retrieving symbol " << j << ": " << to_string(r.recovery.status) << "\n";
    return 3;
  };

  if (o.index) {
    const RetrievalResult r = retrieve_record(params, transport, *o.index, rng);
    if (r.status != RetrievalStatus::ok) return report_failure(r, *o.index);
    out << "symbol " << *o.index << ": ";
    print_tuple(out, r.recovery.value);
    out << "\n";
    print_traffic(out, params, r.traffic, 1);
    return 0;
  }

  // Coefficient packing is not systematic, so bytes come from the whole
  // codeword: every symbol is retrieved privately and the polynomial solved.
  Codeword cw{params, std::vector<Elem>(params.n * params.sigma)};
  TrafficReport total;
  for (std::uint64_t j = 0; j < params.n; ++j) {
    const RetrievalResult r = retrieve_record(params, transport, j, rng);
    if (r.status != RetrievalStatus::ok) return report_failure(r, j);
    std::copy(r.recovery.value.begin(), r.recovery.value.end(), cw.symbols.begin() + static_cast<std::ptrdiff_t>(j * params.sigma));
    add_traffic(total, r.traffic);
  }
  const auto f = decode_codeword(cw);
  if (!f) {
    err << "retrieved symbols do not form a codeword\n";
    return 3;
  }
  const auto bytes = symbols_to_bytes(unpack_message(params, *f), log2_exact(params.q()), man.byte_len);
  std::vector<std::uint8_t> selected = bytes;
  if (o.record) {
    if (o.record_size == 0) throw std::invalid_argument("--record needs --record-size");
    const std::uint64_t begin = *o.record * o.record_size;
    if (begin + o.record_size > bytes.size())
      throw std::invalid_argument("record " + std::to_string(*o.record) + " lies past the end of the data");
    selected.assign(bytes.begin() + static_cast<std::ptrdiff_t>(begin),
                    bytes.begin() + static_cast<std::ptrdiff_t>(begin + o.record_size));
  }
  if (!o.output.empty()) {
    std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
    file.write(reinterpret_cast<const char*>(selected.data()), static_cast<std::streamsize>(selected.size()));
    if (!file) throw std::runtime_error("failed writing " + o.output.string());
    out << "wrote " << selected.size() << " bytes to " << o.output.string() << "\n";
  } else {
    std::ostringstream hex;
    for (std::uint8_t b : selected) hex << std::hex << std::setw(2) << std::setfill('0') << unsigned{b};
    out << hex.str() << "\n";
  }
  out << "protocol runs: " << params.n << "\n";
  print_traffic(out, params, total, params.n);
  return 0;
}

int cmd_privacy_audit(std::ostream& out, const CodeOptions& o, unsigned trials, std::uint64_t target,
                      std::optional<std::uint64_t> seed) {
  const CodeParams params = o.params(/*protocol=*/true);
  const std::uint64_t used_seed = seed.value_or(entropy_seed());
  const PrivacyReport r = privacy_audit(params, trials, target, used_seed);
  out << "privacy audit q=" << params.q() << " m=" << params.m << " s=" << params.s << " d=" << params.d
      << " trials=" << r.trials << " target=" << r.fixed_target << " seed=" << used_seed << "\n";
  out << std::fixed << std::setprecision(4);
  for (std::size_t l = 0; l < r.tv_distance.size(); ++l) out << "server " << l << ": TV " << r.tv_distance[l] << "\n";
  out << "max TV " << r.max_tv << "\n";
  out << "direction chi-square " << r.direction_chi_square << " (dof " << r.direction_dof << "), p = "
      << r.direction_p_value << "\n";
  return 0;
}

int cmd_bench(std::ostream& out, const CodeOptions& o, unsigned trials, std::optional<std::uint64_t> seed) {
  using Clock = std::chrono::steady_clock;
  const CodeParams params = o.params(/*protocol=*/true);
  Rng rng(seed.value_or(entropy_seed()));
  std::uniform_int_distribution<std::uint32_t> sym(0, params.q() - 1);
  std::vector<Elem> msg(params.k);
  for (Elem& e : msg) e = Elem{sym(rng)};

  auto t0 = Clock::now();
  const auto shares = preprocess(params, pack_message(params, msg));
  const double encode_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  std::vector<std::shared_ptr<ShareServer>> servers;
  for (const Share& sh : shares) servers.push_back(std::make_shared<ShareServer>(sh));
  InProcessTransport transport(servers);
  std::uniform_int_distribution<std::uint64_t> pick(0, params.n - 1);
  unsigned failures = 0;
  t0 = Clock::now();
  for (unsigned i = 0; i < trials; ++i)
    if (retrieve_record(params, transport, pick(rng), rng).status != RetrievalStatus::ok) ++failures;
  const double retrieve_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  out << "q=" << params.q() << " m=" << params.m << " s=" << params.s << " d=" << params.d << " k=" << params.k
      << " n=" << params.n << " sigma=" << params.sigma << "\n";
  out << "encode: " << encode_ms << " ms\n";
  out << "retrieve (in-process): " << (trials ? retrieve_ms / trials : 0.0) << " ms per run over " << trials
      << " runs, " << failures << " failures\n";
  return failures ? 3 : 0;
}

}  // namespace

FieldPtr field_of_order(unsigned q) {
  if (q < 2) throw ParamsError("field order must be at least 2");
  unsigned p = 2;
  while (q % p != 0) ++p;
  unsigned e = 0;
  unsigned rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++e;
  }
  if (rest != 1) throw ParamsError(std::to_string(q) + " is not a prime power");
  return make_field(p, e);
}

DbConfig parse_db(const std::string& text) {
  DbConfig cfg;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> cfg.entries >> c1 >> cfg.records >> c2 >> cfg.record_bits) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof())
    throw std::invalid_argument("expected E,S,b, got '" + text + "'");
  if (cfg.total_bits() == 0) throw std::invalid_argument("database size must be positive");
  return cfg;
}

std::vector<Elem> bytes_to_symbols(std::span<const std::uint8_t> bytes, unsigned bits) {
  if (bits == 0 || bits > 16) throw std::invalid_argument("symbol width must be 1..16 bits");
  const std::uint64_t total = static_cast<std::uint64_t>(bytes.size()) * 8;
  std::vector<Elem> out((total + bits - 1) / bits);
  for (std::uint64_t t = 0; t < total; ++t) {
    const unsigned bit = (bytes[t / 8] >> (t % 8)) & 1u;
    out[t / bits].value = static_cast<std::uint16_t>(out[t / bits].value | (bit << (t % bits)));
  }
  return out;
}

std::vector<std::uint8_t> symbols_to_bytes(std::span<const Elem> symbols, unsigned bits, std::size_t byte_len) {
  if (bits == 0 || bits > 16) throw std::invalid_argument("symbol width must be 1..16 bits");
  if (static_cast<std::uint64_t>(byte_len) * 8 > static_cast<std::uint64_t>(symbols.size()) * bits)
    throw std::invalid_argument("not enough symbols for the requested length");
  std::vector<std::uint8_t> out(byte_len);
  for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(byte_len) * 8; ++t) {
    const unsigned bit = (symbols[t / bits].value >> (t % bits)) & 1u;
    out[t / 8] = static_cast<std::uint8_t>(out[t / 8] | (bit << (t % 8)));
  }
  return out;
}

MultiPoly pack_message(const CodeParams& params, std::span<const Elem> symbols) {
  if (symbols.size() > params.k)
    throw ParamsError(std::to_string(symbols.size()) + " symbols exceed the dimension k = " + std::to_string(params.k));
  const auto monomials = monomials_up_to(params.m, params.d);
  MultiPoly f(params.field, params.m);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!params.field->contains(symbols[i].value)) throw ParamsError("symbol outside the field");
    f.set(monomials[i], symbols[i]);
  }
  return f;
}

std::vector<Elem> unpack_message(const CodeParams& params, const MultiPoly& f) {
  const auto monomials = monomials_up_to(params.m, params.d);
  std::vector<Elem> out;
  out.reserve(monomials.size());
  for (const Monomial& j : monomials) out.push_back(f.coeff(j));
  return out;
}

std::string format_sig2(double value) {
  if (value == 0) return "0";
  if (!std::isfinite(value)) return std::to_string(value);
  const double mag = std::fabs(value);
  int exponent = static_cast<int>(std::floor(std::log10(mag)));
  double scale = std::pow(10.0, exponent - 1);
  double rounded = std::round(mag / scale) * scale;
  if (rounded >= std::pow(10.0, exponent + 1)) {
    ++exponent;
    scale = std::pow(10.0, exponent - 1);
    rounded = std::round(mag / scale) * scale;
  }
  std::ostringstream out;
  if (value < 0) out << '-';
  if (exponent >= 1)
    out << std::fixed << std::setprecision(0) << rounded;
  else
    out << std::fixed << std::setprecision(1 - exponent) << rounded;
  return out.str();
}

std::vector<SchemeRow> table_rows(const FieldPtr& field) {
  std::vector<SchemeRow> rows;
  for (unsigned m = 2; m <= 4; ++m)
    for (unsigned s = 1; s <= 6; ++s) rows.push_back(scheme_table(field, m, s, default_degree(field->order(), s)));
  return rows;
}

void print_table(std::ostream& out, std::span<const SchemeRow> rows) {
  out << std::right << std::setw(5) << "q" << std::setw(3) << "m" << std::setw(3) << "s" << std::setw(6) << "d"
      << std::setw(14) << "k" << std::setw(9) << "queries" << std::setw(9) << "servers" << std::setw(8) << "std"
      << std::setw(6) << "ours" << std::setw(11) << "std_bits" << std::setw(11) << "ours_bits" << "\n";
  bool any_flagged = false;
  for (const SchemeRow& r : rows) {
    out << std::setw(5) << r.q << std::setw(3) << r.m << std::setw(3) << r.s << std::setw(6) << r.d << std::setw(14)
        << r.k << std::setw(9) << r.queries << std::setw(9) << r.servers << std::setw(8)
        << format_sig2(r.std_overhead) << std::setw(6) << format_sig2(r.ours_overhead) << std::setw(11)
        << std::llround(r.std_comm_bits) << std::setw(11) << std::llround(r.ours_comm_bits)
        << (r.deployable ? "" : " *") << "\n";
    any_flagged = any_flagged || !r.deployable;
  }
  if (any_flagged) out << "* sigma exceeds q^(m-1): too few transversal lines to run the protocol\n";
}

SchemeRow select_params(const DbConfig& db, std::span<const unsigned> orders, std::optional<unsigned> m,
                        std::optional<unsigned> s) {
  std::vector<unsigned> qs(orders.begin(), orders.end());
  if (qs.empty()) qs.assign(std::begin(kDefaultOrders), std::end(kDefaultOrders));
  std::optional<SchemeRow> best;
  for (unsigned q : qs) {
    for (const SchemeRow& r : table_rows(field_of_order(q))) {
      if ((m && r.m != *m) || (s && r.s != *s) || !r.deployable) continue;
      if (static_cast<double>(r.k) * std::log2(q) < static_cast<double>(db.total_bits())) continue;
      if (!best || r.servers < best->servers ||
          (r.servers == best->servers && r.ours_overhead < best->ours_overhead))
        best = r;
    }
  }
  if (!best) throw ParamsError("no grid parameters hold " + std::to_string(db.total_bits()) + " bits");
  return *best;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  const nlohmann::json j = {{"q", m.q}, {"m", m.m}, {"s", m.s}, {"d", m.d}, {"byte_len", m.byte_len}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    return Manifest{j.at("q").get<unsigned>(), j.at("m").get<unsigned>(), j.at("s").get<unsigned>(),
                    j.at("d").get<unsigned>(), j.at("byte_len").get<std::uint64_t>()};
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error("bad manifest " + path.string() + ": " + ex.what());
  }
}

std::filesystem::path share_path(const std::filesystem::path& dir, unsigned hyperplane) {
  char name[32];
  std::snprintf(name, sizeof name, "share_%03u.mpir", hyperplane);
  return dir / name;
}

PrivacyReport privacy_audit(const CodeParams& params, unsigned trials, std::uint64_t fixed_target, std::uint64_t seed) {
  if (params.m < 2) throw ParamsError("the privacy audit needs m >= 2 (no transversal geometry for m = 1)");
  if (trials < 1000) throw std::invalid_argument("the privacy audit needs at least 1000 trials");
  if (fixed_target >= params.n) throw std::invalid_argument("target out of range");
  const unsigned q = params.q();
  const std::uint64_t h = params.hyperplane_size();

  Rng rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, params.n - 1);
  std::vector<std::vector<std::uint64_t>> fixed_hist(q, std::vector<std::uint64_t>(h));
  std::vector<std::vector<std::uint64_t>> random_hist(q, std::vector<std::uint64_t>(h));
  std::vector<std::uint64_t> class_hist(transversal_direction_count(params));

  for (unsigned t = 0; t < trials; ++t) {
    const QueryPlan fixed = gen_queries(params, fixed_target, rng);
    const QueryPlan random = gen_queries(params, pick(rng), rng);
    for (unsigned l = 0; l < q; ++l) {
      for (const Point& pt : fixed.batches[l].points) ++fixed_hist[l][local_index(params, pt)];
      for (const Point& pt : random.batches[l].points) ++random_hist[l][local_index(params, pt)];
    }
    for (std::uint64_t c : random.lines.direction_classes) ++class_hist[c];
  }

  PrivacyReport r;
  r.trials = trials;
  r.fixed_target = fixed_target;
  const double total = static_cast<double>(trials) * static_cast<double>(params.sigma);
  for (unsigned l = 0; l < q; ++l) {
    double tv = 0;
    for (std::uint64_t i = 0; i < h; ++i)
      tv += std::fabs(static_cast<double>(fixed_hist[l][i]) - static_cast<double>(random_hist[l][i])) / total;
    r.tv_distance.push_back(tv / 2);
  }
  r.max_tv = *std::max_element(r.tv_distance.begin(), r.tv_distance.end());

  const double expected = total / static_cast<double>(class_hist.size());
  for (std::uint64_t c : class_hist) r.direction_chi_square += (c - expected) * (c - expected) / expected;
  r.direction_dof = static_cast<unsigned>(class_hist.size() - 1);
  const boost::math::chi_squared dist(r.direction_dof);
  r.direction_p_value = boost::math::cdf(boost::math::complement(dist, r.direction_chi_square));
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-server private information retrieval over multiplicity codes"};
  app.require_subcommand(1);

  auto* params = app.add_subcommand("params", "print scheme properties or size a database");
  std::optional<unsigned> pq, pm, ps, pd;
  bool table = false;
  std::string db;
  params->add_option("--q", pq, "field order");
  params->add_option("--m", pm, "number of variables");
  params->add_option("--s", ps, "derivative order");
  params->add_option("--d", pd, "degree bound (default s(q-1)-1)");
  params->add_flag("--table", table, "print the full grid m = 2..4, s = 1..6");
  params->add_option("--db", db, "database shape E,S,b for parameter selection");

  auto* encode_cmd = app.add_subcommand("encode", "encode a file into q share files");
  CodeOptions enc;
  std::filesystem::path input, out_dir;
  add_code_options(encode_cmd, enc);
  encode_cmd->add_option("--input", input, "file to encode")->required();
  encode_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* serve = app.add_subcommand("serve", "serve one share over TCP");
  std::filesystem::path share_file;
  std::string host = "127.0.0.1", mode = "honest";
  std::uint16_t port = 0;
  std::optional<std::uint64_t> serve_seed;
  unsigned fixed_value = 0;
  serve->add_option("--share", share_file, "share file")->required();
  serve->add_option("--host", host, "listen address")->capture_default_str();
  serve->add_option("--port", port, "listen port (0 picks a free port)")->capture_default_str();
  serve->add_option("--byzantine", mode, "honest, garbage, fixed or bitflip")->capture_default_str();
  serve->add_option("--seed", serve_seed, "seed for garbage answers");
  serve->add_option("--fixed-value", fixed_value, "symbol sent in fixed mode")->capture_default_str();

  auto* retrieve = app.add_subcommand("retrieve", "privately retrieve a codeword symbol or a record");
  RetrieveOptions ro;
  retrieve->add_option("--endpoints", ro.endpoints, "endpoints file")->required();
  retrieve->add_option("--manifest", ro.manifest, "manifest.json written by encode")->required();
  auto* idx = retrieve->add_option("--index", ro.index, "codeword symbol index");
  auto* rec = retrieve->add_option("--record", ro.record, "record number");
  retrieve->add_option("--record-size", ro.record_size, "record size in bytes");
  auto* all = retrieve->add_flag("--all", ro.all, "retrieve the whole encoded file");
  retrieve->add_option("--output", ro.output, "write retrieved bytes here instead of printing hex");
  retrieve->add_option("--seed", ro.seed, "client randomness seed");
  idx->excludes(rec)->excludes(all);
  rec->excludes(all);

  auto* audit = app.add_subcommand("privacy-audit", "statistical check of query distributions");
  CodeOptions aud{4, 3, 2, {}};
  unsigned audit_trials = 20000;
  std::uint64_t audit_target = 0;
  std::optional<std::uint64_t> audit_seed;
  add_code_options(audit, aud);
  audit->add_option("--trials", audit_trials, "samples per distribution")->capture_default_str();
  audit->add_option("--target", audit_target, "fixed target index")->capture_default_str();
  audit->add_option("--seed", audit_seed, "randomness seed");

  auto* bench = app.add_subcommand("bench", "time encoding and in-process retrieval");
  CodeOptions bo;
  unsigned bench_trials = 20;
  std::optional<std::uint64_t> bench_seed;
  add_code_options(bench, bo);
  bench->add_option("--trials", bench_trials, "retrievals to time")->capture_default_str();
  bench->add_option("--seed", bench_seed, "randomness seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*params) return cmd_params(out, table, pq, pm, ps, pd, db);
    if (*encode_cmd) return cmd_encode(out, enc, input, out_dir);
    if (*serve) return cmd_serve(out, share_file, host, port, mode, serve_seed, fixed_value);
    if (*retrieve) {
      if (!ro.index && !ro.record && !ro.all) throw std::invalid_argument("give --index, --record or --all");
      return cmd_retrieve(out, err, ro);
    }
    if (*audit) return cmd_privacy_audit(out, aud, audit_trials, audit_target, audit_seed);
    if (*bench) return cmd_bench(out, bo, bench_trials, bench_seed);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace mpir::cli
