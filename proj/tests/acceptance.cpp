// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mpir/cli.hpp"
#include "mpir/pir.hpp"
#include "mpir/transport.hpp"
#include "oracles.hpp"

using namespace mpir;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

// ---- 1. table reproduction ----

struct ExpectedRow {
  unsigned q, m, s, d;
  std::uint64_t k, queries, servers;
  const char *std_overhead, *ours_overhead;
  std::uint64_t std_bits, ours_bits;
};

// Expected scheme properties, q = 16 then q = 256.
const ExpectedRow kExpected[] = {
    {16, 2, 1, 14, 120, 15, 16, "32", "2.1", 180, 128},
    {16, 2, 2, 29, 465, 45, 16, "25", "1.7", 900, 768},
    {16, 2, 3, 44, 1035, 90, 16, "22", "1.5", 2880, 2688},
    {16, 2, 4, 59, 1830, 150, 16, "21", "1.4", 7200, 7040},
    {16, 2, 5, 74, 2850, 225, 16, "20", "1.3", 15300, 15360},
    {16, 2, 6, 89, 4095, 315, 16, "20", "1.3", 28980, 29568},
    {16, 3, 1, 14, 680, 15, 16, "90", "6.0", 240, 192},
    {16, 3, 2, 29, 4960, 60, 16, "50", "3.3", 1680, 1536},
    {16, 3, 3, 44, 16215, 150, 16, "38", "2.5", 7800, 7680},
    {16, 3, 4, 59, 37820, 300, 16, "32", "2.2", 27600, 28160},
    {16, 3, 5, 74, 73150, 525, 16, "29", "2.0", 79800, 82880},
    {16, 3, 6, 89, 125580, 840, 16, "27", "1.8", 198240, 207872},
    {16, 4, 1, 14, 3060, 15, 16, "320", "21", 300, 256},
    {16, 4, 2, 29, 40920, 75, 16, "120", "8.0", 2700, 2560},
    {16, 4, 3, 44, 194580, 225, 16, "76", "5.1", 17100, 17280},
    {16, 4, 4, 59, 595665, 525, 16, "58", "3.9", 81900, 85120},
    {16, 4, 5, 74, 1426425, 1050, 16, "48", "3.2", 310800, 327040},
    {16, 4, 6, 89, 2919735, 1890, 16, "42", "2.8", 982800, 1040256},
    {256, 2, 1, 254, 32640, 255, 256, "510", "2.0", 6120, 4096},
    {256, 2, 2, 509, 130305, 765, 256, "380", "1.5", 30600, 24576},
    {256, 2, 3, 764, 292995, 1530, 256, "340", "1.3", 97920, 86016},
    {256, 2, 4, 1019, 520710, 2550, 256, "320", "1.3", 244800, 225280},
    {256, 2, 5, 1274, 813450, 3825, 256, "310", "1.2", 520200, 491520},
    {256, 2, 6, 1529, 1171215, 5355, 256, "300", "1.2", 985320, 946176},
    {256, 3, 1, 254, 2796160, 255, 256, "1500", "6.0", 8160, 6144},
    {256, 3, 2, 509, 22238720, 1020, 256, "770", "3.0", 57120, 49152},
    {256, 3, 3, 764, 74909055, 2550, 256, "570", "2.2", 265200, 245760},
    {256, 3, 4, 1019, 177388540, 5100, 256, "480", "1.9", 938400, 901120},
    {256, 3, 5, 1274, 346258550, 8925, 256, "430", "1.7", 2713200, 2652160},
    {256, 3, 6, 1529, 598100460, 14280, 256, "400", "1.6", 6740160, 6651904},
    {256, 4, 1, 254, 180352320, 255, 256, "6100", "24", 10200, 8192},
    {256, 4, 2, 509, 2852115840ull, 1275, 256, "1900", "7.5", 91800, 81920},
    {256, 4, 3, 764, 14382538560ull, 3825, 256, "1100", "4.5", 581400, 552960},
    {256, 4, 4, 1019, 45367119105ull, 8925, 256, "840", "3.3", 2784600, 2723840},
    {256, 4, 5, 1274, 110629606725ull, 17850, 256, "690", "2.7", 10567200, 10465280},
    {256, 4, 6, 1529, 229222001295ull, 32130, 256, "600", "2.4", 33415200, 33288192},
};

// One unit in the second significant figure of the expected value.
double display_unit(double expected) {
  return std::pow(10.0, std::floor(std::log10(std::fabs(expected))) - 1);
}

Verdict table_reproduction() {
  const char* argv[] = {"mpir", "params", "--table"};
  std::ostringstream out, err;
  if (cli::run(3, argv, out, err) != 0) return {false, "params --table failed: " + err.str()};
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  std::size_t matched = 0;
  for (const ExpectedRow& want : kExpected) {
    if (!std::getline(lines, line)) return {false, "output ended after " + std::to_string(matched) + " rows"};
    std::istringstream fields(line);
    unsigned q, m, s, d;
    std::uint64_t k, queries, servers, std_bits, ours_bits;
    std::string std_oh, ours_oh;
    fields >> q >> m >> s >> d >> k >> queries >> servers >> std_oh >> ours_oh >> std_bits >> ours_bits;
    std::ostringstream where;
    where << "row q=" << want.q << " m=" << want.m << " s=" << want.s << ": ";
    if (q != want.q || m != want.m || s != want.s || d != want.d) return {false, where.str() + "parameters differ"};
    if (k != want.k || queries != want.queries || servers != want.servers)
      return {false, where.str() + "k/queries/servers differ"};
    const double ps = std::stod(want.std_overhead), po = std::stod(want.ours_overhead);
    if (std::fabs(std::stod(std_oh) - ps) > display_unit(ps) * 1.0001 ||
        std::fabs(std::stod(ours_oh) - po) > display_unit(po) * 1.0001)
      return {false, where.str() + "overhead " + std_oh + "/" + ours_oh + " vs " + want.std_overhead + "/" +
                         want.ours_overhead};
    const auto diff = [](std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; };
    if (diff(std_bits, want.std_bits) > 1 || diff(ours_bits, want.ours_bits) > 1)
      return {false, where.str() + "communication differs"};
    ++matched;
  }
  return {true, std::to_string(matched) + "/36 rows match"};
}

// ---- helpers for protocol runs ----

struct Instance {
  CodeParams params;
  Codeword cw;
  std::vector<Share> shares;
};

Instance random_instance(const CodeParams& params, std::mt19937_64& rng) {
  Codeword cw = encode(params, oracle::random_poly(params.field, params.m, params.d, rng));
  auto shares = partition(cw);
  return {params, std::move(cw), std::move(shares)};
}

std::vector<std::shared_ptr<ShareServer>> honest_servers(const std::vector<Share>& shares) {
  std::vector<std::shared_ptr<ShareServer>> out;
  for (const Share& s : shares) out.push_back(std::make_shared<ShareServer>(s));
  return out;
}

// ---- 2. communication ----

Verdict communication() {
  std::mt19937_64 rng(2);
  std::ostringstream detail;
  bool ok = true;
  for (const auto& [s, d, expected] : {std::tuple{2u, 29u, 768.0}, std::tuple{1u, 14u, 128.0}}) {
    const Instance inst = random_instance(make_params(cli::field_of_order(16), 2, s, d), rng);
    InProcessTransport transport(honest_servers(inst.shares));
    Rng prng(rng());
    const RetrievalResult r = retrieve_record(inst.params, transport, rng() % inst.params.n, prng);
    ok = ok && r.status == RetrievalStatus::ok && r.traffic.total_info_bits() == expected;
    detail << "(16,2," << s << "," << d << "): " << r.traffic.uplink_info_bits << "+" << r.traffic.downlink_info_bits
           << "=" << r.traffic.total_info_bits() << " bits; ";
  }
  return {ok, detail.str()};
}

// ---- 3. end-to-end ----

Verdict end_to_end() {
  std::mt19937_64 rng(3);
  std::ostringstream detail;
  unsigned failures = 0, runs = 0;
  for (const auto& [p, e, m, s, d] : {std::tuple{2u, 4u, 2u, 2u, 29u}, std::tuple{2u, 2u, 3u, 2u, 5u}}) {
    const CodeParams params = make_params(make_field(p, e), m, s, d);
    for (int trial = 0; trial < 100; ++trial) {
      const Instance inst = random_instance(params, rng);
      const std::uint64_t j = rng() % params.n;
      const auto servers = honest_servers(inst.shares);

      InProcessTransport local(servers);
      Rng a(rng());
      const RetrievalResult rl = retrieve_record(params, local, j, a);

      std::vector<std::unique_ptr<SocketServer>> listeners;
      std::vector<Endpoint> endpoints;
      for (unsigned l = 0; l < servers.size(); ++l) {
        listeners.push_back(std::make_unique<SocketServer>(servers[l]));
        endpoints.push_back({l, "127.0.0.1", listeners.back()->port()});
      }
      SocketTransport sockets(endpoints);
      Rng b(rng());
      const RetrievalResult rs = retrieve_record(params, sockets, j, b);

      runs += 2;
      const EvalTuple truth = inst.cw.tuple(j);
      failures += rl.status != RetrievalStatus::ok || rl.recovery.value != truth;
      failures += rs.status != RetrievalStatus::ok || rs.recovery.value != truth;
    }
  }
  detail << runs << " retrievals (in-process and sockets), " << failures << " failures";
  return {failures == 0, detail.str()};
}

// ---- 4. Byzantine robustness ----

struct DrillStats {
  unsigned correct = 0, failed = 0, wrong = 0;
};

DrillStats byzantine_drill(const CodeParams& params, ByzantineMode mode, unsigned adversaries, unsigned trials,
                           std::mt19937_64& rng) {
  DrillStats st;
  for (unsigned trial = 0; trial < trials; ++trial) {
    const Instance inst = random_instance(params, rng);
    const std::uint64_t j = rng() % params.n;
    Rng prng(rng());
    const QueryPlan plan = gen_queries(params, j, prng);
    // Adversaries are drawn among the servers whose answers are actually used.
    std::vector<unsigned> candidates;
    for (unsigned l = 0; l < params.q(); ++l)
      if (l != plan.hiding_server) candidates.push_back(l);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::vector<std::shared_ptr<ShareServer>> servers = honest_servers(inst.shares);
    const Elem fixed{static_cast<std::uint32_t>(rng() % params.q())};
    for (unsigned a = 0; a < adversaries; ++a)
      servers[candidates[a]] = std::make_shared<ShareServer>(inst.shares[candidates[a]], mode, rng(), fixed);
    InProcessTransport transport(servers);
    const FanoutResult fan = transport.fanout(params, plan);
    const RecoverResult r = reconstruct(params, plan, fan.answers);
    if (r.status != RecoverStatus::ok)
      ++st.failed;
    else if (r.value == inst.cw.tuple(j))
      ++st.correct;
    else
      ++st.wrong;
  }
  return st;
}

Verdict byzantine() {
  std::mt19937_64 rng(4);
  const CodeParams params = make_params(cli::field_of_order(16), 2, 2, 14);
  if (params.nu != 4) return {false, "nu = " + std::to_string(params.nu)};
  std::ostringstream detail;
  bool ok = true;
  for (ByzantineMode mode : {ByzantineMode::garbage, ByzantineMode::fixed, ByzantineMode::bitflip}) {
    const DrillStats four = byzantine_drill(params, mode, 4, 100, rng);
    const DrillStats five = byzantine_drill(params, mode, 5, 100, rng);
    ok = ok && four.correct == 100 && five.wrong == 0;
    detail << to_string(mode) << ": 4 bad " << four.correct << " ok/" << four.failed << " fail/" << four.wrong
           << " wrong, 5 bad " << five.correct << "/" << five.failed << "/" << five.wrong << "; ";
  }
  return {ok, detail.str()};
}

// ---- 5. univariate decoder ----

Verdict univariate_exhaustive() {
  std::mt19937_64 rng(5);
  std::uint64_t cases = 0, bad = 0;
  {
    const FieldPtr f = make_field(2, 3);
    const unsigned s = 2, d = 5, q = 8;
    for (int poly = 0; poly < 10; ++poly) {
      const UniPoly g = oracle::random_unipoly(f, d, rng);
      const LineWord clean = line_encode(g, s);
      const std::size_t n = clean.positions();
      auto check = [&](const LineWord& w) {
        ++cases;
        const BwResult r = bw_decode(f, w, d);
        if (r.status != BwStatus::decoded || !(*r.poly == g)) ++bad;
      };
      check(clean);
      // Every replacement tuple differing from the clean one, at one or two
      // positions.
      for (std::size_t p1 = 0; p1 < n; ++p1)
        for (unsigned v1 = 0; v1 < q * q; ++v1) {
          LineWord w1 = clean;
          w1.at(p1, 0) = Elem{v1 % q};
          w1.at(p1, 1) = Elem{v1 / q};
          if (w1 == clean) continue;
          check(w1);
          for (std::size_t p2 = p1 + 1; p2 < n; ++p2)
            for (unsigned v2 = 0; v2 < q * q; ++v2) {
              LineWord w2 = w1;
              w2.at(p2, 0) = Elem{v2 % q};
              w2.at(p2, 1) = Elem{v2 / q};
              if (w2.at(p2, 0) == clean.at(p2, 0) && w2.at(p2, 1) == clean.at(p2, 1)) continue;
              check(w2);
            }
        }
    }
  }
  std::uint64_t rs_cases = 0, rs_bad = 0;
  {
    const FieldPtr f = make_field(5, 1);
    for (unsigned c0 = 0; c0 < 5; ++c0)
      for (unsigned c1 = 0; c1 < 5; ++c1) {
        const UniPoly g(f, {Elem{c0}, Elem{c1}});
        const LineWord clean = line_encode(g, 1);
        for (std::size_t pos = 0; pos < clean.positions(); ++pos)
          for (unsigned v = 0; v < 5; ++v) {
            if (Elem{v} == clean.at(pos, 0)) continue;
            LineWord w = clean;
            w.at(pos, 0) = Elem{v};
            ++rs_cases;
            const BwResult r = bw_decode(f, w, 1);
            if (r.status != BwStatus::decoded || !(*r.poly == g)) ++rs_bad;
          }
      }
  }
  std::ostringstream detail;
  detail << "(8,2,5): " << cases - bad << "/" << cases << " corrected; (5,1,1): " << rs_cases - rs_bad << "/"
         << rs_cases;
  return {bad == 0 && rs_bad == 0, detail.str()};
}

// ---- 6. minimum distance ----

Verdict minimum_distance() {
  const CodeParams p = make_code_params(make_field(3, 1), 1, 2, 3);
  std::set<std::vector<Elem>> words;
  std::size_t min_weight = p.n + 1;
  for (unsigned code = 0; code < 81; ++code) {
    MultiPoly F(p.field, 1);
    for (unsigned i = 0, c = code; i < 4; ++i, c /= 3) F.set({i}, Elem{c % 3});
    const Codeword cw = encode(p, F);
    words.insert(cw.symbols);
    if (F.is_zero()) continue;
    std::size_t weight = 0;
    for (std::uint64_t i = 0; i < p.n; ++i) {
      const auto t = cw.at(i);
      weight += std::any_of(t.begin(), t.end(), [](Elem e) { return !e.is_zero(); });
    }
    min_weight = std::min(min_weight, weight);
  }
  std::ostringstream detail;
  detail << "81 codewords, " << words.size() << " distinct, min weight " << min_weight << " >= bound "
         << p.distance_bound;
  return {words.size() == 81 && static_cast<double>(min_weight) >= p.distance_bound, detail.str()};
}

// ---- 7. Hasse calculus ----

Verdict hasse_calculus() {
  std::mt19937_64 rng(7);
  std::uint64_t instances = 0, bad = 0;
  for (unsigned q : {4u, 5u, 16u}) {
    const FieldPtr f = cli::field_of_order(q);
    for (unsigned m = 1; m <= 3; ++m)
      for (int trial = 0; trial < 1000; ++trial) {
        ++instances;
        const unsigned deg = static_cast<unsigned>(rng() % 7);
        const MultiPoly F = oracle::random_poly(f, m, deg, rng);
        bool ok = true;
        // Shift expansion: F(X+Z) = sum_i F^{(i)}(X) Z^i.
        const auto expansion = oracle::shift_expansion(F);
        for (const Monomial& i : monomials_up_to(m, deg + 1)) {
          const auto it = expansion.find(i);
          ok = ok && hasse_derivative(F, i) == (it == expansion.end() ? MultiPoly(f, m) : it->second);
        }
        // Line identities at a random point, direction and parameter.
        const Point P = oracle::random_point(*f, m, rng), V = oracle::random_direction(*f, m, rng);
        const Elem a = oracle::random_point(*f, 1, rng)[0];
        const UniPoly line = oracle::line_restriction(F, P, V);
        const UniPoly shifted = oracle::univariate_shift(line, a);
        for (unsigned i = 0; i <= deg + 1; ++i) {
          ok = ok && line_coeff_identity(F, P, V, i) == line.coeff(i);
          ok = ok && line_hasse_identity(F, P, V, i, a) == shifted.coeff(i);
        }
        bad += !ok;
      }
  }
  return {bad == 0, std::to_string(instances - bad) + "/" + std::to_string(instances) + " instances pass"};
}

// ---- 8. privacy ----

Verdict privacy() {
  const CodeParams params = make_params(cli::field_of_order(4), 3, 2, 5);
  double max_tv = 0, min_p = 1;
  for (std::uint64_t target : {0ull, 21ull, 63ull}) {
    const cli::PrivacyReport r = cli::privacy_audit(params, 20000, target, 1000 + target);
    max_tv = std::max(max_tv, r.max_tv);
    min_p = std::min(min_p, r.direction_p_value);
  }
  std::ostringstream detail;
  detail << "max per-server TV " << max_tv << " over 3 targets, min direction chi-square p " << min_p;
  return {max_tv < 0.02 && min_p > 0.01, detail.str()};
}

// ---- 9. storage ----

Verdict storage() {
  std::mt19937_64 rng(9);
  const CodeParams params = make_params(cli::field_of_order(16), 2, 2, 29);
  const Instance inst = random_instance(params, rng);
  const auto dir = std::filesystem::temp_directory_path() / ("mpir_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  std::uint64_t body = 0, per_server_max = 0;
  for (const Share& sh : inst.shares) {
    const auto path = cli::share_path(dir, sh.hyperplane);
    write_share(path, sh);
    const std::uint64_t b = std::filesystem::file_size(path) - share_header_size(params);
    body += b;
    per_server_max = std::max(per_server_max, b);
  }
  std::filesystem::remove_all(dir);
  const std::uint64_t symbols = body / params.field->symbol_bytes();
  const double overhead = static_cast<double>(symbols) / static_cast<double>(params.k);
  const double per_server = static_cast<double>(params.k) / (params.rate * params.q());
  std::ostringstream detail;
  char ratio[16];
  std::snprintf(ratio, sizeof ratio, "%.2f", overhead);
  detail << symbols << " stored symbols for k=" << params.k << " (" << ratio << "x, 1/R=" << 1 / params.rate
         << "), " << per_server_max << " per server";
  const bool ok = symbols == params.sigma * params.n && std::string(ratio) == "1.65" &&
                  std::fabs(overhead - 1 / params.rate) < 1e-9 &&
                  std::fabs(static_cast<double>(per_server_max) - per_server) < 1e-9;
  return {ok, detail.str()};
}

// ---- 10. sizing ----

Verdict sizing() {
  const cli::DbConfig db = cli::parse_db("90000,1,128");
  const unsigned q256[] = {256}, q16[] = {16};
  const SchemeRow a = cli::select_params(db, q256, 3u, 1u);
  const SchemeRow b = cli::select_params(db, q16);
  std::ostringstream detail;
  detail << "q=256 -> m=" << a.m << " s=" << a.s << " k=" << a.k << " expansion " << cli::format_sig2(a.ours_overhead)
         << "; q=16 -> m=" << b.m << " s=" << b.s << " k=" << b.k << " expansion " << cli::format_sig2(b.ours_overhead);
  const bool ok = a.k == 2796160 && cli::format_sig2(a.ours_overhead) == "6.0" && b.m == 4 && b.s == 6 &&
                  b.k == 2919735 && cli::format_sig2(b.ours_overhead) == "2.8" && b.servers == 16;
  return {ok, detail.str()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "table reproduction", 1, table_reproduction},
      {2, "communication accounting", 1, communication},
      {3, "end-to-end correctness", 30, end_to_end},
      {4, "Byzantine robustness", 60, byzantine},
      {5, "univariate decoder exhaustiveness", 120, univariate_exhaustive},
      {6, "minimum distance", 10, minimum_distance},
      {7, "Hasse calculus", 60, hasse_calculus},
      {8, "privacy audit", 60, privacy},
      {9, "storage overhead", 1, storage},
      {10, "database sizing", 5, sizing},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = v.ok && in_time;
    failed += !pass;
    std::printf("[%s] %2d %-34s %7.2fs (limit %gs)%s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limit_seconds, in_time ? "" : " TOO SLOW", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed ? 1 : 0;
}
