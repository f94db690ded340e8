#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mpir/multcode.hpp"

namespace mpir::cli {

/// GF(q) for a prime power q, with the fixed moduli for 16 and 256.
FieldPtr field_of_order(unsigned q);

/// A database of `entries` entries, each with `records` records of
/// `record_bits` bits.
struct DbConfig {
  std::uint64_t entries = 0;
  std::uint64_t records = 0;
  std::uint64_t record_bits = 0;

  std::uint64_t total_bits() const { return entries * records * record_bits; }
};

/// Parses "E,S,b".
DbConfig parse_db(const std::string& text);

/// Splits the little-endian bit stream of `bytes` into symbols of `bits` bits.
std::vector<Elem> bytes_to_symbols(std::span<const std::uint8_t> bytes, unsigned bits);
/// Inverse of bytes_to_symbols, truncated to `byte_len` bytes.
std::vector<std::uint8_t> symbols_to_bytes(std::span<const Elem> symbols, unsigned bits, std::size_t byte_len);

/// Symbol i becomes the coefficient of the i-th monomial in graded-lex order;
/// missing symbols are zero. Throws ParamsError if there are more than k.
MultiPoly pack_message(const CodeParams& params, std::span<const Elem> symbols);
/// The k coefficients in graded-lex order.
std::vector<Elem> unpack_message(const CodeParams& params, const MultiPoly& f);

/// Two significant figures: 32, 2.1, 1500, 6.0.
std::string format_sig2(double value);

/// The table grid for one q: m = 2..4, s = 1..6, d = s(q-1)-1.
std::vector<SchemeRow> table_rows(const FieldPtr& field);
void print_table(std::ostream& out, std::span<const SchemeRow> rows);

/// Among the deployable grid rows that hold the database (k log2 q >= N),
/// the one with the fewest servers, then the smallest storage overhead.
/// `m` and `s` pin the corresponding grid coordinate when given; `orders`
/// lists the candidate q (16 and 256 when empty).
SchemeRow select_params(const DbConfig& db, std::span<const unsigned> orders, std::optional<unsigned> m = {},
                        std::optional<unsigned> s = {});

/// Public metadata written next to the shares.
struct Manifest {
  unsigned q = 0, m = 0, s = 0, d = 0;
  std::uint64_t byte_len = 0;
};

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);
std::filesystem::path share_path(const std::filesystem::path& dir, unsigned hyperplane);

/// Per-server comparison of the queried-point distribution for a fixed target
/// against uniformly random targets, plus a chi-square test that sampled
/// direction classes are uniform.
struct PrivacyReport {
  unsigned trials = 0;
  std::uint64_t fixed_target = 0;
  std::vector<double> tv_distance;  // one per server
  double max_tv = 0;
  double direction_chi_square = 0;
  unsigned direction_dof = 0;
  double direction_p_value = 0;
};

/// Requires m >= 2 and trials >= 1000.
PrivacyReport privacy_audit(const CodeParams& params, unsigned trials, std::uint64_t fixed_target, std::uint64_t seed);

/// Entry point of the command-line tool.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpir::cli
