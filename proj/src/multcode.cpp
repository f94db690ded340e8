#include "mpir/multcode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mpir/linalg.hpp"

namespace mpir {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > UINT64_MAX) throw ParamsError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  unsigned __int128 result = 1;
  for (unsigned i = 0; i < exp; ++i) {
    result *= base;
    if (result > UINT64_MAX) throw ParamsError("power overflows 64 bits");
  }
  return static_cast<std::uint64_t>(result);
}

CodeParams make_code_params(FieldPtr field, unsigned m, unsigned s, unsigned d) {
  if (!field) throw ParamsError("null field");
  if (m < 1) throw ParamsError("m must be at least 1");
  if (s < 1) throw ParamsError("s must be at least 1");
  const unsigned q = field->order();
  if (static_cast<std::uint64_t>(d) >= static_cast<std::uint64_t>(s) * (q - 1))
    throw ParamsError("degree " + std::to_string(d) + " must be below s(q-1) = " + std::to_string(s * (q - 1)));

  CodeParams p;
  p.field = std::move(field);
  p.m = m;
  p.s = s;
  p.d = d;
  p.sigma = binomial(m + s - 1, m);
  p.k = binomial(static_cast<std::uint64_t>(m) + d, m);
  p.n = ipow(q, m);
  p.rate = static_cast<double>(p.k) / (static_cast<double>(p.sigma) * static_cast<double>(p.n));
  p.distance_bound = static_cast<double>(p.n) - static_cast<double>(d) / s * static_cast<double>(p.n / q);
  // floor((q-1-d/s)/2) = floor((s(q-1)-d) / 2s); the numerator is positive here.
  p.nu = static_cast<unsigned>((static_cast<std::uint64_t>(s) * (q - 1) - d) / (2ull * s));
  p.derivative_orders = monomials_up_to(m, s - 1);
  if (p.derivative_orders.size() != p.sigma) throw ParamsError("derivative order count mismatch");
  return p;
}

CodeParams make_params(FieldPtr field, unsigned m, unsigned s, unsigned d) {
  CodeParams p = make_code_params(std::move(field), m, s, d);
  if (!p.fits_transversal_lines())
    throw ParamsError("sigma = " + std::to_string(p.sigma) + " exceeds the " + std::to_string(p.hyperplane_size()) +
                      " transversal lines through a point");
  return p;
}

std::uint64_t point_index(const CodeParams& params, std::span<const Elem> point) {
  if (point.size() != params.m) throw ParamsError("point dimension mismatch");
  const unsigned q = params.q();
  std::uint64_t idx = 0;
  for (std::size_t k = point.size(); k-- > 0;) {
    if (point[k].value >= q) throw ParamsError("point coordinate outside the field");
    idx = idx * q + point[k].value;
  }
  return idx;
}

Point index_point(const CodeParams& params, std::uint64_t index) {
  if (index >= params.n) throw ParamsError("point index " + std::to_string(index) + " out of range");
  const unsigned q = params.q();
  Point p(params.m);
  for (unsigned k = 0; k < params.m; ++k) {
    p[k] = Elem{static_cast<std::uint32_t>(index % q)};
    index /= q;
  }
  return p;
}

unsigned hyperplane_of(const CodeParams& params, std::span<const Elem> point) {
  if (point.size() != params.m) throw ParamsError("point dimension mismatch");
  return point.back().value;
}

std::uint64_t local_index(const CodeParams& params, std::span<const Elem> point) {
  return point_index(params, point) % params.hyperplane_size();
}

Point hyperplane_point(const CodeParams& params, unsigned hyperplane, std::uint64_t local) {
  if (hyperplane >= params.q()) throw ParamsError("hyperplane index out of range");
  if (local >= params.hyperplane_size()) throw ParamsError("local index out of range");
  return index_point(params, static_cast<std::uint64_t>(hyperplane) * params.hyperplane_size() + local);
}

namespace {

using TermList = std::vector<std::pair<Monomial, Elem>>;

// Evaluates the terms (which only involve variables 0..var) on all q^(var+1)
// points of the first var+1 coordinates, first coordinate fastest.
std::vector<Elem> eval_grid_rec(const Field& field, const std::vector<std::vector<Elem>>& powers,
                                const TermList& terms, int var) {
  if (var < 0) {
    Elem acc{};
    for (const auto& [j, c] : terms) acc = field.add(acc, c);
    return {acc};
  }
  const unsigned q = field.order();
  std::map<unsigned, TermList> groups;
  for (const auto& [j, c] : terms) groups[j[var]].emplace_back(j, c);

  std::size_t inner = 1;
  for (int k = 0; k < var; ++k) inner *= q;
  std::vector<Elem> out(inner * q);
  for (const auto& [exponent, group] : groups) {
    const std::vector<Elem> sub = eval_grid_rec(field, powers, group, var - 1);
    for (unsigned x = 0; x < q; ++x) {
      const Elem w = powers[x][exponent];
      if (w.is_zero()) continue;
      Elem* dst = out.data() + static_cast<std::size_t>(x) * inner;
      for (std::size_t r = 0; r < inner; ++r) dst[r] = field.add(dst[r], field.mul(w, sub[r]));
    }
  }
  return out;
}

}  // namespace

std::vector<Elem> evaluate_on_grid(const MultiPoly& f) {
  const Field& field = *f.field();
  const unsigned q = field.order();
  const int deg = std::max(f.degree(), 0);
  std::vector<std::vector<Elem>> powers(q, std::vector<Elem>(deg + 1));
  for (unsigned x = 0; x < q; ++x) {
    powers[x][0] = Elem{1};
    for (int e = 1; e <= deg; ++e) powers[x][e] = field.mul(powers[x][e - 1], Elem{x});
  }
  TermList terms(f.terms().begin(), f.terms().end());
  return eval_grid_rec(field, powers, terms, static_cast<int>(f.vars()) - 1);
}

Codeword encode(const CodeParams& params, const MultiPoly& f) {
  if (f.vars() != params.m) throw ParamsError("polynomial has the wrong number of variables");
  if (!f.field()->same_as(*params.field)) throw ParamsError("polynomial over a different field");
  if (f.degree() > static_cast<int>(params.d))
    throw ParamsError("polynomial degree " + std::to_string(f.degree()) + " exceeds d = " + std::to_string(params.d));

  Codeword cw{params, std::vector<Elem>(params.n * params.sigma)};
  for (std::size_t v = 0; v < params.sigma; ++v) {
    const std::vector<Elem> values = evaluate_on_grid(hasse_derivative(f, params.derivative_orders[v]));
    for (std::uint64_t i = 0; i < params.n; ++i) cw.symbols[i * params.sigma + v] = values[i];
  }
  return cw;
}

std::optional<MultiPoly> decode_codeword(const Codeword& cw) {
  const CodeParams& params = cw.params;
  const Field& field = *params.field;
  const unsigned p = field.characteristic();
  const std::vector<Monomial> monomials = monomials_up_to(params.m, params.d);

  Matrix a(params.n * params.sigma, monomials.size());
  std::vector<Elem> rhs(a.rows());
  for (std::uint64_t i = 0; i < params.n; ++i) {
    const Point pt = index_point(params, i);
    for (std::size_t v = 0; v < params.sigma; ++v) {
      const Monomial& order = params.derivative_orders[v];
      const std::size_t row = i * params.sigma + v;
      rhs[row] = cw.symbols[row];
      for (std::size_t c = 0; c < monomials.size(); ++c) {
        const Monomial& j = monomials[c];
        unsigned coef = 1;
        Elem value{1};
        for (unsigned k = 0; k < params.m && coef; ++k) {
          if (j[k] < order[k]) {
            coef = 0;
            break;
          }
          coef = coef * binom_mod_p(j[k], order[k], p) % p;
          value = field.mul(value, field.pow(pt[k], j[k] - order[k]));
        }
        if (coef) a.at(row, c) = field.mul(value, field.from_int(coef));
      }
    }
  }
  const LinearSolution sol = solve(field, a, rhs);
  if (sol.status != SolveStatus::unique) return std::nullopt;
  MultiPoly f(params.field, params.m);
  for (std::size_t c = 0; c < monomials.size(); ++c) f.set(monomials[c], sol.x[c]);
  return f;
}

std::vector<Share> partition(const Codeword& cw) {
  const CodeParams& params = cw.params;
  const std::size_t block = params.hyperplane_size() * params.sigma;
  std::vector<Share> shares;
  shares.reserve(params.q());
  for (unsigned l = 0; l < params.q(); ++l) {
    auto first = cw.symbols.begin() + static_cast<std::ptrdiff_t>(l * block);
    shares.push_back(Share{params, l, std::vector<Elem>(first, first + static_cast<std::ptrdiff_t>(block))});
  }
  return shares;
}

Codeword concatenate(std::span<const Share> shares) {
  if (shares.empty()) throw ParamsError("no shares");
  const CodeParams& params = shares.front().params;
  if (shares.size() != params.q()) throw ParamsError("expected one share per hyperplane");
  Codeword cw{params, {}};
  cw.symbols.reserve(params.n * params.sigma);
  for (unsigned l = 0; l < shares.size(); ++l) {
    const Share& sh = shares[l];
    if (!(sh.params == params) || sh.hyperplane != l) throw ParamsError("shares out of order or mismatched");
    cw.symbols.insert(cw.symbols.end(), sh.symbols.begin(), sh.symbols.end());
  }
  return cw;
}

std::uint64_t transversal_direction_count(const CodeParams& params) { return params.hyperplane_size(); }

Point transversal_direction(const CodeParams& params, std::uint64_t index) {
  if (index >= transversal_direction_count(params)) throw ParamsError("direction index out of range");
  const unsigned q = params.q();
  Point u(params.m);
  for (unsigned k = 0; k + 1 < params.m; ++k) {
    u[k] = Elem{static_cast<std::uint32_t>(index % q)};
    index /= q;
  }
  u.back() = Elem{1};
  return u;
}

std::uint64_t direction_class_count(const CodeParams& params) { return (params.n - 1) / (params.q() - 1); }

Point direction_class(const CodeParams& params, std::uint64_t index) {
  if (index >= direction_class_count(params)) throw ParamsError("direction class index out of range");
  const unsigned q = params.q();
  // Classes whose last nonzero coordinate sits at position `lead`, lead = m-1 first.
  for (unsigned lead = params.m; lead-- > 0;) {
    const std::uint64_t block = ipow(q, lead);
    if (index < block) {
      Point u(params.m);
      for (unsigned k = 0; k < lead; ++k) {
        u[k] = Elem{static_cast<std::uint32_t>(index % q)};
        index /= q;
      }
      u[lead] = Elem{1};
      return u;
    }
    index -= block;
  }
  throw ParamsError("direction class index out of range");
}

SchemeRow scheme_table(FieldPtr field, unsigned m, unsigned s, unsigned d) {
  const CodeParams p = make_code_params(std::move(field), m, s, d);
  const double bits = p.field->symbol_bits();
  const double q = p.q();
  const double sigma = static_cast<double>(p.sigma);
  SchemeRow row;
  row.q = p.q();
  row.m = m;
  row.s = s;
  row.d = d;
  row.k = p.k;
  row.sigma = p.sigma;
  row.queries = (p.q() - 1) * p.sigma;
  row.servers = p.q();
  row.rate = p.rate;
  row.ours_overhead = 1.0 / p.rate;
  row.std_overhead = (q - 1) / p.rate;
  row.std_comm_bits = (q - 1) * sigma * (m + sigma) * bits;
  row.ours_comm_bits = (m - 1 + sigma) * q * sigma * bits;
  row.deployable = p.fits_transversal_lines();
  return row;
}

}  // namespace mpir
