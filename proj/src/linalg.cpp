#include "mpir/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace mpir {

Echelon row_reduce(const Field& field, Matrix m) {
  Echelon out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.rows() && m.at(pivot, col).is_zero()) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != row)
      for (std::size_t c = 0; c < m.cols(); ++c) std::swap(m.at(pivot, c), m.at(row, c));

    const Elem scale = field.inv(m.at(row, col));
    for (std::size_t c = col; c < m.cols(); ++c) m.at(row, c) = field.mul(m.at(row, c), scale);

    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row) continue;
      const Elem factor = m.at(r, col);
      if (factor.is_zero()) continue;
      for (std::size_t c = col; c < m.cols(); ++c)
        m.at(r, c) = field.sub(m.at(r, c), field.mul(factor, m.at(row, c)));
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const Field& field, const Matrix& m) { return row_reduce(field, m).pivot_cols.size(); }

std::vector<std::vector<Elem>> kernel_basis(const Field& field, const Matrix& a) {
  const Echelon ech = row_reduce(field, a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t c : ech.pivot_cols) is_pivot[c] = true;

  std::vector<std::vector<Elem>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<Elem> v(a.cols());
    v[free] = Elem{1};
    for (std::size_t r = 0; r < ech.pivot_cols.size(); ++r)
      v[ech.pivot_cols[r]] = field.neg(ech.reduced.at(r, free));
    basis.push_back(std::move(v));
  }
  return basis;
}

LinearSolution solve(const Field& field, const Matrix& a, const std::vector<Elem>& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("right-hand side length mismatch");
  Matrix aug(a.rows(), a.cols() + 1);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) aug.at(r, c) = a.at(r, c);
    aug.at(r, a.cols()) = b[r];
  }
  const Echelon ech = row_reduce(field, std::move(aug));
  if (!ech.pivot_cols.empty() && ech.pivot_cols.back() == a.cols()) return {SolveStatus::inconsistent, {}};
  if (ech.pivot_cols.size() < a.cols()) return {SolveStatus::underdetermined, {}};

  std::vector<Elem> x(a.cols());
  for (std::size_t r = 0; r < a.cols(); ++r) x[ech.pivot_cols[r]] = ech.reduced.at(r, a.cols());
  return {SolveStatus::unique, std::move(x)};
}

}  // namespace mpir
