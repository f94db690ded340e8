#pragma once

#include <cstddef>
#include <vector>

#include "mpir/field.hpp"

namespace mpir {

/// Row-major dense matrix over a field.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Elem& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Elem at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Elem> data_;
};

/// Reduced row echelon form. Pivots are chosen as the first nonzero entry
/// at or below the current row, so results are reproducible.
struct Echelon {
  Matrix reduced;
  std::vector<std::size_t> pivot_cols;  // pivot column of row r, for r < rank
};

Echelon row_reduce(const Field& field, Matrix m);

std::size_t rank(const Field& field, const Matrix& m);

/// Basis of {x : A x = 0}, one vector per free column in increasing column
/// order; vector f has free variable f set to 1 and the other free variables 0.
std::vector<std::vector<Elem>> kernel_basis(const Field& field, const Matrix& a);

enum class SolveStatus { unique, inconsistent, underdetermined };

struct LinearSolution {
  SolveStatus status;
  std::vector<Elem> x;  // filled only when unique
};

/// Solves A x = b for a possibly overdetermined system.
LinearSolution solve(const Field& field, const Matrix& a, const std::vector<Elem>& b);

}  // namespace mpir
