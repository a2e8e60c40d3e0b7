#pragma once

#include <vector>

#include "gedfem/errors.hpp"

namespace gedfem {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Sparse direct LU solve of K x = rhs (square, general pattern).
// Throws SolverError when the factorization reports a singular or
// structurally deficient matrix.
std::vector<double> sparse_lu_solve(int n, const std::vector<Triplet>& triplets,
                                    const std::vector<double>& rhs);

}  // namespace gedfem
