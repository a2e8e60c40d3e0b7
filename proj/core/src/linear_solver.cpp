#include "gedfem/linear_solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace gedfem {

std::vector<double> sparse_lu_solve(int n, const std::vector<Triplet>& triplets,
                                    const std::vector<double>& rhs) {
  if (static_cast<int>(rhs.size()) != n) throw SolverError("sparse_lu_solve: size mismatch");
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(triplets.size());
  for (const Triplet& e : triplets) t.emplace_back(e.row, e.col, e.value);
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(t.begin(), t.end());
  k.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(k);
  lu.factorize(k);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse_lu_solve: factorization failed (singular matrix?)");
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
  const Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw SolverError("sparse_lu_solve: back substitution failed");
  std::vector<double> out(n);
  Eigen::Map<Eigen::VectorXd>(out.data(), n) = x;
  return out;
}

}  // namespace gedfem
