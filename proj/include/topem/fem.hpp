#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "topem/grid.hpp"

namespace topem {

using Complex = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;
using TripletC = Eigen::Triplet<Complex>;

enum class SourceBoundary { bottom, top };

/// Bilinear quad element matrices for the Helmholtz operator on a square
/// element of side `scale`.
struct ElementMatrices {
    Eigen::Matrix4d laplace;  ///< stiffness (LEM); row sums are zero
    Eigen::Matrix4d mass;     ///< consistent mass (MEM); entries sum to scale^2
};

ElementMatrices element_matrices(double scale);

/// Per-element contributions LEM - k^2 * eps_e * MEM, appended as 16 triplets
/// per element. Duplicate entries are summed when the matrix is built, so the
/// stream may overlap with the boundary stream.
void assemble(const Eigen::ArrayXXcd& epsPerElement, const ElementMatrices& em,
              const IndexSets& idx, double k, std::vector<TripletC>& out);

/// First-order absorbing boundary terms plus the plane-wave excitation vector.
/// Every exterior edge contributes i*k*scale*[1/3 1/6; 1/6 1/3]; the source
/// boundary's nodes accumulate +-i*k per incident edge, scaled by `scale`
/// (sign flips for a top source, matching the reversed propagation direction).
struct BoundaryTerms {
    std::vector<TripletC> triplets;
    Eigen::VectorXcd rhs;
};

BoundaryTerms boundary_and_rhs(double k, double scale, const IndexSets& idx,
                               int numNodes, SourceBoundary source);

/// Instrumentation shared by the solver and the optimizers; counts are
/// cumulative over the lifetime of the owning evaluator.
struct SolveStats {
    long factorizations = 0;
    long forwardSolves = 0;
    long adjointSolves = 0;
};

/// Complex sparse direct factorization with forward and transpose solves.
/// The sparsity pattern is analyzed once on the first compute(); later calls
/// with the same pattern only refactorize numerically.
class HelmholtzFactorization {
public:
    explicit HelmholtzFactorization(SolveStats* stats = nullptr) : stats_(stats) {}

    void compute(const SparseComplex& S);

    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
    Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const;

private:
    // Eigen's transpose() view is non-const; solves do not mutate the factors.
    mutable Eigen::SparseLU<SparseComplex> lu_;
    bool analyzed_ = false;
    SolveStats* stats_ = nullptr;
};

}  // namespace topem
