#include "topem/fem.hpp"

#include <stdexcept>

namespace topem {

ElementMatrices element_matrices(double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("element_matrices: scale must be positive");
    }
    const double a = scale / 2.0;
    const double b = scale / 2.0;
    const double k1 = (a * a + b * b) / (a * b);
    const double k2 = (a * a - 2.0 * b * b) / (a * b);
    const double k3 = (b * b - 2.0 * a * a) / (a * b);

    ElementMatrices em;
    em.laplace << k1 / 3, k2 / 6, -k1 / 6, k3 / 6,
                  k2 / 6, k1 / 3, k3 / 6, -k1 / 6,
                  -k1 / 6, k3 / 6, k1 / 3, k2 / 6,
                  k3 / 6, -k1 / 6, k2 / 6, k1 / 3;
    em.mass << 4, 2, 1, 2,
               2, 4, 2, 1,
               1, 2, 4, 2,
               2, 1, 2, 4;
    em.mass *= a * b / 9.0;
    return em;
}

void assemble(const Eigen::ArrayXXcd& epsPerElement, const ElementMatrices& em,
              const IndexSets& idx, double k, std::vector<TripletC>& out) {
    const Eigen::Index nel = idx.edofMat.rows();
    if (epsPerElement.size() != nel) {
        throw std::invalid_argument("assemble: permittivity field size mismatch");
    }
    const double k2 = k * k;
    out.reserve(out.size() + static_cast<size_t>(nel) * 16);
    // epsPerElement is nElY x nElX column-major, so linear index e matches the
    // element numbering in edofMat.
    const Complex* eps = epsPerElement.data();
    for (Eigen::Index e = 0; e < nel; ++e) {
        const Complex coef = k2 * eps[e];
        for (int c = 0; c < 4; ++c) {
            for (int r = 0; r < 4; ++r) {
                out.emplace_back(idx.edofMat(e, r), idx.edofMat(e, c),
                                 em.laplace(r, c) - coef * em.mass(r, c));
            }
        }
    }
}

BoundaryTerms boundary_and_rhs(double k, double scale, const IndexSets& idx,
                               int numNodes, SourceBoundary source) {
    const Complex edgeOff = Complex(0.0, k * scale / 6.0);
    const Complex edgeDiag = Complex(0.0, k * scale / 3.0);

    BoundaryTerms bt;
    size_t nEdges = 0;
    for (const auto& side : idx.boundaryEdges) nEdges += side.size();
    bt.triplets.reserve(nEdges * 4);
    for (const auto& side : idx.boundaryEdges) {
        for (const auto& [n1, n2] : side) {
            bt.triplets.emplace_back(n1, n2, edgeOff);
            bt.triplets.emplace_back(n2, n1, edgeOff);
            bt.triplets.emplace_back(n1, n1, edgeDiag);
            bt.triplets.emplace_back(n2, n2, edgeDiag);
        }
    }

    bt.rhs = Eigen::VectorXcd::Zero(numNodes);
    const Complex drive = (source == SourceBoundary::bottom) ? Complex(0.0, k)
                                                             : Complex(0.0, -k);
    const auto& edges = (source == SourceBoundary::bottom) ? idx.sourceEdgesBottom()
                                                           : idx.sourceEdgesTop();
    for (const auto& [n1, n2] : edges) {
        bt.rhs[n1] += drive;
        bt.rhs[n2] += drive;
    }
    bt.rhs *= scale;
    return bt;
}

void HelmholtzFactorization::compute(const SparseComplex& S) {
    if (!analyzed_) {
        lu_.analyzePattern(S);
        analyzed_ = true;
    }
    lu_.factorize(S);
    if (lu_.info() != Eigen::Success) {
        throw std::runtime_error("HelmholtzFactorization: numerically singular system (" +
                                 lu_.lastErrorMessage() + ")");
    }
    if (stats_) ++stats_->factorizations;
}

Eigen::VectorXcd HelmholtzFactorization::solve(const Eigen::VectorXcd& b) const {
    if (stats_) ++stats_->forwardSolves;
    return lu_.solve(b);
}

Eigen::VectorXcd HelmholtzFactorization::solve_transpose(const Eigen::VectorXcd& b) const {
    if (stats_) ++stats_->adjointSolves;
    return lu_.transpose().solve(b);
}

}  // namespace topem
