#include "topem/objective.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace topem {

namespace {
auto interpolate(const DielectricSpec& m, const Eigen::ArrayXXd& x) {
    return interpolate_dielectric(m, x);
}
auto interpolate(const PlasmonicSpec& m, const Eigen::ArrayXXd& x) {
    return interpolate_plasmonic(m, x);
}
}  // namespace

void ProblemSpec::validate() const {
    grid.validate();
    if (!(wavelengthElements > 2.0)) {
        throw std::invalid_argument("ProblemSpec: wavelength must exceed 2 elements");
    }
    if (!(filterRadius >= 1.0)) {
        throw std::invalid_argument("ProblemSpec: filter radius must be >= 1");
    }
    if (linkMode == LinkMode::columns && grid.numDesign() % grid.nElX != 0) {
        throw std::invalid_argument("ProblemSpec: column linking needs a full-width design strip");
    }
}

Evaluator::Evaluator(const ProblemSpec& problem) : prob_(problem) {
    prob_.validate();
    idx_ = build_index_sets(prob_.grid);
    em_ = element_matrices(prob_.grid.scale);
    filter_ = build_filter(prob_.filterRadius, prob_.grid.nElX, prob_.grid.nElY);

    const double k = prob_.wavenumber();
    BoundaryTerms bt = boundary_and_rhs(k, prob_.grid.scale, idx_, prob_.grid.numNodes(),
                                        prob_.sourceBoundary);
    boundaryTriplets_ = std::move(bt.triplets);
    rhs_ = std::move(bt.rhs);

    const int te = prob_.grid.targetElementIndex() - 1;
    for (int n = 0; n < 4; ++n) targetNodes_.push_back(idx_.edofMat(te, n));
}

Evaluation Evaluator::evaluate(const Eigen::VectorXd& dVs, const ProjectionSpec& projection,
                               bool withGradient) {
    const GridSpec& grid = prob_.grid;
    const double k = prob_.wavenumber();

    Evaluation ev;
    Eigen::ArrayXXd embedded =
        embed_design(dVs, grid, prob_.substrate, prob_.linkMode == LinkMode::columns);
    ev.filtered = density_filter(filter_, embedded, Eigen::ArrayXXd::Ones(grid.nElY, grid.nElX));
    ev.projected = threshold(ev.filtered, projection);

    auto [eps, deps] =
        std::visit([&](const auto& m) { return interpolate(m, ev.projected); }, prob_.material);

    std::vector<TripletC> triplets;
    assemble(eps, em_, idx_, k, triplets);
    triplets.insert(triplets.end(), boundaryTriplets_.begin(), boundaryTriplets_.end());

    SparseComplex S(grid.numNodes(), grid.numNodes());
    S.setFromTriplets(triplets.begin(), triplets.end());
    lu_.compute(S);

    ev.ez = lu_.solve(rhs_);
    if (!ev.ez.allFinite()) {
        throw std::runtime_error("Evaluator: non-finite field solution");
    }
    ev.fom = selection_fom(ev.ez, targetNodes_);

    if (!withGradient) return ev;

    // Adjoint right-hand side: P*(2*Re(Ez) - 2i*Im(Ez)) restricted to the
    // target nodes, scaled by -1/2 for the adjoint system.
    Eigen::VectorXcd adjRHS = Eigen::VectorXcd::Zero(grid.numNodes());
    for (int n : targetNodes_) {
        adjRHS[n] = -0.5 * 0.25 * (2.0 * std::conj(ev.ez[n]));
    }
    ev.adjoint = lu_.solve_transpose(adjRHS);

    // Elementwise dPhi/d(projected): 2*Re(lambda_e^T * (-k^2 * deps_e * MEM) * ez_e).
    const double k2 = k * k;
    Eigen::ArrayXXd sens(grid.nElY, grid.nElX);
    double* sensData = sens.data();
    const Complex* depsData = deps.data();
    for (int e = 0; e < grid.numElements(); ++e) {
        Eigen::Vector4cd ezLoc, adjLoc;
        for (int n = 0; n < 4; ++n) {
            ezLoc[n] = ev.ez[idx_.edofMat(e, n)];
            adjLoc[n] = ev.adjoint[idx_.edofMat(e, n)];
        }
        const Complex contraction = adjLoc.transpose() * (em_.mass * ezLoc);
        sensData[e] = 2.0 * std::real(-k2 * depsData[e] * contraction);
    }

    Eigen::ArrayXXd dH = threshold_derivative(ev.filtered, projection);
    Eigen::ArrayXXd backFiltered = back_filter_sensitivities(filter_, sens, dH);

    Eigen::VectorXd gathered(grid.numDesign());
    for (int i = 0; i < grid.numDesign(); ++i) {
        const int e = grid.designElements[i] - 1;
        gathered[i] = backFiltered(e % grid.nElY, e / grid.nElY);
    }
    if (prob_.linkMode == LinkMode::columns) {
        const int rows = grid.numDesign() / grid.nElX;
        ev.sensFOM.resize(grid.nElX);
        for (int c = 0; c < grid.nElX; ++c) {
            ev.sensFOM[c] = gathered.segment(static_cast<Eigen::Index>(c) * rows, rows).sum();
        }
    } else {
        ev.sensFOM = std::move(gathered);
    }
    return ev;
}

Evaluation Evaluator::binarized_evaluate(const Eigen::VectorXd& dVs, double eta, double beta) {
    return evaluate(dVs, ProjectionSpec{beta, eta}, false);
}

Evaluation evaluate(const Eigen::VectorXd& dVs, const ProblemSpec& problem,
                    const ProjectionSpec& projection, bool withGradient) {
    Evaluator ev(problem);
    return ev.evaluate(dVs, projection, withGradient);
}

Eigen::VectorXd adjoint_gradient(const Eigen::VectorXd& dVs, const ProblemSpec& problem,
                                 const ProjectionSpec& projection) {
    return evaluate(dVs, problem, projection, true).sensFOM;
}

Evaluation binarized_evaluate(const Eigen::VectorXd& dVs, const ProblemSpec& problem) {
    Evaluator ev(problem);
    return ev.binarized_evaluate(dVs);
}

double selection_fom(const Eigen::VectorXcd& ez, const std::vector<int>& targetNodes) {
    double phi = 0.0;
    for (int n : targetNodes) phi += 0.25 * std::norm(ez[n]);
    return phi;
}

double nondiscreteness(const Eigen::ArrayXXd& projected, const GridSpec& grid) {
    if (grid.numDesign() == 0) return 0.0;
    double acc = 0.0;
    for (int idx : grid.designElements) {
        const int e = idx - 1;
        const double v = projected(e % grid.nElY, e / grid.nElY);
        acc += 4.0 * v * (1.0 - v);
    }
    return acc / grid.numDesign();
}

double transmission_flux(const Evaluation& eval, const Evaluation& emptyDomain,
                         const ProblemSpec& problem) {
    const DesignStrip& strip = problem.strip;
    const int nElY = problem.grid.nElY;
    const int nElX = problem.grid.nElX;
    if (strip.thickness <= 0 || strip.startRow < 3 || strip.startRow > nElY) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const int j = strip.startRow - 2;  // node row one element above the strip
    auto lineFlux = [&](const Eigen::VectorXcd& ez) {
        double p = 0.0;
        for (int ix = 0; ix <= nElX; ++ix) {
            const int n = ix * (nElY + 1) + j;
            const Complex dEdy = (ez[n + 1] - ez[n - 1]) / (2.0 * problem.grid.scale);
            p += std::imag(std::conj(ez[n]) * dEdy);
        }
        return p;
    };
    const double incident = lineFlux(emptyDomain.ez);
    if (incident == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(lineFlux(eval.ez) / incident);
}

}  // namespace topem
