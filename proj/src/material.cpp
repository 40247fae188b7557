#include "topem/material.hpp"

#include <complex>

namespace topem {

std::pair<Eigen::ArrayXXcd, Eigen::ArrayXXcd>
interpolate_dielectric(const DielectricSpec& spec, const Eigen::ArrayXXd& x) {
    const std::complex<double> i(0.0, 1.0);
    Eigen::ArrayXXcd eps = (1.0 + x * (spec.epsR - 1.0)) - i * (spec.alpha * x * (1.0 - x));
    Eigen::ArrayXXcd deps = Eigen::ArrayXXcd::Constant(x.rows(), x.cols(), spec.epsR - 1.0) -
                            i * (spec.alpha * (1.0 - 2.0 * x));
    return {std::move(eps), std::move(deps)};
}

std::pair<Eigen::ArrayXXcd, Eigen::ArrayXXcd>
interpolate_plasmonic(const PlasmonicSpec& spec, const Eigen::ArrayXXd& x) {
    const std::complex<double> i(0.0, 1.0);
    const double dn = spec.n2 - 1.0;
    const double dk = spec.k2;  // kappa(x) = x*k2, so kappa' = k2
    Eigen::ArrayXXd n = 1.0 + x * dn;
    Eigen::ArrayXXd kap = x * dk;
    Eigen::ArrayXXcd eps = (n.square() - kap.square()) - i * (2.0 * n * kap);
    Eigen::ArrayXXcd deps =
        (2.0 * n * dn - 2.0 * kap * dk) - i * (2.0 * dn * kap + 2.0 * n * dk);
    return {std::move(eps), std::move(deps)};
}

}  // namespace topem
