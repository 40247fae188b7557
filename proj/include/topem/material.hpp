#pragma once

#include <utility>

#include <Eigen/Dense>

namespace topem {

/// Dielectric interpolation with imaginary-part penalization of intermediate
/// densities: eps = 1 + x*(epsR-1) - i*alpha*x*(1-x).
struct DielectricSpec {
    double epsR = 3.0;   ///< relative permittivity of the solid material
    double alpha = 1.0;  ///< penalization strength, >= 0
};

/// Linear refractive-index / extinction interpolation between air (n=1, k=0)
/// and material 2, squared to permittivity: eps = (n^2 - k^2) - i*2nk.
struct PlasmonicSpec {
    double n2 = 1.9;
    double k2 = 1.5;
};

/// Returns (eps, deps/dx), both elementwise over the projected field.
std::pair<Eigen::ArrayXXcd, Eigen::ArrayXXcd>
interpolate_dielectric(const DielectricSpec& spec, const Eigen::ArrayXXd& x);

std::pair<Eigen::ArrayXXcd, Eigen::ArrayXXcd>
interpolate_plasmonic(const PlasmonicSpec& spec, const Eigen::ArrayXXd& x);

}  // namespace topem
