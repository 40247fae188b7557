#pragma once

#include <Eigen/Dense>

namespace topem {

/// Cone-kernel density filter. The kernel covers offsets
/// -(ceil(fR)-1)..(ceil(fR)-1) per side with weight max(0, fR - distance);
/// `scaling` is the zero-padded convolution of an all-ones field with the
/// kernel, so it carries the boundary renormalization.
struct FilterSpec {
    double fR = 1.0;
    Eigen::ArrayXXd kernel;
    Eigen::ArrayXXd scaling;  ///< nElY x nElX local kernel mass
};

FilterSpec build_filter(double fR, int nElX, int nElY);

/// Zero-padded same-size convolution of (x .* weight) with the kernel,
/// normalized pointwise by `scaling` afterwards. With weight == 1 this
/// preserves constants everywhere including boundaries.
Eigen::ArrayXXd density_filter(const FilterSpec& fs, const Eigen::ArrayXXd& x,
                               const Eigen::ArrayXXd& weight);

/// Smoothed Heaviside projection parameters.
struct ProjectionSpec {
    double beta = 5.0;  ///< sharpness, >= 1
    double eta = 0.5;   ///< threshold level in [0,1]
};

/// H(x) = (tanh(beta*eta) + tanh(beta*(x-eta))) / (tanh(beta*eta) + tanh(beta*(1-eta)))
Eigen::ArrayXXd threshold(const Eigen::ArrayXXd& xTilde, const ProjectionSpec& p);

/// dH/dx = beta*(1 - tanh^2(beta*(x-eta))) / (tanh(beta*eta) + tanh(beta*(1-eta)))
Eigen::ArrayXXd threshold_derivative(const Eigen::ArrayXXd& xTilde, const ProjectionSpec& p);

/// Chain-rule back-filter: conv((sens .* dHdx) ./ scaling, kernel). Because
/// the kernel is reflection-symmetric, this is the exact transpose of the
/// filter+threshold Jacobian.
Eigen::ArrayXXd back_filter_sensitivities(const FilterSpec& fs, const Eigen::ArrayXXd& sens,
                                          const Eigen::ArrayXXd& dHdx);

}  // namespace topem
