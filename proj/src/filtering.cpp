#include "topem/filtering.hpp"

#include <cmath>
#include <stdexcept>

namespace topem {

namespace {

// Same-size convolution with an odd square kernel and zero padding. The
// kernel is symmetric under reflection, so convolution equals correlation.
Eigen::ArrayXXd conv2_same(const Eigen::ArrayXXd& in, const Eigen::ArrayXXd& kernel) {
    const Eigen::Index rows = in.rows();
    const Eigen::Index cols = in.cols();
    const Eigen::Index half = kernel.rows() / 2;
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const Eigen::Index dc0 = std::max<Eigen::Index>(-half, -c);
        const Eigen::Index dc1 = std::min<Eigen::Index>(half, cols - 1 - c);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::Index dr0 = std::max<Eigen::Index>(-half, -r);
            const Eigen::Index dr1 = std::min<Eigen::Index>(half, rows - 1 - r);
            double acc = 0.0;
            for (Eigen::Index dc = dc0; dc <= dc1; ++dc) {
                for (Eigen::Index dr = dr0; dr <= dr1; ++dr) {
                    acc += in(r + dr, c + dc) * kernel(half + dr, half + dc);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

}  // namespace

FilterSpec build_filter(double fR, int nElX, int nElY) {
    if (!(fR >= 1.0) || nElX < 1 || nElY < 1) {
        throw std::invalid_argument("build_filter: fR must be >= 1 and grid dims >= 1");
    }
    const int half = static_cast<int>(std::ceil(fR)) - 1;
    const int size = 2 * half + 1;

    FilterSpec fs;
    fs.fR = fR;
    fs.kernel.resize(size, size);
    for (int dc = -half; dc <= half; ++dc) {
        for (int dr = -half; dr <= half; ++dr) {
            fs.kernel(half + dr, half + dc) =
                std::max(0.0, fR - std::sqrt(double(dr) * dr + double(dc) * dc));
        }
    }
    fs.scaling = conv2_same(Eigen::ArrayXXd::Ones(nElY, nElX), fs.kernel);
    return fs;
}

Eigen::ArrayXXd density_filter(const FilterSpec& fs, const Eigen::ArrayXXd& x,
                               const Eigen::ArrayXXd& weight) {
    if (x.rows() != fs.scaling.rows() || x.cols() != fs.scaling.cols() ||
        weight.rows() != x.rows() || weight.cols() != x.cols()) {
        throw std::invalid_argument("density_filter: field shape mismatch");
    }
    return conv2_same(x * weight, fs.kernel) / fs.scaling;
}

Eigen::ArrayXXd threshold(const Eigen::ArrayXXd& xTilde, const ProjectionSpec& p) {
    const double denom = std::tanh(p.beta * p.eta) + std::tanh(p.beta * (1.0 - p.eta));
    return (std::tanh(p.beta * p.eta) + (p.beta * (xTilde - p.eta)).tanh()) / denom;
}

Eigen::ArrayXXd threshold_derivative(const Eigen::ArrayXXd& xTilde, const ProjectionSpec& p) {
    const double denom = std::tanh(p.beta * p.eta) + std::tanh(p.beta * (1.0 - p.eta));
    return (1.0 - (p.beta * (xTilde - p.eta)).tanh().square()) * (p.beta / denom);
}

Eigen::ArrayXXd back_filter_sensitivities(const FilterSpec& fs, const Eigen::ArrayXXd& sens,
                                          const Eigen::ArrayXXd& dHdx) {
    if (sens.rows() != fs.scaling.rows() || sens.cols() != fs.scaling.cols() ||
        dHdx.rows() != sens.rows() || dHdx.cols() != sens.cols()) {
        throw std::invalid_argument("back_filter_sensitivities: field shape mismatch");
    }
    // Exact transpose of the forward filter's Jacobian: the per-target
    // normalization moves inside the convolution.
    return conv2_same((sens * dHdx) / fs.scaling, fs.kernel);
}

}  // namespace topem
