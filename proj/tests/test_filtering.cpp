#include <doctest.h>

#include <cmath>
#include <random>

#include "topem/filtering.hpp"

using namespace topem;

namespace {

Eigen::ArrayXXd random_field(int rows, int cols, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    Eigen::ArrayXXd f(rows, cols);
    for (int i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
    return f;
}

// Direct cone-kernel convolution oracle, independent of the filter code path.
double conv_oracle(const Eigen::ArrayXXd& in, double fR, int r, int c) {
    const int half = static_cast<int>(std::ceil(fR)) - 1;
    double acc = 0.0;
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= in.rows() || cc < 0 || cc >= in.cols()) continue;
            acc += in(rr, cc) * std::max(0.0, fR - std::sqrt(double(dr * dr + dc * dc)));
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("fR=1 is the identity filter") {
    FilterSpec fs = build_filter(1.0, 8, 5);
    CHECK(fs.kernel.rows() == 1);
    CHECK(fs.kernel(0, 0) == 1.0);
    Eigen::ArrayXXd x = random_field(5, 8, 1);
    Eigen::ArrayXXd w = random_field(5, 8, 2);
    CHECK(((density_filter(fs, x, w) - x * w).abs() <= 1e-15).all());
}

TEST_CASE("fR=1.5 kernel values") {
    FilterSpec fs = build_filter(1.5, 10, 10);
    REQUIRE(fs.kernel.rows() == 3);
    CHECK(fs.kernel(1, 1) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(fs.kernel(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fs.kernel(0, 0) == doctest::Approx(1.5 - std::sqrt(2.0)).epsilon(1e-12));
    SUBCASE("kernel symmetric under rotation and reflection") {
        CHECK(fs.kernel(1, 0) == fs.kernel(0, 1));
        CHECK(fs.kernel(2, 1) == fs.kernel(0, 1));
        CHECK(fs.kernel(2, 2) == fs.kernel(0, 0));
    }
}

TEST_CASE("interior scaling equals total kernel mass, corners lose mass") {
    FilterSpec fs = build_filter(6.0, 400, 200);
    const double mass = fs.kernel.sum();
    CHECK(fs.scaling(100, 200) == doctest::Approx(mass).epsilon(1e-12));
    CHECK(fs.scaling(0, 0) < mass);
    CHECK((fs.scaling > 0.0).all());
}

TEST_CASE("constant fields are preserved with unit weight") {
    for (double fR : {1.0, 2.0, 3.5}) {
        FilterSpec fs = build_filter(fR, 20, 10);
        Eigen::ArrayXXd x = Eigen::ArrayXXd::Constant(10, 20, 0.37);
        Eigen::ArrayXXd out = density_filter(fs, x, Eigen::ArrayXXd::Ones(10, 20));
        CHECK((out - 0.37).abs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("unit spike reproduces the kernel against the direct oracle") {
    FilterSpec fs = build_filter(2.0, 11, 9);
    Eigen::ArrayXXd x = Eigen::ArrayXXd::Zero(9, 11);
    x(4, 5) = 1.0;
    Eigen::ArrayXXd out = density_filter(fs, x, Eigen::ArrayXXd::Ones(9, 11));
    for (int r = 0; r < 9; ++r) {
        for (int c = 0; c < 11; ++c) {
            const double expect = conv_oracle(x, 2.0, r, c) / fs.scaling(r, c);
            CHECK(out(r, c) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("filter is linear") {
    FilterSpec fs = build_filter(2.5, 12, 7);
    Eigen::ArrayXXd x = random_field(7, 12, 5), y = random_field(7, 12, 6);
    Eigen::ArrayXXd w = random_field(7, 12, 7);
    Eigen::ArrayXXd lhs = density_filter(fs, 2.0 * x + 3.0 * y, w);
    Eigen::ArrayXXd rhs = 2.0 * density_filter(fs, x, w) + 3.0 * density_filter(fs, y, w);
    CHECK((lhs - rhs).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("filter output stays in [0,1] for unit-weight unit-range input") {
    FilterSpec fs = build_filter(3.0, 15, 10);
    Eigen::ArrayXXd x = random_field(10, 15, 8);
    Eigen::ArrayXXd out = density_filter(fs, x, Eigen::ArrayXXd::Ones(10, 15));
    CHECK(out.minCoeff() >= -1e-12);
    CHECK(out.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("threshold endpoints and midpoint are exact") {
    for (double beta : {1.0, 5.0, 50.0, 1000.0}) {
        for (double eta : {0.3, 0.5, 0.7}) {
            ProjectionSpec p{beta, eta};
            Eigen::ArrayXXd x(1, 3);
            x << 0.0, eta, 1.0;
            Eigen::ArrayXXd h = threshold(x, p);
            CHECK(h(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
            CHECK(h(0, 2) == doctest::Approx(1.0).epsilon(1e-15));
        }
        Eigen::ArrayXXd mid(1, 1);
        mid << 0.5;
        CHECK(threshold(mid, {beta, 0.5})(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("threshold is monotone and approaches the step function") {
    ProjectionSpec sharp{1e5, 0.4};
    Eigen::ArrayXXd x(1, 100);
    for (int i = 0; i < 100; ++i) x(0, i) = i / 99.0;
    Eigen::ArrayXXd h = threshold(x, sharp);
    for (int i = 1; i < 100; ++i) CHECK(h(0, i) >= h(0, i - 1));
    for (int i = 0; i < 100; ++i) {
        if (std::abs(x(0, i) - 0.4) < 0.01) continue;
        const double step = x(0, i) > 0.4 ? 1.0 : 0.0;
        CHECK(std::abs(h(0, i) - step) <= 1e-6);
    }
}

TEST_CASE("threshold derivative matches finite differences") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ProjectionSpec p{7.0, 0.45};
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::ArrayXXd x(1, 1);
        x << u(rng);
        Eigen::ArrayXXd lo = x - h, hi = x + h;
        const double fd = (threshold(hi, p)(0, 0) - threshold(lo, p)(0, 0)) / (2 * h);
        const double an = threshold_derivative(x, p)(0, 0);
        CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        CHECK(an > 0.0);
    }
}

TEST_CASE("threshold derivative peaks at eta and matches the closed form") {
    ProjectionSpec p{5.0, 0.5};
    Eigen::ArrayXXd x(1, 1);
    x << 0.5;
    CHECK(threshold_derivative(x, p)(0, 0) ==
          doctest::Approx(5.0 / (2.0 * std::tanh(2.5))).epsilon(1e-14));
    Eigen::ArrayXXd other(1, 1);
    other << 0.31;
    CHECK(threshold_derivative(other, p)(0, 0) < threshold_derivative(x, p)(0, 0));
}

TEST_CASE("back-filter special cases") {
    FilterSpec fs = build_filter(1.0, 6, 4);
    Eigen::ArrayXXd sens = random_field(4, 6, 20), dH = random_field(4, 6, 21);
    CHECK(((back_filter_sensitivities(fs, sens, dH) - sens * dH).abs() <= 1e-15).all());

    // In the interior (where scaling is uniform) a constant sensitivity field
    // passes through unchanged; boundary entries differ by design.
    FilterSpec fs2 = build_filter(2.0, 10, 8);
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Constant(8, 10, 1.7);
    Eigen::ArrayXXd out = back_filter_sensitivities(fs2, c, Eigen::ArrayXXd::Ones(8, 10));
    for (int r = 2; r <= 5; ++r) {
        for (int cc = 2; cc <= 7; ++cc) {
            CHECK(out(r, cc) == doctest::Approx(1.7).epsilon(1e-12));
        }
    }
}

TEST_CASE("back-filter is the transpose of the filter+threshold Jacobian") {
    // 6x5 grid: build the Jacobian of xi -> H(filter(xi)) column by column and
    // compare J^T * g with the chain-rule back-filter.
    const int rows = 5, cols = 6, n = rows * cols;
    FilterSpec fs = build_filter(2.0, cols, rows);
    ProjectionSpec p{4.0, 0.5};
    Eigen::ArrayXXd ones = Eigen::ArrayXXd::Ones(rows, cols);
    Eigen::ArrayXXd x0 = random_field(rows, cols, 33);

    Eigen::ArrayXXd filt0 = density_filter(fs, x0, ones);
    Eigen::MatrixXd jac(n, n);
    const double h = 1e-7;
    for (int j = 0; j < n; ++j) {
        Eigen::ArrayXXd xp = x0, xm = x0;
        xp.data()[j] += h;
        xm.data()[j] -= h;
        Eigen::ArrayXXd fp = threshold(density_filter(fs, xp, ones), p);
        Eigen::ArrayXXd fm = threshold(density_filter(fs, xm, ones), p);
        jac.col(j) = Eigen::Map<Eigen::VectorXd>(Eigen::ArrayXXd((fp - fm) / (2 * h)).data(), n);
    }

    Eigen::ArrayXXd g = random_field(rows, cols, 34);
    Eigen::ArrayXXd dH = threshold_derivative(filt0, p);
    Eigen::ArrayXXd chain = back_filter_sensitivities(fs, g, dH);
    Eigen::VectorXd expect =
        jac.transpose() * Eigen::Map<Eigen::VectorXd>(g.data(), n);
    Eigen::VectorXd got = Eigen::Map<Eigen::VectorXd>(chain.data(), n);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fR below 1 is rejected") {
    CHECK_THROWS_AS(build_filter(0.5, 4, 4), std::invalid_argument);
    Eigen::ArrayXXd x(2, 2);
    FilterSpec fs = build_filter(1.0, 4, 4);
    CHECK_THROWS_AS(density_filter(fs, x, x), std::invalid_argument);
}
