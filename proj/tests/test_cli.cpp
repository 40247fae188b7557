#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "topem/cli.hpp"

using namespace topem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("topem_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_tiny_config(const fs::path& dir) {
    const fs::path p = dir / "tiny.cfg";
    std::ofstream out(p);
    out << "# tiny focusing problem\n"
           "name = tiny\n"
           "nElX = 16\n"
           "nElY = 12\n"
           "targetX = 8\n"
           "targetY = 4\n"
           "stripStartRow = 8\n"
           "stripThickness = 3\n"
           "lambda = 8\n"
           "fR = 1.5\n"
           "eps_r = 3\n"
           "maxIter = 3\n";
    return p.string();
}

}  // namespace

TEST_CASE("presets carry the reference problem setups") {
    cli::RunConfig m = cli::preset("metalens");
    CHECK(m.problem.grid.nElX == 400);
    CHECK(m.problem.grid.nElY == 200);
    CHECK(m.problem.grid.targetXY == std::array<int, 2>{200, 80});
    CHECK(m.problem.strip.startRow == 165);
    CHECK(m.problem.strip.thickness == 15);
    CHECK(m.problem.wavelengthElements == 35.0);
    CHECK(m.problem.filterRadius == 6.0);
    CHECK(m.problem.grid.numDesign() == 400 * 15);
    CHECK(m.gradient.maxItr == 200);
    CHECK(std::holds_alternative<DielectricSpec>(m.problem.material));

    cli::RunConfig s = cli::preset("filter-sweep");
    CHECK(s.sweepRadii == std::vector<double>{1.0, 3.0, 6.0, 9.0});

    cli::RunConfig r = cli::preset("reflector");
    CHECK(r.problem.sourceBoundary == SourceBoundary::top);
    CHECK(r.problem.grid.targetXY == std::array<int, 2>{200, 100});
    CHECK(r.problem.filterRadius == 3.0);
    REQUIRE(std::holds_alternative<PlasmonicSpec>(r.problem.material));
    const auto& pm = std::get<PlasmonicSpec>(r.problem.material);
    CHECK(pm.n2 == 1.9);
    CHECK(pm.k2 == 1.5);

    cli::RunConfig l = cli::preset("lens1d");
    CHECK(l.problem.linkMode == LinkMode::columns);
    CHECK(l.problem.numDesignVars() == 400);

    cli::RunConfig g = cli::preset("ga-compare");
    CHECK(g.problem.grid.nElX == 100);
    CHECK(g.problem.grid.nElY == 50);
    CHECK(g.problem.grid.targetXY == std::array<int, 2>{50, 10});
    CHECK(g.problem.wavelengthElements == 20.0);
    CHECK(g.ga.populationSize == 200);
    CHECK(g.ga.seed == 1u);

    CHECK_THROWS_AS(cli::preset("bogus"), std::invalid_argument);
}

TEST_CASE("geometric numerical aperture") {
    ProblemSpec m = cli::preset("metalens").problem;
    CHECK(cli::compute_geometric_na(m) == doctest::Approx(0.920).epsilon(1e-3));

    ProblemSpec p;
    p.grid.nElX = 100;
    p.grid.nElY = 80;
    p.grid.targetXY = {50, 10};
    p.strip = {60, 5};
    CHECK(cli::compute_geometric_na(p) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    p.strip = {0, 0};
    CHECK(std::isnan(cli::compute_geometric_na(p)));
    p.strip = {5, 5};  // target below the strip
    CHECK(std::isnan(cli::compute_geometric_na(p)));
}

TEST_CASE("config files parse into full problems") {
    fs::path dir = temp_dir("cfg");
    const std::string cfgPath = write_tiny_config(dir);
    cli::RunConfig cfg = cli::load_config(cfgPath);
    CHECK(cfg.name == "tiny");
    CHECK(cfg.problem.grid.nElX == 16);
    CHECK(cfg.problem.grid.nElY == 12);
    CHECK(cfg.problem.strip.startRow == 8);
    CHECK(cfg.problem.grid.numDesign() == 16 * 3);
    CHECK(cfg.problem.wavelengthElements == 8.0);
    CHECK(cfg.gradient.maxItr == 3);
    CHECK(std::holds_alternative<DielectricSpec>(cfg.problem.material));

    SUBCASE("plasmonic keys switch the material model") {
        std::ofstream(dir / "pl.cfg") << "nElX=10\nnElY=10\ntargetX=5\ntargetY=3\n"
                                         "stripStartRow=6\nstripThickness=2\n"
                                         "n2=1.9\nk2=1.5\nsource=top\nlink=columns\n";
        cli::RunConfig pl = cli::load_config((dir / "pl.cfg").string());
        CHECK(std::holds_alternative<PlasmonicSpec>(pl.problem.material));
        CHECK(pl.problem.sourceBoundary == SourceBoundary::top);
        CHECK(pl.problem.linkMode == LinkMode::columns);
    }
    SUBCASE("missing required key and bad enum values throw") {
        std::ofstream(dir / "bad.cfg") << "nElX=10\n";
        CHECK_THROWS_AS(cli::load_config((dir / "bad.cfg").string()), std::invalid_argument);
        std::ofstream(dir / "bad2.cfg") << "nElX=10\nnElY=10\ntargetX=5\ntargetY=3\n"
                                           "stripStartRow=6\nstripThickness=2\nsource=left\n";
        CHECK_THROWS_AS(cli::load_config((dir / "bad2.cfg").string()), std::invalid_argument);
        CHECK_THROWS_AS(cli::load_config((dir / "nope.cfg").string()), std::invalid_argument);
    }
    fs::remove_all(dir);
}

TEST_CASE("resolution factor refines every mesh-coupled quantity") {
    cli::RunConfig cfg = cli::preset("metalens");
    cli::apply_resolution_factor(cfg, 2);
    CHECK(cfg.problem.grid.nElX == 800);
    CHECK(cfg.problem.grid.nElY == 400);
    CHECK(cfg.problem.grid.scale == doctest::Approx(0.5e-9).epsilon(1e-15));
    CHECK(cfg.problem.wavelengthElements == 70.0);
    CHECK(cfg.problem.filterRadius == 12.0);
    CHECK(cfg.problem.strip.startRow == 329);
    CHECK(cfg.problem.strip.thickness == 30);
    CHECK(cfg.problem.grid.targetXY == std::array<int, 2>{400, 160});
    CHECK(cfg.problem.grid.numDesign() == 800 * 30);
    // Physical wavelength is unchanged by refinement.
    CHECK(cfg.problem.wavenumber() ==
          doctest::Approx(cli::preset("metalens").problem.wavenumber()).epsilon(1e-15));

    CHECK_THROWS_AS(cli::apply_resolution_factor(cfg, 0), std::invalid_argument);
}

TEST_CASE("pgm writer emits a valid binary P5 image") {
    fs::path dir = temp_dir("pgm");
    Eigen::ArrayXXd img(2, 3);
    img << 0.0, 0.5, 1.0, 0.25, 2.0, -1.0;  // out-of-range values clamp
    const std::string path = (dir / "img.pgm").string();
    cli::write_pgm(path, img);
    const std::string data = slurp(path);
    CHECK(data.substr(0, 9) == "P5\n3 2\n25");
    const std::string pixels = data.substr(data.size() - 6);
    CHECK(static_cast<unsigned char>(pixels[0]) == 0);
    CHECK(static_cast<unsigned char>(pixels[1]) == 128);
    CHECK(static_cast<unsigned char>(pixels[2]) == 255);
    CHECK(static_cast<unsigned char>(pixels[4]) == 255);
    CHECK(static_cast<unsigned char>(pixels[5]) == 0);
    fs::remove_all(dir);
}

TEST_CASE("history csv format") {
    fs::path dir = temp_dir("hist");
    RunHistory h;
    h.records.push_back({1, 0.125, 3, 1, 5.0, 0.4});
    h.records.push_back({2, 0.5, 6, 2, 7.5, 1.9});
    const std::string path = (dir / "h.csv").string();
    cli::write_history_csv(path, h);
    CHECK(slurp(path) ==
          "iteration,phi,forward_solves,adjoint_solves,beta,seconds\n"
          "1,0.125,3,1,5,0\n"
          "2,0.5,6,2,7.5,1\n");
    fs::remove_all(dir);
}

TEST_CASE("end-to-end run writes consistent, reproducible artifacts") {
    fs::path dir = temp_dir("run");
    const std::string cfgPath = write_tiny_config(dir);
    const std::string out1 = (dir / "out1").string();
    const std::string out2 = (dir / "out2").string();

    auto runOnce = [&](const std::string& out) {
        const char* argv[] = {"topem", "--config", cfgPath.c_str(), "--out-dir", out.c_str()};
        return cli::run(5, argv);
    };
    CHECK(runOnce(out1) == 0);
    CHECK(runOnce(out2) == 0);

    for (const char* f : {"design.pgm", "field.pgm", "field.csv", "history.csv", "summary.txt"}) {
        CHECK(fs::exists(fs::path(out1) / f));
    }

    // design.pgm is element-resolution, field.pgm node-resolution.
    CHECK(slurp(out1 + "/design.pgm").substr(0, 11) == "P5\n16 12\n25");
    CHECK(slurp(out1 + "/field.pgm").substr(0, 11) == "P5\n17 13\n25");

    // field.csv: (nElY+1) rows x (nElX+1) columns.
    {
        std::istringstream csv(slurp(out1 + "/field.csv"));
        std::string line;
        int rows = 0, cols = -1;
        while (std::getline(csv, line)) {
            ++rows;
            const long commas = std::count(line.begin(), line.end(), ',');
            if (cols < 0) cols = static_cast<int>(commas) + 1;
            CHECK(static_cast<int>(commas) + 1 == cols);
        }
        CHECK(rows == 13);
        CHECK(cols == 17);
    }

    // The summary's final FOM equals the last history entry.
    const std::string hist = slurp(out1 + "/history.csv");
    std::string lastLine;
    {
        std::istringstream hs(hist);
        for (std::string l; std::getline(hs, l);) {
            if (!l.empty()) lastLine = l;
        }
    }
    const auto c1 = lastLine.find(',');
    const auto c2 = lastLine.find(',', c1 + 1);
    const double lastPhi = std::stod(lastLine.substr(c1 + 1, c2 - c1 - 1));
    const std::string summary = slurp(out1 + "/summary.txt");
    const auto pos = summary.find("finalFOM=");
    REQUIRE(pos != std::string::npos);
    const double finalFOM = std::stod(summary.substr(pos + 9));
    CHECK(finalFOM == doctest::Approx(lastPhi).epsilon(1e-15));

    // Reruns with identical flags are byte-identical.
    CHECK(hist == slurp(out2 + "/history.csv"));
    CHECK(slurp(out1 + "/design.pgm") == slurp(out2 + "/design.pgm"));
    CHECK(slurp(out1 + "/field.csv") == slurp(out2 + "/field.csv"));

    fs::remove_all(dir);
}

TEST_CASE("exit codes distinguish configuration errors") {
    const char* argv1[] = {"topem", "--preset", "bogus"};
    CHECK(cli::run(3, argv1) == 2);
    const char* argv2[] = {"topem"};
    CHECK(cli::run(1, argv2) == 2);
}
