#include "topem/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

namespace topem::cli {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ProblemSpec strip_problem(int nElX, int nElY, double scale, int targetX, int targetY,
                          int stripStart, int stripThickness, double lambda, double fR) {
    ProblemSpec p;
    p.grid.nElX = nElX;
    p.grid.nElY = nElY;
    p.grid.scale = scale;
    p.grid.targetXY = {targetX, targetY};
    p.grid.designElements = lens_design_indices(nElX, nElY, stripThickness, stripStart);
    p.strip = {stripStart, stripThickness};
    p.wavelengthElements = lambda;
    p.filterRadius = fR;
    return p;
}

}  // namespace

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.name = name;
    if (name == "metalens") {
        cfg.problem = strip_problem(400, 200, 1e-9, 200, 80, 165, 15, 35.0, 6.0);
        cfg.problem.material = DielectricSpec{3.0, 1.0};
        cfg.gradient.maxItr = 200;
    } else if (name == "filter-sweep") {
        cfg.problem = strip_problem(400, 200, 1e-9, 200, 80, 165, 15, 35.0, 6.0);
        cfg.problem.material = DielectricSpec{3.0, 1.0};
        cfg.gradient.maxItr = 200;
        cfg.sweepRadii = {1.0, 3.0, 6.0, 9.0};
    } else if (name == "reflector") {
        cfg.problem = strip_problem(400, 200, 1e-9, 200, 100, 165, 15, 35.0, 3.0);
        cfg.problem.material = PlasmonicSpec{1.9, 1.5};
        cfg.problem.sourceBoundary = SourceBoundary::top;
        cfg.gradient.maxItr = 200;
    } else if (name == "lens1d") {
        cfg.problem = strip_problem(400, 200, 1e-9, 200, 80, 165, 15, 35.0, 3.0);
        cfg.problem.material = DielectricSpec{3.0, 1.0};
        cfg.problem.linkMode = LinkMode::columns;
        cfg.gradient.maxItr = 200;
    } else if (name == "ga-compare") {
        cfg.problem = strip_problem(100, 50, 1e-9, 50, 10, 35, 10, 20.0, 3.0);
        cfg.problem.material = DielectricSpec{3.0, 1.0};
        cfg.gradient.maxItr = 500;
        cfg.ga.populationSize = 200;
        cfg.ga.generations = 500;
        cfg.ga.seed = 1;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto has = [&](const std::string& k) { return kv.count(k) > 0; };
    auto getd = [&](const std::string& k, double dflt) {
        return has(k) ? std::stod(kv.at(k)) : dflt;
    };
    auto geti = [&](const std::string& k, int dflt) {
        return has(k) ? std::stoi(kv.at(k)) : dflt;
    };
    auto need = [&](const std::string& k) {
        if (!has(k)) throw std::invalid_argument("config: missing key '" + k + "'");
        return kv.at(k);
    };

    RunConfig cfg;
    cfg.name = has("name") ? kv.at("name") : "config";
    const int nElX = std::stoi(need("nElX"));
    const int nElY = std::stoi(need("nElY"));
    cfg.problem = strip_problem(nElX, nElY, getd("scale", 1e-9), std::stoi(need("targetX")),
                                std::stoi(need("targetY")), std::stoi(need("stripStartRow")),
                                std::stoi(need("stripThickness")), getd("lambda", 35.0),
                                getd("fR", 6.0));
    if (has("n2") || has("k2")) {
        cfg.problem.material = PlasmonicSpec{getd("n2", 1.0), getd("k2", 0.0)};
    } else {
        cfg.problem.material = DielectricSpec{getd("eps_r", 3.0), getd("alpha", 1.0)};
    }
    if (has("source")) {
        const std::string s = kv.at("source");
        if (s == "bottom") cfg.problem.sourceBoundary = SourceBoundary::bottom;
        else if (s == "top") cfg.problem.sourceBoundary = SourceBoundary::top;
        else throw std::invalid_argument("config: source must be bottom|top");
    }
    if (has("link")) {
        const std::string s = kv.at("link");
        if (s == "none") cfg.problem.linkMode = LinkMode::none;
        else if (s == "columns") cfg.problem.linkMode = LinkMode::columns;
        else throw std::invalid_argument("config: link must be none|columns");
    }
    if (has("substrate")) {
        const std::string s = kv.at("substrate");
        if (s == "on") cfg.problem.substrate = true;
        else if (s == "off") cfg.problem.substrate = false;
        else throw std::invalid_argument("config: substrate must be on|off");
    }
    cfg.dVini = getd("dVini", 0.5);
    cfg.projection.beta = getd("beta", 5.0);
    cfg.projection.eta = getd("eta", 0.5);
    cfg.gradient.maxItr = geti("maxIter", 200);
    cfg.ga.generations = geti("generations", geti("maxIter", 500));
    cfg.ga.populationSize = geti("population", 200);
    cfg.ga.seed = static_cast<unsigned>(geti("seed", 1));
    if (has("optimizer")) {
        const std::string s = kv.at("optimizer");
        if (s == "gradient") cfg.optimizer = OptimizerKind::gradient;
        else if (s == "ga") cfg.optimizer = OptimizerKind::ga;
        else throw std::invalid_argument("config: optimizer must be gradient|ga");
    }
    return cfg;
}

void apply_resolution_factor(RunConfig& cfg, int factor) {
    if (factor < 1) throw std::invalid_argument("resolution factor must be a positive integer");
    if (factor == 1) return;
    ProblemSpec& p = cfg.problem;
    if (p.strip.thickness <= 0) {
        throw std::invalid_argument("resolution scaling needs a strip-based design region");
    }
    auto scaleIdx = [factor](int t) {
        return static_cast<int>(std::lround((t - 0.5) * factor + 0.5));
    };
    p.grid.nElX *= factor;
    p.grid.nElY *= factor;
    p.grid.scale /= factor;
    p.grid.targetXY = {scaleIdx(p.grid.targetXY[0]), scaleIdx(p.grid.targetXY[1])};
    p.strip.startRow = (p.strip.startRow - 1) * factor + 1;
    p.strip.thickness *= factor;
    p.grid.designElements =
        lens_design_indices(p.grid.nElX, p.grid.nElY, p.strip.thickness, p.strip.startRow);
    p.wavelengthElements *= factor;
    p.filterRadius *= factor;
}

double compute_geometric_na(const ProblemSpec& spec) {
    if (spec.strip.thickness <= 0) return std::numeric_limits<double>::quiet_NaN();
    const double f = spec.strip.startRow - spec.grid.targetXY[1];
    if (f <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double halfWidth = spec.grid.nElX / 2.0;
    return std::sin(std::atan(halfWidth / f));
}

void write_pgm(const std::string& path, const Eigen::ArrayXXd& values01) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "P5\n" << values01.cols() << " " << values01.rows() << "\n255\n";
    for (Eigen::Index r = 0; r < values01.rows(); ++r) {
        for (Eigen::Index c = 0; c < values01.cols(); ++c) {
            const double v = std::clamp(values01(r, c), 0.0, 1.0);
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
}

void write_history_csv(const std::string& path, const RunHistory& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "iteration,phi,forward_solves,adjoint_solves,beta,seconds\n";
    for (const auto& rec : history.records) {
        // Wall time is quantized to whole seconds so that repeated runs with
        // identical flags produce byte-identical files.
        out << rec.iteration << ',' << format_double(rec.fom) << ',' << rec.forwardSolves << ','
            << rec.adjointSolves << ',' << format_double(rec.beta) << ','
            << static_cast<long>(rec.seconds) << '\n';
    }
}

namespace {

void write_field_csv(const std::string& path, const Eigen::VectorXcd& ez, int nElX, int nElY) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (int iy = 0; iy <= nElY; ++iy) {
        for (int ix = 0; ix <= nElX; ++ix) {
            if (ix) out << ',';
            out << format_double(std::norm(ez[ix * (nElY + 1) + iy]));
        }
        out << '\n';
    }
}

Eigen::ArrayXXd nodal_intensity(const Eigen::VectorXcd& ez, int nElX, int nElY) {
    Eigen::ArrayXXd img(nElY + 1, nElX + 1);
    for (int ix = 0; ix <= nElX; ++ix) {
        for (int iy = 0; iy <= nElY; ++iy) {
            img(iy, ix) = std::norm(ez[ix * (nElY + 1) + iy]);
        }
    }
    return img;
}

}  // namespace

RunSummary execute(const RunConfig& cfg, const std::string& outDir, std::ostream& log,
                   const std::string& suffix) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(outDir);

    Evaluator evaluator(cfg.problem);
    const int n = cfg.problem.numDesignVars();
    Eigen::VectorXd dVini;
    if (!cfg.dViniVector.empty()) {
        if (static_cast<int>(cfg.dViniVector.size()) != n) {
            throw std::invalid_argument("initial design vector length mismatch");
        }
        dVini = Eigen::Map<const Eigen::VectorXd>(cfg.dViniVector.data(), n);
    } else {
        dVini = Eigen::VectorXd::Constant(n, cfg.dVini);
    }

    auto onIter = [&log](const IterationRecord& rec) {
        log << "FOM: " << rec.fom << "\n";
    };

    OptResult opt;
    if (cfg.optimizer == OptimizerKind::ga) {
        opt = optimize_ga(evaluator, cfg.ga, dVini, onIter);
    } else if (cfg.continuation || cfg.gradient.continuation) {
        GradientConfig gc = cfg.gradient;
        if (!gc.continuation) gc.continuation = ContinuationSchedule{cfg.projection.beta, 20.0, 1.5};
        opt = run_continuation(evaluator, gc, cfg.projection, dVini, onIter);
    } else {
        opt = optimize_gradient(evaluator, cfg.gradient, cfg.projection, dVini, onIter);
    }
    if (opt.dVs.size() == 0) opt.dVs = dVini;

    RunSummary sum;
    sum.dVs = opt.dVs;
    sum.history = std::move(opt.history);
    sum.finalFOM = sum.history.records.empty()
                       ? evaluator.evaluate(opt.dVs, cfg.projection, false).fom
                       : sum.history.records.back().fom;

    log << "Black/white design evaluation:\n";
    Evaluation binEval = evaluator.binarized_evaluate(opt.dVs, cfg.projection.eta);
    log << "FOM: " << binEval.fom << "\n";
    sum.binarizedFOM = binEval.fom;
    sum.mnd = nondiscreteness(binEval.projected, cfg.problem.grid);
    sum.naGeometric = compute_geometric_na(cfg.problem);

    Evaluation emptyEval =
        evaluator.binarized_evaluate(Eigen::VectorXd::Zero(n), cfg.projection.eta);
    sum.emptyDomainFOM = emptyEval.fom;
    sum.fluxDiagnostic = transmission_flux(binEval, emptyEval, cfg.problem);

    sum.forwardSolves = evaluator.stats().forwardSolves;
    sum.adjointSolves = evaluator.stats().adjointSolves;
    sum.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir(outDir);
    const std::string designPath = (dir / ("design" + suffix + ".pgm")).string();
    const std::string fieldPgmPath = (dir / ("field" + suffix + ".pgm")).string();
    const std::string fieldCsvPath = (dir / ("field" + suffix + ".csv")).string();
    const std::string historyPath = (dir / ("history" + suffix + ".csv")).string();
    const std::string summaryPath = (dir / ("summary" + suffix + ".txt")).string();

    write_pgm(designPath, 1.0 - binEval.projected);  // solid renders black
    Eigen::ArrayXXd intensity =
        nodal_intensity(binEval.ez, cfg.problem.grid.nElX, cfg.problem.grid.nElY);
    const double peak = intensity.maxCoeff();
    write_pgm(fieldPgmPath, peak > 0.0 ? Eigen::ArrayXXd(intensity / peak) : intensity);
    write_field_csv(fieldCsvPath, binEval.ez, cfg.problem.grid.nElX, cfg.problem.grid.nElY);
    write_history_csv(historyPath, sum.history);

    sum.files = {designPath, fieldPgmPath, fieldCsvPath, historyPath, summaryPath};
    std::ofstream summary(summaryPath, std::ios::binary);
    summary << "finalFOM=" << format_double(sum.finalFOM) << '\n'
            << "binarizedFOM=" << format_double(sum.binarizedFOM) << '\n'
            << "emptyDomainFOM=" << format_double(sum.emptyDomainFOM) << '\n'
            << "M_nd=" << format_double(sum.mnd) << '\n'
            << "NA_geometric=" << format_double(sum.naGeometric) << '\n'
            << "flux_diagnostic=" << format_double(sum.fluxDiagnostic) << '\n'
            << "forward_solves=" << sum.forwardSolves << '\n'
            << "adjoint_solves=" << sum.adjointSolves << '\n'
            << "wall_seconds=" << format_double(sum.wallSeconds) << '\n';
    summary << "files=";
    for (size_t i = 0; i < sum.files.size(); ++i) {
        if (i) summary << ';';
        summary << sum.files[i];
    }
    summary << '\n';
    return sum;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"2D frequency-domain electromagnetic topology optimization"};

    std::string presetName, configPath, outDir = "out", optimizerName;
    int maxIter = -1, resolutionFactor = 1;
    long seed = -1;
    double beta = -1.0, eta = -1.0;
    bool continuation = false;

    app.add_option("--preset", presetName,
                   "metalens | filter-sweep | reflector | lens1d | ga-compare");
    app.add_option("--config", configPath, "key=value config file");
    app.add_option("--out-dir", outDir, "output directory");
    app.add_option("--max-iter", maxIter, "iteration / generation cap override");
    app.add_option("--optimizer", optimizerName, "gradient | ga");
    app.add_flag("--continuation", continuation, "enable beta continuation");
    app.add_option("--seed", seed, "GA random seed");
    app.add_option("--resolution-factor", resolutionFactor, "integer mesh refinement factor");
    app.add_option("--beta", beta, "threshold sharpness override");
    app.add_option("--eta", eta, "threshold level override");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!presetName.empty()) {
            cfg = preset(presetName);
        } else if (!configPath.empty()) {
            cfg = load_config(configPath);
        } else {
            std::cerr << "error: either --preset or --config is required\n";
            return 2;
        }

        if (maxIter > 0) {
            cfg.gradient.maxItr = maxIter;
            cfg.ga.generations = maxIter;
        }
        if (!optimizerName.empty()) {
            if (optimizerName == "gradient") cfg.optimizer = OptimizerKind::gradient;
            else if (optimizerName == "ga") cfg.optimizer = OptimizerKind::ga;
            else throw std::invalid_argument("optimizer must be gradient|ga");
        }
        if (continuation) cfg.continuation = true;
        if (seed >= 0) cfg.ga.seed = static_cast<unsigned>(seed);
        if (beta > 0.0) cfg.projection.beta = beta;
        if (eta >= 0.0) cfg.projection.eta = eta;
        apply_resolution_factor(cfg, resolutionFactor);

        if (!cfg.sweepRadii.empty() && cfg.optimizer == OptimizerKind::gradient) {
            for (double fR : cfg.sweepRadii) {
                RunConfig one = cfg;
                one.sweepRadii.clear();
                one.problem.filterRadius = fR;
                std::ostringstream tag;
                tag << "_fR" << fR;
                std::cout << "== filter radius " << fR << " ==\n";
                execute(one, outDir, std::cout, tag.str());
            }
        } else {
            execute(cfg, outDir, std::cout);
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace topem::cli
