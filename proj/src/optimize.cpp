#include "topem/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace topem {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd clip(Eigen::VectorXd x, double lb, double ub) {
    return x.cwiseMax(lb).cwiseMin(ub);
}

}  // namespace

BoxMinResult minimize_projected_lbfgs(
    const BoxObjective& f, Eigen::VectorXd x0, double lb, double ub, const BoxMinOptions& opt,
    const std::function<void(int, double, const Eigen::VectorXd&)>& onAccept) {
    const Eigen::Index n = x0.size();
    const long maxEvals = opt.maxEvaluations > 0 ? opt.maxEvaluations : 4L * opt.maxIter;
    const double c1 = 1e-4;

    BoxMinResult res;
    res.x = clip(std::move(x0), lb, ub);

    Eigen::VectorXd g(n);
    double fval = f(res.x, g);
    ++res.evaluations;

    std::deque<Eigen::VectorXd> sHist, yHist;
    std::deque<double> rhoHist;
    int stallCount = 0;

    auto projectedGradient = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
        Eigen::VectorXd pg = grad;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (x[i] <= lb && grad[i] > 0.0) pg[i] = 0.0;
            if (x[i] >= ub && grad[i] < 0.0) pg[i] = 0.0;
        }
        return pg;
    };

    for (int iter = 1; iter <= opt.maxIter; ++iter) {
        Eigen::VectorXd pg = projectedGradient(res.x, g);
        res.projectedGradientNorm = pg.lpNorm<Eigen::Infinity>();
        if (res.projectedGradientNorm <= opt.gtol) break;

        // Two-loop recursion on the projected gradient; variables pinned at
        // an active bound keep a zero direction component.
        Eigen::VectorXd q = pg;
        std::vector<double> alpha(sHist.size());
        for (int i = static_cast<int>(sHist.size()) - 1; i >= 0; --i) {
            alpha[i] = rhoHist[i] * sHist[i].dot(q);
            q -= alpha[i] * yHist[i];
        }
        if (!sHist.empty()) {
            const double gamma = sHist.back().dot(yHist.back()) / yHist.back().squaredNorm();
            q *= gamma;
        }
        for (size_t i = 0; i < sHist.size(); ++i) {
            const double beta = rhoHist[i] * yHist[i].dot(q);
            q += (alpha[i] - beta) * sHist[i];
        }
        Eigen::VectorXd d = -q;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (pg[i] == 0.0 && (res.x[i] <= lb || res.x[i] >= ub)) d[i] = 0.0;
        }
        if (d.dot(g) >= 0.0) {
            sHist.clear(); yHist.clear(); rhoHist.clear();
            d = -pg;
        }

        // Backtracking line search along the projected arc.
        double step = 1.0;
        if (sHist.empty() && iter == 1) {
            const double gi = pg.lpNorm<Eigen::Infinity>();
            if (gi > 0.0) step = std::min(1.0, 0.1 / gi);
        }
        bool accepted = false;
        Eigen::VectorXd xNew, gNew(n);
        double fNew = fval;
        for (int ls = 0; ls < 40 && res.evaluations < maxEvals; ++ls) {
            xNew = clip(res.x + step * d, lb, ub);
            if ((xNew - res.x).lpNorm<Eigen::Infinity>() == 0.0) break;
            fNew = f(xNew, gNew);
            ++res.evaluations;
            const double directional = g.dot(xNew - res.x);
            if (fNew <= fval + c1 * directional) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        Eigen::VectorXd s = xNew - res.x;
        Eigen::VectorXd y = gNew - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            sHist.push_back(std::move(s));
            yHist.push_back(std::move(y));
            rhoHist.push_back(1.0 / sy);
            if (static_cast<int>(sHist.size()) > opt.memory) {
                sHist.pop_front(); yHist.pop_front(); rhoHist.pop_front();
            }
        }

        const double rel = std::abs(fNew - fval) / std::max(1.0, std::abs(fval));
        stallCount = (rel < opt.ftol) ? stallCount + 1 : 0;

        res.x = std::move(xNew);
        g = std::move(gNew);
        fval = fNew;
        res.iterations = iter;
        if (onAccept) onAccept(iter, fval, res.x);

        if (stallCount >= opt.ftolWindow) break;
        if (res.evaluations >= maxEvals) break;
    }

    res.f = fval;
    Eigen::VectorXd pg = projectedGradient(res.x, g);
    res.projectedGradientNorm = pg.lpNorm<Eigen::Infinity>();
    return res;
}

OptResult optimize_gradient(Evaluator& evaluator, const GradientConfig& cfg,
                            const ProjectionSpec& projection, Eigen::VectorXd dVini,
                            const IterationCallback& onIteration) {
    if (cfg.maxItr < 1) throw std::invalid_argument("optimize_gradient: maxItr must be >= 1");
    const auto t0 = std::chrono::steady_clock::now();

    OptResult out;
    const int iterBase = 0;
    BoxObjective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        Evaluation ev = evaluator.evaluate(x, projection, true);
        grad = -ev.sensFOM;
        return -ev.fom;
    };

    BoxMinOptions opt;
    opt.maxIter = cfg.maxItr;
    opt.memory = cfg.memory;
    opt.ftol = cfg.ftol;

    auto record = [&](int iter, double fval, const Eigen::VectorXd&) {
        IterationRecord rec;
        rec.iteration = iterBase + iter;
        rec.fom = -fval;
        rec.forwardSolves = evaluator.stats().forwardSolves;
        rec.adjointSolves = evaluator.stats().adjointSolves;
        rec.beta = projection.beta;
        rec.seconds = seconds_since(t0);
        out.history.records.push_back(rec);
        if (onIteration) onIteration(rec);
    };

    BoxMinResult res = minimize_projected_lbfgs(objective, std::move(dVini), 0.0, 1.0, opt, record);
    out.dVs = std::move(res.x);
    return out;
}

OptResult run_continuation(Evaluator& evaluator, const GradientConfig& cfg,
                           const ProjectionSpec& projection, Eigen::VectorXd dVini,
                           const IterationCallback& onIteration) {
    if (!cfg.continuation) {
        return optimize_gradient(evaluator, cfg, projection, std::move(dVini), onIteration);
    }
    const ContinuationSchedule& sched = *cfg.continuation;
    if (!(sched.betaInc > 1.0)) {
        throw std::invalid_argument("run_continuation: betaInc must exceed 1");
    }

    OptResult out;
    out.dVs = std::move(dVini);
    double beta = sched.betaStart;
    int iterOffset = 0;
    do {
        ProjectionSpec stage{beta, projection.eta};
        OptResult inner = optimize_gradient(
            evaluator, cfg, stage, out.dVs, [&](const IterationRecord& rec) {
                IterationRecord shifted = rec;
                shifted.iteration += iterOffset;
                out.history.records.push_back(shifted);
                if (onIteration) onIteration(shifted);
            });
        out.dVs = std::move(inner.dVs);
        if (!out.history.records.empty()) iterOffset = out.history.records.back().iteration;
        beta *= sched.betaInc;
    } while (beta < sched.betaMax);
    return out;
}

OptResult optimize_ga(Evaluator& evaluator, const GAConfig& cfg, const Eigen::VectorXd& dVini,
                      const IterationCallback& onIteration) {
    if (cfg.populationSize < 2) throw std::invalid_argument("optimize_ga: population must be >= 2");
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = dVini.size();
    const ProjectionSpec projection{cfg.projectionBeta, 0.5};
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, cfg.mutationSigma);

    auto fitness = [&](const Eigen::VectorXd& x) {
        return evaluator.evaluate(x, projection, false).fom;
    };

    std::vector<Eigen::VectorXd> pop(cfg.populationSize);
    std::vector<double> fit(cfg.populationSize);
    pop[0] = clip(dVini, 0.0, 1.0);
    for (int i = 1; i < cfg.populationSize; ++i) {
        pop[i].resize(n);
        for (Eigen::Index j = 0; j < n; ++j) pop[i][j] = unif(rng);
    }

    OptResult out;
    Eigen::VectorXd best;
    double bestFit = -std::numeric_limits<double>::infinity();
    double lastImprovedFit = bestFit;
    int stall = 0;

    auto evaluatePop = [&]() {
        for (int i = 0; i < cfg.populationSize; ++i) fit[i] = fitness(pop[i]);
    };
    auto tournament = [&]() -> const Eigen::VectorXd& {
        int winner = std::uniform_int_distribution<int>(0, cfg.populationSize - 1)(rng);
        for (int t = 1; t < cfg.tournamentSize; ++t) {
            int c = std::uniform_int_distribution<int>(0, cfg.populationSize - 1)(rng);
            if (fit[c] > fit[winner]) winner = c;
        }
        return pop[winner];
    };

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        evaluatePop();

        std::vector<int> order(cfg.populationSize);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fit[a] > fit[b]; });
        if (fit[order[0]] > bestFit) {
            bestFit = fit[order[0]];
            best = pop[order[0]];
        }

        IterationRecord rec;
        rec.iteration = gen;
        rec.fom = bestFit;
        rec.forwardSolves = evaluator.stats().forwardSolves;
        rec.adjointSolves = evaluator.stats().adjointSolves;
        rec.beta = cfg.projectionBeta;
        rec.seconds = seconds_since(t0);
        out.history.records.push_back(rec);
        if (onIteration) onIteration(rec);

        if (bestFit - lastImprovedFit < cfg.stallTol) {
            if (++stall >= cfg.stallGenerations) break;
        } else {
            stall = 0;
            lastImprovedFit = bestFit;
        }
        if (gen == cfg.generations) break;

        std::vector<Eigen::VectorXd> next;
        next.reserve(cfg.populationSize);
        for (int e = 0; e < cfg.eliteCount && e < cfg.populationSize; ++e) {
            next.push_back(pop[order[e]]);
        }
        while (static_cast<int>(next.size()) < cfg.populationSize) {
            Eigen::VectorXd child = tournament();
            if (unif(rng) < cfg.crossoverRate) {
                const Eigen::VectorXd& other = tournament();
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (unif(rng) < 0.5) child[j] = other[j];
                }
            }
            for (Eigen::Index j = 0; j < n; ++j) {
                child[j] = std::clamp(child[j] + gauss(rng), 0.0, 1.0);
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
    }

    out.dVs = best.size() > 0 ? best : pop[0];
    return out;
}

}  // namespace topem
