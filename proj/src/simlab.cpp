#include "ssmean/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "ssmean/error.hpp"

namespace ssmean {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Outcome {
    double loss = kNaN;
    double ci_length = kNaN;
    bool covered = false;
    bool ok = false;
};

struct RowLayout {
    std::string estimator;
    std::optional<std::size_t> m;
};

class CellRunner {
public:
    explicit CellRunner(const SimulationConfig& config) : config_(config), dgp_(prepared(config)) {
        ms_ = config.ms;
        std::sort(ms_.begin(), ms_.end());
        ms_.erase(std::unique(ms_.begin(), ms_.end()), ms_.end());

        layout_.push_back({"mean", std::nullopt});
        layout_.push_back({"ls", std::nullopt});
        if (config_.truncated_variants) layout_.push_back({"ls_trunc", std::nullopt});
        for (std::size_t m : ms_) {
            layout_.push_back({"ssls", m});
            if (config_.truncated_variants) layout_.push_back({"ssls_trunc", m});
        }
        if (config_.oracle) {
            layout_.push_back({"oracle", std::nullopt});
            for (std::size_t m : ms_) layout_.push_back({"oracle_ss", m});
        }
        if (config_.basis) {
            basis_ = *config_.basis;
            if (!basis_.known_means && basis_.family == BasisFamily::Polynomial) {
                basis_.known_means = dgp_.polynomial_means(basis_.degree);
            }
            layout_.push_back({"ls_basis", std::nullopt});
            for (std::size_t m : ms_) layout_.push_back({"ssls_basis", m});
        }
    }

    const Dgp& dgp() const noexcept { return dgp_; }
    const std::vector<RowLayout>& layout() const noexcept { return layout_; }

    std::vector<Outcome> replicate(std::uint64_t rep) const {
        const Dataset ds = dgp_.draw(rep);
        const double theta = dgp_.theta();
        const double alpha = config_.alpha;
        std::vector<Outcome> out;
        out.reserve(layout_.size());

        auto record = [&](auto&& compute) {
            Outcome o;
            try {
                const MeanEstimate e = compute();
                o.loss = (e.theta_hat - theta) * (e.theta_hat - theta);
                o.ci_length = e.ci_length();
                o.covered = e.covers(theta);
                o.ok = std::isfinite(o.loss) && std::isfinite(o.ci_length);
            } catch (const Error&) {
                o = Outcome{};
            }
            out.push_back(o);
        };

        record([&] { return estimate_sample_mean(ds, alpha); });

        std::optional<LabeledSummary> summary;
        try {
            summary = summarize(ds.y, ds.x);
        } catch (const Error&) {
        }
        auto need = [&]() -> const LabeledSummary& {
            if (!summary) throw Error(ErrorCode::RankDeficient, "labeled fit failed");
            return *summary;
        };

        record([&] { return ls_from_summary(need(), *ds.known_mu, alpha, false); });
        if (config_.truncated_variants) {
            record([&] { return ls_from_summary(need(), *ds.known_mu, alpha, true); });
        }

        // Pooled means for each m from running sums over the unlabeled prefix.
        std::vector<Vector> mu_hats;
        if (summary) {
            Vector running = summary->x_sum;
            std::size_t consumed = 0;
            for (std::size_t m : ms_) {
                for (; consumed < m; ++consumed) {
                    auto r = ds.x_unlabeled.row(consumed);
                    for (std::size_t j = 0; j < running.size(); ++j) running[j] += r[j];
                }
                Vector mu = running;
                for (double& v : mu) v /= static_cast<double>(ds.n() + m);
                mu_hats.push_back(std::move(mu));
            }
        }
        for (std::size_t i = 0; i < ms_.size(); ++i) {
            record([&] {
                const LabeledSummary& s = need();
                return ssls_from_summary(s, mu_hats[i], ms_[i], alpha, false);
            });
            if (config_.truncated_variants) {
                record([&] {
                    const LabeledSummary& s = need();
                    return ssls_from_summary(s, mu_hats[i], ms_[i], alpha, true);
                });
            }
        }

        if (config_.oracle) {
            Vector labeled(ds.n());
            for (std::size_t k = 0; k < ds.n(); ++k) labeled[k] = dgp_.surface(ds.x.row(k));
            Vector unlabeled(ds.m());
            for (std::size_t k = 0; k < ds.m(); ++k) unlabeled[k] = dgp_.surface(ds.x_unlabeled.row(k));
            const auto xi0 = [this](std::span<const double> x) { return dgp_.surface(x); };
            record([&] { return estimate_oracle(ds, xi0, dgp_.surface_mean(), alpha); });
            for (std::size_t m : ms_) {
                record([&] {
                    return oracle_ss_from_surface(ds.y, labeled,
                                                  std::span<const double>(unlabeled).first(m), alpha);
                });
            }
        }

        if (config_.basis) {
            record([&] { return estimate_ls_augmented(ds, basis_, alpha); });
            for (std::size_t m : ms_) {
                record([&] { return estimate_ssls_augmented(prefix(ds, m), basis_, alpha); });
            }
        }
        return out;
    }

private:
    static Dgp prepared(const SimulationConfig& config) {
        DgpSpec spec = config.dgp;
        spec.m = config.ms.empty() ? 0 : *std::max_element(config.ms.begin(), config.ms.end());
        return Dgp(spec);
    }

    static Dataset prefix(const Dataset& ds, std::size_t m) {
        Dataset out;
        out.y = ds.y;
        out.x = ds.x;
        out.known_mu = ds.known_mu;
        const std::size_t p = ds.p();
        std::vector<double> rows(ds.x_unlabeled.data().begin(),
                                 ds.x_unlabeled.data().begin() + static_cast<std::ptrdiff_t>(m * p));
        out.x_unlabeled = Matrix(m, p, std::move(rows));
        return out;
    }

    const SimulationConfig& config_;
    Dgp dgp_;
    std::vector<std::size_t> ms_;
    std::vector<RowLayout> layout_;
    BasisSpec basis_;
};

}  // namespace

double EstimatorRow::miscoverage_se() const {
    if (reps == 0) return 0.0;
    return std::sqrt(miscoverage * (1.0 - miscoverage) / static_cast<double>(reps));
}

const EstimatorRow& SimulationReport::row(const std::string& estimator,
                                          std::optional<std::size_t> m) const {
    for (const EstimatorRow& r : rows) {
        if (r.estimator == estimator && r.m == m) return r;
    }
    throw Error(ErrorCode::InvalidArgs, "report has no row for " + estimator +
                                            (m ? " at m=" + std::to_string(*m) : std::string()));
}

SimulationReport run_simulation(const SimulationConfig& config) {
    if (config.reps < 1) throw Error(ErrorCode::InvalidArgs, "reps must be positive");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgs, "alpha must lie in (0,1)");
    }
    const CellRunner runner(config);
    const std::size_t reps = config.reps;
    std::vector<std::vector<Outcome>> results(reps);

    const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(reps)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t rep = next++; rep < reps; rep = next++) results[rep] = runner.replicate(rep);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    SimulationReport report;
    report.dgp = runner.dgp().spec();
    report.reps = reps;
    report.alpha = config.alpha;
    report.theta = runner.dgp().theta();
    const auto& layout = runner.layout();
    for (std::size_t i = 0; i < layout.size(); ++i) {
        EstimatorRow row;
        row.estimator = layout[i].estimator;
        row.m = layout[i].m;
        row.losses.reserve(reps);
        double loss_sum = 0.0;
        double loss_sq = 0.0;
        double len_sum = 0.0;
        double len_sq = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const Outcome& o = results[rep][i];
            row.losses.push_back(o.ok ? o.loss : kNaN);
            if (!o.ok) {
                ++row.failures;
                continue;
            }
            ++row.reps;
            loss_sum += o.loss;
            loss_sq += o.loss * o.loss;
            len_sum += o.ci_length;
            len_sq += o.ci_length * o.ci_length;
            if (!o.covered) ++row.misses;
        }
        if (row.reps > 0) {
            const double k = static_cast<double>(row.reps);
            row.avg_sq_loss = loss_sum / k;
            row.avg_ci_length = len_sum / k;
            row.miscoverage = static_cast<double>(row.misses) / k;
            if (row.reps > 1) {
                const double var_loss = std::max(0.0, (loss_sq - k * row.avg_sq_loss * row.avg_sq_loss) / (k - 1.0));
                const double var_len = std::max(0.0, (len_sq - k * row.avg_ci_length * row.avg_ci_length) / (k - 1.0));
                row.loss_se = std::sqrt(var_loss / k);
                row.ci_length_se = std::sqrt(var_len / k);
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

std::vector<SimulationReport> run_grid(const std::vector<GridCell>& grid,
                                       const std::vector<std::size_t>& ms, double alpha,
                                       std::size_t reps, std::uint64_t seed, unsigned threads) {
    std::vector<SimulationReport> out;
    out.reserve(grid.size());
    for (const GridCell& cell : grid) {
        SimulationConfig config;
        config.dgp.id = cell.id;
        config.dgp.n = cell.n;
        config.dgp.p = cell.p;
        config.dgp.seed = seed;
        config.ms = ms;
        config.reps = reps;
        config.alpha = alpha;
        config.threads = threads;
        config.truncated_variants = false;
        config.oracle = false;
        out.push_back(run_simulation(config));
    }
    return out;
}

}  // namespace

std::vector<SimulationReport> run_table1(const std::vector<GridCell>& grid,
                                         const std::vector<std::size_t>& ms, std::size_t reps,
                                         std::uint64_t seed, unsigned threads) {
    return run_grid(grid, ms, 0.05, reps, seed, threads);
}

std::vector<SimulationReport> run_table2(const std::vector<GridCell>& grid,
                                         const std::vector<std::size_t>& ms, double alpha,
                                         std::size_t reps, std::uint64_t seed, unsigned threads) {
    return run_grid(grid, ms, alpha, reps, seed, threads);
}

double paired_difference_se(const EstimatorRow& a, const EstimatorRow& b) {
    const std::size_t reps = std::min(a.losses.size(), b.losses.size());
    double sum = 0.0;
    double sq = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < reps; ++i) {
        if (std::isnan(a.losses[i]) || std::isnan(b.losses[i])) continue;
        const double d = a.losses[i] - b.losses[i];
        sum += d;
        sq += d * d;
        ++k;
    }
    if (k < 2) return 0.0;
    const double kd = static_cast<double>(k);
    const double mean_d = sum / kd;
    return std::sqrt(std::max(0.0, (sq - kd * mean_d * mean_d) / (kd - 1.0)) / kd);
}

}  // namespace ssmean
