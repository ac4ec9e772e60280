#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ssmean/basis.hpp"
#include "ssmean/dgp.hpp"

namespace ssmean {

struct SimulationConfig {
    /// The m field of dgp is overwritten with the largest entry of ms.
    DgpSpec dgp;
    /// Unlabeled sample sizes for the semi-supervised rows; the smaller sets
    /// are prefixes of the largest draw.
    std::vector<std::size_t> ms;
    std::size_t reps = 1000;
    double alpha = 0.05;
    unsigned threads = 1;
    /// Also report the truncated LS and SSLS variants.
    bool truncated_variants = true;
    /// Also report the oracle estimators (known response surface).
    bool oracle = true;
    /// Also report LS and SSLS on augmented covariates.
    std::optional<BasisSpec> basis;
};

/// Aggregate over replications for one estimator (and one m, when it uses m).
struct EstimatorRow {
    std::string estimator;
    /// nullopt for estimators that do not use unlabeled rows; LS rows are the
    /// m = infinity case.
    std::optional<std::size_t> m;
    double avg_sq_loss = 0.0;
    double loss_se = 0.0;
    double avg_ci_length = 0.0;
    double ci_length_se = 0.0;
    double miscoverage = 0.0;
    std::size_t misses = 0;
    std::size_t reps = 0;
    std::size_t failures = 0;
    /// Per-replication squared losses in replication order (NaN for failures).
    std::vector<double> losses;

    double coverage() const noexcept { return 1.0 - miscoverage; }
    double miscoverage_se() const;
};

struct SimulationReport {
    DgpSpec dgp;
    std::size_t reps = 0;
    double alpha = 0.05;
    double theta = 0.0;
    std::vector<EstimatorRow> rows;

    /// Throws InvalidArgs when no such row exists.
    const EstimatorRow& row(const std::string& estimator,
                            std::optional<std::size_t> m = std::nullopt) const;
};

/// Runs one grid cell. Replications may execute on several threads but are
/// reduced in replication order, so the report does not depend on `threads`.
SimulationReport run_simulation(const SimulationConfig& config);

/// One cell of a table grid.
struct GridCell {
    DgpId id = DgpId::GaussQuad;
    std::size_t p = 1;
    std::size_t n = 100;
};

/// Squared-loss study over a grid: every cell reports the sample mean, LS and
/// SSLS at each m.
std::vector<SimulationReport> run_table1(const std::vector<GridCell>& grid,
                                         const std::vector<std::size_t>& ms, std::size_t reps,
                                         std::uint64_t seed, unsigned threads = 1);

/// Interval study over a grid: same rows, read for CI length and miscoverage.
std::vector<SimulationReport> run_table2(const std::vector<GridCell>& grid,
                                         const std::vector<std::size_t>& ms, double alpha,
                                         std::size_t reps, std::uint64_t seed, unsigned threads = 1);

/// Paired standard error of mean(a - b) over replications where both succeeded.
double paired_difference_se(const EstimatorRow& a, const EstimatorRow& b);

}  // namespace ssmean
