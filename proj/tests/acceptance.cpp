// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ate_dgp.hpp"
#include "ssmean/ate.hpp"
#include "ssmean/basis.hpp"
#include "ssmean/cli.hpp"
#include "ssmean/estimators.hpp"
#include "ssmean/simlab.hpp"
#include "test_support.hpp"

using namespace ssmean;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// 1. Gaussian exact risk.
Outcome exact_risk() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    SimulationConfig c;
    c.dgp.id = DgpId::GaussLinear;
    c.dgp.n = 100;
    c.dgp.p = 5;
    c.dgp.tau2 = 1.0;
    c.dgp.seed = 1;
    c.ms = {0, 100};
    c.reps = 20000;
    c.truncated_variants = false;
    c.oracle = false;
    const SimulationReport r = run_simulation(c);
    const double n = 100.0;
    const Dgp dgp([&] {
        DgpSpec s = c.dgp;
        s.m = 100;
        return s;
    }());

    auto check = [&](const EstimatorRow& row, double target, const std::string& label) {
        const double risk = n * row.avg_sq_loss;
        const double se = n * row.loss_se;
        o.detail << ' ' << label << ' ' << fmt(risk) << " vs " << fmt(target) << " (se " << fmt(se, 2) << ");";
        o.require(std::abs(risk - target) <= 3 * se, label);
    };
    check(r.row("ls"), dgp.exact_risk(std::nullopt)->ls, "LS");
    check(r.row("ssls", 0), dgp.exact_risk(0)->ssls, "SSLS m=0");
    check(r.row("ssls", 100), dgp.exact_risk(100)->ssls, "SSLS m=100");
    check(r.row("ls"), dgp.exact_risk(std::nullopt)->ssls, "SSLS m=inf");
    check(r.row("mean"), dgp.response_variance(), "n*Var(Ybar)");
    o.require(dgp.exact_risk(0)->ssls == dgp.response_variance(), "m=0 identity");
    const double elapsed = seconds_since(t0);
    o.detail << " time " << fmt(elapsed, 3) << "s";
    o.require(elapsed <= 120.0, "runtime");
    return o;
}

// 2. Ordering of the squared losses in the quadratic setting.
Outcome loss_ordering() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<GridCell> grid{{DgpId::GaussQuad, 1, 100}, {DgpId::GaussQuad, 10, 500}};
    const auto reports = run_table1(grid, {100, 1000, 10000}, 500, 1);
    for (const SimulationReport& r : reports) {
        const std::vector<const EstimatorRow*> chain{&r.row("ls"), &r.row("ssls", 10000), &r.row("ssls", 1000),
                                                     &r.row("ssls", 100), &r.row("mean")};
        int violations = 0;
        bool within = true;
        o.detail << " (" << r.dgp.p << "," << r.dgp.n << "):";
        for (const EstimatorRow* row : chain) o.detail << ' ' << fmt(row->avg_sq_loss);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            const double gap = chain[i]->avg_sq_loss - chain[i + 1]->avg_sq_loss;
            if (gap > 0) {
                ++violations;
                const double se = paired_difference_se(*chain[i], *chain[i + 1]);
                within = within && gap <= 2 * se;
                o.detail << " [violation " << i << ": gap " << fmt(gap, 2) << ", se " << fmt(se, 2) << "]";
            }
        }
        o.detail << ';';
        o.require(violations <= 1 && within, "ordering");
    }
    const double elapsed = seconds_since(t0);
    o.detail << " time " << fmt(elapsed, 3) << "s";
    o.require(elapsed <= 300.0, "runtime");
    return o;
}

// 3. Interval structure.
Outcome interval_structure() {
    Outcome o;
    struct Cell {
        DgpId id;
        std::size_t p;
        std::size_t n;
    };
    for (const Cell& cell : {Cell{DgpId::GaussLinear, 5, 500}, Cell{DgpId::GaussQuad, 1, 100}}) {
        SimulationConfig c;
        c.dgp.id = cell.id;
        c.dgp.p = cell.p;
        c.dgp.n = cell.n;
        c.dgp.seed = 1;
        c.ms = {100, 1000, 10000};
        c.reps = 2000;
        c.alpha = 0.05;
        c.truncated_variants = false;
        c.oracle = false;
        const SimulationReport r = run_simulation(c);
        o.detail << ' ' << to_string(cell.id) << " (" << cell.p << "," << cell.n << ") miss:";
        for (const EstimatorRow& row : r.rows) {
            o.detail << ' ' << row.estimator << (row.m ? std::to_string(*row.m) : "") << '=' << fmt(row.miscoverage, 3);
            o.require(row.miscoverage >= 0.03 && row.miscoverage <= 0.07, "miscoverage " + row.estimator);
        }
        const double ls_len = r.row("ls").avg_ci_length;
        const double mean_len = r.row("mean").avg_ci_length;
        o.detail << " len ls " << fmt(ls_len) << " < mean " << fmt(mean_len) << ';';
        o.require(ls_len < mean_len, "CI length");
    }
    return o;
}

// 4. Oracle floor and the basis-augmented estimator.
Outcome oracle_floor() {
    Outcome o;
    SimulationConfig c;
    c.dgp.id = DgpId::GaussQuad;
    c.dgp.p = 1;
    c.dgp.n = 1000;
    c.dgp.seed = 1;
    c.ms = {1000};
    c.reps = 4000;
    c.truncated_variants = false;
    c.basis = BasisSpec::polynomial(3);  // adds x^2 and x^3
    const SimulationReport r = run_simulation(c);
    const Dgp dgp(c.dgp);
    const double n = 1000.0;
    const EstimatorRow& oracle = r.row("oracle");
    const double oracle_risk = n * oracle.avg_sq_loss;
    o.detail << " n*risk(oracle) " << fmt(oracle_risk) << " vs sigma2 " << fmt(dgp.oracle_variance()) << " (se "
             << fmt(n * oracle.loss_se, 2) << ");";
    o.require(std::abs(oracle_risk - dgp.oracle_variance()) <= 3 * n * oracle.loss_se, "oracle risk");
    const EstimatorRow& aug = r.row("ls_basis");
    const double ratio = aug.avg_sq_loss / oracle.avg_sq_loss;
    o.detail << " n*risk(LS poly q=2) " << fmt(n * aug.avg_sq_loss) << ", ratio " << fmt(ratio) << ";";
    o.detail << " n*risk(LS) " << fmt(n * r.row("ls").avg_sq_loss);
    o.require(std::abs(ratio - 1.0) <= 0.10, "basis within 10% of oracle");
    o.require(aug.failures == 0, "basis failures");
    return o;
}

// 5. Property suites.
Outcome properties() {
    Outcome o;
    std::mt19937_64 gen(5);
    auto make = [&](std::size_t n, std::size_t p, std::size_t m) {
        Dataset ds;
        ds.x = testing_support::random_matrix(gen, n, p);
        ds.x_unlabeled = testing_support::random_matrix(gen, m, p);
        const Vector b = testing_support::random_vector(gen, p);
        const Vector e = testing_support::random_vector(gen, n);
        ds.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) ds.y[i] = 1.0 + dot(ds.x.row(i), b) + ds.x(i, 0) * ds.x(i, 0) + e[i];
        ds.known_mu = testing_support::random_vector(gen, p, 0.5);
        return ds;
    };

    int affine_bad = 0, reduction_bad = 0, formula_bad = 0, bound_bad = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t p = 1 + t % 5;
        const Dataset ds = make(20 + t % 30, p, t % 13);
        const MeanEstimate ls = estimate_ls(ds, 0.05, false);

        Matrix u = testing_support::random_matrix(gen, p, p, 0.3);
        for (std::size_t j = 0; j < p; ++j) u(j, j) += 2.0;
        const Vector a = testing_support::random_vector(gen, p, 3.0);
        Dataset moved = ds;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const Vector ux = matvec(u, ds.x.row(i));
            for (std::size_t j = 0; j < p; ++j) moved.x(i, j) = ux[j] + a[j];
        }
        Vector mu = matvec(u, *ds.known_mu);
        for (std::size_t j = 0; j < p; ++j) mu[j] += a[j];
        moved.known_mu = mu;
        const double scale = std::max(1.0, std::abs(ls.theta_hat));
        affine_bad += std::abs(estimate_ls(moved, 0.05, false).theta_hat - ls.theta_hat) > 1e-8 * scale;

        Dataset no_m = ds;
        no_m.x_unlabeled = Matrix(0, p);
        const MeanEstimate ss0 = estimate_ssls(no_m, 0.05, false);
        reduction_bad += std::abs(ss0.theta_hat - mean(ds.y)) > 1e-12 * std::max(1.0, std::abs(mean(ds.y))) ||
                         ss0.variance_per_n != sample_variance(ds.y);

        const double intercept_form = ls.fit->beta1 + dot(ls.fit->beta2, *ds.known_mu);
        formula_bad += std::abs(intercept_form - ls.theta_hat) > 1e-10 * scale;

        const MeanEstimate ss = estimate_ssls(ds, 0.05, false);
        const double lo = std::min(ss.fit->mse, sample_variance(ds.y));
        const double hi = std::max(ss.fit->mse, sample_variance(ds.y));
        bound_bad += ss.variance_per_n < lo * (1 - 1e-14) || ss.variance_per_n > hi * (1 + 1e-14);
    }
    o.require(affine_bad == 0, "affine invariance");
    o.require(reduction_bad == 0, "m=0 reduction");
    o.require(formula_bad == 0, "two formulas");
    o.require(bound_bad == 0, "nu2 bounds");

    const Vector y{1, 2, 3};
    const TruncationBand band = TruncationBand::from_responses(y);
    const bool band_ok = band.lower == -5.0 && band.upper == 9.0 && truncate_to_band(100, y) == std::pair{9.0, true} &&
                         truncate_to_band(-100, y) == std::pair{-5.0, true} &&
                         truncate_to_band(2.5, y) == std::pair{2.5, false} &&
                         band.upper - band.lower == 2 * band.half_width;
    o.require(band_ok, "truncation band");

    int ols_bad = 0;
    std::uniform_int_distribution<std::size_t> pd(1, 8);
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t p = pd(gen);
        std::uniform_int_distribution<std::size_t> nd(p + 2, 50);
        const std::size_t n = nd(gen);
        const Matrix d = build_design(testing_support::random_matrix(gen, n, p));
        const Vector yv = testing_support::random_vector(gen, n, 2.0);
        const OlsSolution s = ols_solve(d, yv);
        const Vector ref = testing_support::normal_equations(d, yv);
        const double sc = std::max(1.0, testing_support::max_abs(ref));
        bool ok = s.rank_ok;
        for (std::size_t j = 0; ok && j < ref.size(); ++j) ok = std::abs(s.beta[j] - ref[j]) <= 1e-8 * sc;
        ols_bad += !ok;
    }
    o.require(ols_bad == 0, "OLS brute force");
    o.detail << " 200 instances each: affine " << affine_bad << ", m=0 " << reduction_bad << ", formulas "
             << formula_bad << ", nu2 bounds " << bound_bad << ", OLS " << ols_bad
             << " failures; truncation band " << (band_ok ? "ok" : "wrong");
    return o;
}

// 6. ATE coverage and symmetry.
Outcome ate_coverage() {
    Outcome o;
    const testing_support::AteDesign design;
    const std::size_t reps = 2000;
    std::size_t misses = 0;
    std::size_t asymmetric = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        AteDataset ds = design.draw(1, rep);
        const AteEstimate e = estimate_ate(ds, 0.05);
        if (design.effect() < e.ci_lower || design.effect() > e.ci_upper) ++misses;
        std::swap(ds.x_t, ds.x_c);
        std::swap(ds.y_t, ds.y_c);
        const AteEstimate s = estimate_ate(ds, 0.05);
        if (s.d_hat != -e.d_hat || s.v_hat2 != e.v_hat2) ++asymmetric;
    }
    const double rate = static_cast<double>(misses) / reps;
    o.detail << " d = " << fmt(design.effect()) << ", miscoverage " << fmt(rate, 3) << ", swap mismatches "
             << asymmetric;
    o.require(rate >= 0.03 && rate <= 0.07, "miscoverage");
    o.require(asymmetric == 0, "swap symmetry");
    return o;
}

// 7. Byte-identical simulate output.
Outcome determinism(const std::string& binary) {
    Outcome o;
    const fs::path dir = fs::temp_directory_path() / "ssmean_acceptance";
    fs::create_directories(dir);
    const std::string flags =
        " simulate --setting gauss-quad --n 100 --p 3 --m 100,1000 --reps 300 --seed 42 --format csv";
    auto go = [&](const std::string& name, const std::string& extra) {
        const fs::path out = dir / name;
        const std::string cmd = binary + flags + extra + " --out " + out.string();
        const int rc = std::system(cmd.c_str());
        std::ifstream in(out, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        o.require(rc == 0, name + " exit status");
        return s.str();
    };
    const std::string a = go("run1.csv", " --threads 1");
    const std::string b = go("run2.csv", " --threads 1");
    const std::string c = go("run3.csv", " --threads 4");
    fs::remove_all(dir);
    o.require(!a.empty(), "non-empty report");
    o.require(a == b, "repeat run");
    o.require(a == c, "thread count");
    o.detail << " " << a.size() << " bytes; repeat " << (a == b ? "identical" : "differs") << ", 4 threads "
             << (a == c ? "identical" : "differs");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "ssmean";
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "Gaussian exact risk", exact_risk},
        {2, "Loss ordering", loss_ordering},
        {3, "Interval structure", interval_structure},
        {4, "Oracle floor", oracle_floor},
        {5, "Property suites", properties},
        {6, "ATE coverage", ate_coverage},
        {7, "Determinism", [&] { return determinism(binary); }},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " exception: " << e.what();
        }
        failed += !o.pass;
        std::printf("[%s] %d %s:%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
