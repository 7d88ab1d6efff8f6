#include "core/mcd.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace railenv {

namespace {

struct MeanCov {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // h-1 divisor, so h = n matches the classical estimator
};

MeanCov mean_cov(const std::vector<Eigen::VectorXd>& points, const std::vector<int>& subset) {
    const auto d = points[0].size();
    MeanCov mc;
    mc.mean = Eigen::VectorXd::Zero(d);
    for (int i : subset) mc.mean += points[static_cast<size_t>(i)];
    mc.mean /= static_cast<double>(subset.size());
    mc.cov = Eigen::MatrixXd::Zero(d, d);
    for (int i : subset) {
        const Eigen::VectorXd dev = points[static_cast<size_t>(i)] - mc.mean;
        mc.cov += dev * dev.transpose();
    }
    if (subset.size() > 1) mc.cov /= static_cast<double>(subset.size() - 1);
    return mc;
}

void check_inputs(const std::vector<Eigen::VectorXd>& points, size_t h) {
    if (points.empty()) throw_input("MCD requires data");
    const auto d = static_cast<size_t>(points[0].size());
    const size_t n = points.size();
    const size_t h_min = (n + d + 2) / 2;  // ceil((n + d + 1) / 2)
    if (h < h_min || h > n)
        throw_input("MCD subset size h=" + std::to_string(h) + " outside [" +
                    std::to_string(h_min) + ", " + std::to_string(n) + "]");
}

}  // namespace

double mcd_consistency_factor(double fraction, size_t d) {
    if (fraction >= 1.0) return 1.0;
    boost::math::chi_squared chi_d(static_cast<double>(d));
    boost::math::chi_squared chi_d2(static_cast<double>(d) + 2.0);
    const double q = boost::math::quantile(chi_d, fraction);
    return fraction / boost::math::cdf(chi_d2, q);
}

double mcd_consistency_factor(size_t h, size_t n, size_t d) {
    if (h == n) return 1.0;
    return mcd_consistency_factor(static_cast<double>(h) / static_cast<double>(n), d);
}

namespace {

/// One-step reweighting: classical moments of the points within the 0.975
/// chi-square cutoff of the corrected raw estimate, times the fixed-coverage
/// consistency factor. Falls back to the raw estimate when degenerate.
void apply_reweighting(const std::vector<Eigen::VectorXd>& points, McdResult& result) {
    const auto d = static_cast<size_t>(result.location.size());
    const size_t n = points.size();
    result.reweight_count = result.h;
    if (result.h == n) {
        result.reweight_count = n;
        return;
    }
    boost::math::chi_squared chi_d(static_cast<double>(d));
    const double cutoff = boost::math::quantile(chi_d, mcd_reweight_coverage);

    Eigen::FullPivLU<Eigen::MatrixXd> lu(result.scatter);
    if (!lu.isInvertible()) return;
    const Eigen::MatrixXd inv = lu.inverse();

    std::vector<int> kept;
    for (size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd dev = points[i] - result.location;
        if (dev.dot(inv * dev) <= cutoff) kept.push_back(static_cast<int>(i));
    }
    if (kept.size() <= d + 1) return;

    const MeanCov mc = mean_cov(points, kept);
    const double factor = mcd_consistency_factor(mcd_reweight_coverage, d);
    const Eigen::MatrixXd scatter = mc.cov * factor;
    if (!(scatter.determinant() > 0.0) || !std::isfinite(scatter.determinant())) return;
    result.location = mc.mean;
    result.scatter = scatter;
    result.reweight_factor = factor;
    result.reweight_count = kept.size();
}

}  // namespace

McdResult mcd_exact(const std::vector<Eigen::VectorXd>& points, size_t h) {
    const size_t n = points.size();
    if (n > 20) throw_input("mcd_exact is guarded to n <= 20 (got n=" + std::to_string(n) + ")");
    check_inputs(points, h);
    const auto d = static_cast<size_t>(points[0].size());

    std::vector<int> subset(h);
    std::iota(subset.begin(), subset.end(), 0);

    double best_det = std::numeric_limits<double>::infinity();
    MeanCov best_mc;
    std::vector<int> best_subset;

    for (;;) {
        const MeanCov mc = mean_cov(points, subset);
        const double det = mc.cov.determinant();
        if (det < best_det) {
            best_det = det;
            best_mc = mc;
            best_subset = subset;
        }
        // Next combination in lexicographic order.
        int i = static_cast<int>(h) - 1;
        while (i >= 0 && subset[static_cast<size_t>(i)] ==
                             static_cast<int>(n - h) + i)
            --i;
        if (i < 0) break;
        ++subset[static_cast<size_t>(i)];
        for (size_t j = static_cast<size_t>(i) + 1; j < h; ++j)
            subset[j] = subset[j - 1] + 1;
    }

    if (!(best_det > 0.0) || !std::isfinite(best_det))
        throw_numeric("mcd_exact: best subset has a degenerate covariance");

    McdResult result;
    result.location = best_mc.mean;
    result.h = h;
    result.raw_determinant = best_det;
    result.consistency_factor = mcd_consistency_factor(h, n, d);
    result.scatter = best_mc.cov * result.consistency_factor;
    result.support.assign(n, false);
    for (int i : best_subset) result.support[static_cast<size_t>(i)] = true;
    apply_reweighting(points, result);
    return result;
}

namespace {

struct Candidate {
    MeanCov mc;
    double det = std::numeric_limits<double>::infinity();
    std::vector<int> subset;
};

/// One concentration step: keep the h points with smallest Mahalanobis
/// distance under (mean, cov), then re-estimate. Determinant never increases.
bool c_step(const std::vector<Eigen::VectorXd>& points, size_t h, Candidate& cand) {
    const size_t n = points.size();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cand.mc.cov);
    if (!lu.isInvertible()) return false;
    const Eigen::MatrixXd inv = lu.inverse();

    std::vector<std::pair<double, int>> dist(n);
    for (size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd dev = points[i] - cand.mc.mean;
        dist[i] = {dev.dot(inv * dev), static_cast<int>(i)};
    }
    std::sort(dist.begin(), dist.end());  // ties resolved by index

    std::vector<int> subset(h);
    for (size_t i = 0; i < h; ++i) subset[i] = dist[i].second;
    std::sort(subset.begin(), subset.end());

    const MeanCov mc = mean_cov(points, subset);
    const double det = mc.cov.determinant();
    if (!(det <= cand.det * (1.0 + 1e-9)))
        throw_numeric("C-step increased the determinant");  // violates the C-step theorem
    const bool improved = det < cand.det * (1.0 - 1e-12);
    cand.mc = mc;
    cand.det = det;
    cand.subset = std::move(subset);
    return improved;
}

}  // namespace

McdResult fast_mcd(const std::vector<Eigen::VectorXd>& points, size_t h, uint64_t seed,
                   const FastMcdParams& params) {
    const size_t n = points.size();
    check_inputs(points, h);
    const auto d = static_cast<size_t>(points[0].size());
    if (n <= d) throw_input("fast_mcd needs n > d");

    if (h == n) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        const MeanCov mc = mean_cov(points, all);
        McdResult result;
        result.location = mc.mean;
        result.scatter = mc.cov;
        result.h = h;
        result.raw_determinant = mc.cov.determinant();
        result.consistency_factor = 1.0;
        result.reweight_count = n;
        result.support.assign(n, true);
        return result;
    }

    Rng rng(derive_seed(seed, /*stream=*/0x3cd));
    std::vector<Candidate> candidates;
    size_t degenerate_starts = 0;

    for (size_t start = 0; start < params.n_starts; ++start) {
        // Random (d+1)-subset, extended while its covariance is singular.
        std::vector<int> subset;
        std::vector<bool> used(n, false);
        auto add_random = [&] {
            for (;;) {
                const size_t i = static_cast<size_t>(rng.next_below(n));
                if (!used[i]) {
                    used[i] = true;
                    subset.push_back(static_cast<int>(i));
                    return;
                }
            }
        };
        for (size_t i = 0; i < d + 1; ++i) add_random();

        Candidate cand;
        bool ok = false;
        while (true) {
            cand.mc = mean_cov(points, subset);
            const double det = cand.mc.cov.determinant();
            if (det > 0.0 && std::isfinite(det)) {
                ok = true;
                break;
            }
            if (subset.size() == n) break;
            add_random();
        }
        if (!ok) {
            ++degenerate_starts;
            continue;
        }
        cand.det = std::numeric_limits<double>::infinity();
        bool alive = true;
        const size_t initial_steps = std::max<size_t>(1, params.c_steps);
        for (size_t step = 0; step < initial_steps && alive; ++step) alive = c_step(points, h, cand);
        if (std::isfinite(cand.det)) candidates.push_back(std::move(cand));
    }
    if (candidates.empty())
        throw_numeric("fast_mcd: all " + std::to_string(degenerate_starts) +
                      " starts were degenerate");

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.det < b.det; });
    if (candidates.size() > params.keep_best) candidates.resize(params.keep_best);

    // Refine the shortlist to convergence.
    Candidate best = candidates.front();
    bool have_best = false;
    for (auto& cand : candidates) {
        for (size_t step = 0; step < params.max_refine_steps; ++step) {
            if (!c_step(points, h, cand)) break;
        }
        if (!have_best || cand.det < best.det) {
            best = cand;
            have_best = true;
        }
    }

    if (!(best.det > 0.0))
        throw_numeric("fast_mcd: converged to a degenerate covariance");

    McdResult result;
    result.location = best.mc.mean;
    result.h = h;
    result.raw_determinant = best.det;
    result.consistency_factor = mcd_consistency_factor(h, n, d);
    result.scatter = best.mc.cov * result.consistency_factor;
    result.support.assign(n, false);
    for (int i : best.subset) result.support[static_cast<size_t>(i)] = true;
    apply_reweighting(points, result);
    return result;
}

McdResult fast_mcd_1d(const std::vector<double>& values, size_t h, uint64_t seed,
                      const FastMcdParams& params) {
    std::vector<Eigen::VectorXd> points(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        points[i] = Eigen::VectorXd::Constant(1, values[i]);
    }
    return fast_mcd(points, h, seed, params);
}

}  // namespace railenv
