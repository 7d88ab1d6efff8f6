#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace railenv {

/// Minimum Covariance Determinant estimate. raw_determinant and support
/// describe the best h-subset; location/scatter are the one-step reweighted
/// estimates (0.975 chi-square cutoff against the consistency-corrected raw
/// scatter), which keeps the estimator consistent at the normal model while
/// actual outliers stay excluded. With h = n everything reduces exactly to
/// the classical mean/covariance.
struct McdResult {
    Eigen::VectorXd location;
    Eigen::MatrixXd scatter;
    size_t h = 0;
    double raw_determinant = 0.0;
    double consistency_factor = 1.0;   // applied to the raw subset covariance
    double reweight_factor = 1.0;      // fixed-coverage factor of the reweight step
    size_t reweight_count = 0;         // points kept by the reweight cutoff
    std::vector<bool> support;         // best subset, |support| = h
};

/// c(fraction) = fraction / P(chi2_{d+2} < q) with q the `fraction` quantile
/// of chi2_d; equals 1 at fraction 1.
double mcd_consistency_factor(double fraction, size_t d);
double mcd_consistency_factor(size_t h, size_t n, size_t d);

inline constexpr double mcd_reweight_coverage = 0.975;

/// Exhaustive MCD over all C(n, h) subsets. Guarded to n <= 20; this is the
/// oracle the fast algorithm is validated against.
McdResult mcd_exact(const std::vector<Eigen::VectorXd>& points, size_t h);

struct FastMcdParams {
    size_t n_starts = 500;
    size_t c_steps = 2;       // concentration steps per initial subset
    size_t keep_best = 10;    // candidates refined to convergence
    size_t max_refine_steps = 100;
};

/// FastMCD: seeded random (d+1)-element subsets, each concentrated for
/// c_steps; the best candidates are then iterated to a determinant fixed
/// point. Every C-step is determinant non-increasing.
McdResult fast_mcd(const std::vector<Eigen::VectorXd>& points, size_t h, uint64_t seed,
                   const FastMcdParams& params = {});

/// Convenience for scalar samples.
McdResult fast_mcd_1d(const std::vector<double>& values, size_t h, uint64_t seed,
                      const FastMcdParams& params = {});

}  // namespace railenv
