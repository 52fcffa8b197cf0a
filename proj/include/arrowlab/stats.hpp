#pragma once

#include <vector>

namespace arrowlab::stats {

double mean(const std::vector<double>& xs);
double population_variance(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Ordinary least squares of y on x. Requires >= 3 points for the stderr.
LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

/// CDF of Student's t with nu degrees of freedom (regularized incomplete
/// beta), and its quantile by bisection.
double student_t_cdf(double t, int nu);
double student_t_quantile(double p, int nu);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_value = 1.0;  // two-sided
};

/// Welch's two-sample t-test (unequal variances).
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace arrowlab::stats
