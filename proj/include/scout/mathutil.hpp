#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace scout::num {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // population (divides by n)
double sample_sd(std::span<const double> x);  // divides by n-1; 0 for n < 2
double median(std::vector<double> x);         // by value, sorts its copy

// Quantile by linear interpolation between order statistics at
// h = (n-1)p + 1 (1-based). `sorted` must be ascending and nonempty.
double quantile_sorted(const std::vector<double>& sorted, double p);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool defined = false;  // false when var(x) == 0
};
LineFit ols_line(std::span<const double> x, std::span<const double> y);

double pearson(std::span<const double> x, std::span<const double> y);
double lag1_autocorr(std::span<const double> x);

// Regularized incomplete beta I_x(a, b).
double incbeta(double a, double b, double x);
// Two-sided p-value of a t statistic with (possibly non-integer) df.
double t_sf_two_sided(double t, double df);
// Upper tail P(F > f) for an F statistic with d1, d2 df.
double f_sf(double f, double d1, double d2);

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// A is n x n row-major; the solution replaces b.
void solve_linear(std::vector<double>& A, std::vector<double>& b);

// Deterministic RNG (splitmix64 core). Identical seeds give identical draw
// sequences on every platform, which the trace simulator depends on.
struct Rng {
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next();
    double u01();  // [0, 1)
    double uniform(double lo, double hi);
    double normal(double mu = 0.0, double sd = 1.0);
    double exponential(double mean);

    // Independent stream derived from this seed and a stream id.
    Rng fork(std::uint64_t stream_id) const;

    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;
};

}  // namespace scout::num
