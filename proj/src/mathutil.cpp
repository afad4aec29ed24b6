#include "scout/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "scout/error.hpp"

namespace scout::num {

double mean(std::span<const double> x) {
    if (x.empty()) return std::nan("");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.empty()) return std::nan("");
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double median(std::vector<double> x) {
    if (x.empty()) return std::nan("");
    std::sort(x.begin(), x.end());
    return quantile_sorted(x, 0.5);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0) return std::nan("");
    if (n == 1) return sorted[0];
    double h = (static_cast<double>(n) - 1.0) * p + 1.0;  // 1-based
    if (h <= 1.0) return sorted.front();
    if (h >= static_cast<double>(n)) return sorted.back();
    std::size_t lo = static_cast<std::size_t>(h);  // floor, 1-based
    double frac = h - static_cast<double>(lo);
    return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

LineFit ols_line(std::span<const double> x, std::span<const double> y) {
    LineFit fit;
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return fit;
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
    fit.defined = true;
    return fit;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return std::nan("");
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nan("");
    return sxy / std::sqrt(sxx * syy);
}

double lag1_autocorr(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double m = mean(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - m;
        den += d * d;
        if (i + 1 < n) num += d * (x[i + 1] - m);
    }
    if (den <= 0.0) return 0.0;
    return num / den;
}

namespace {

// Continued-fraction kernel for the incomplete beta function (Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double t_sf_two_sided(double t, double df) {
    if (df <= 0.0) return std::nan("");
    if (!std::isfinite(t)) return 0.0;
    return incbeta(df / 2.0, 0.5, df / (df + t * t));
}

double f_sf(double f, double d1, double d2) {
    if (d1 <= 0.0 || d2 <= 0.0) return std::nan("");
    if (f <= 0.0) return 1.0;
    return incbeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

void solve_linear(std::vector<double>& A, std::vector<double>& b) {
    const std::size_t n = b.size();
    if (A.size() != n * n) fail(Errc::internal, "solve_linear: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
        if (std::fabs(A[piv * n + col]) < 1e-300)
            fail(Errc::internal, "solve_linear: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        double inv = 1.0 / A[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri * n + c] * b[c];
        b[ri] = s / A[ri * n + ri];
    }
}

std::uint64_t Rng::next() {
    // splitmix64
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::u01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * u01();
}

double Rng::normal(double mu, double sd) {
    if (have_spare) {
        have_spare = false;
        return mu + sd * spare;
    }
    double u1 = 0.0;
    do {
        u1 = u01();
    } while (u1 <= 0.0);
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare = r * std::sin(a);
    have_spare = true;
    return mu + sd * r * std::cos(a);
}

double Rng::exponential(double mean) {
    double u = 0.0;
    do {
        u = u01();
    } while (u <= 0.0);
    return -mean * std::log(u);
}

Rng Rng::fork(std::uint64_t stream_id) const {
    Rng seeder(state ^ (0xA5A5A5A5DEADBEEFULL + stream_id * 0x9E3779B97F4A7C15ULL));
    return Rng(seeder.next());
}

}  // namespace scout::num
