#include "mpskit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpskit/error.hpp"
#include "mpskit/rng.hpp"

namespace mpskit {

Moments moments(const std::vector<double>& xs) {
    if (xs.size() < 2) {
        throw_error(ErrorKind::InvalidArgument, "moments need at least 2 samples");
    }
    const double n = static_cast<double>(xs.size());
    long double mean = 0.0L;
    for (double v : xs) mean += v;
    mean /= n;
    long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
    for (double v : xs) {
        const long double d = v - mean;
        const long double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    Moments out;
    out.mean = static_cast<double>(mean);
    out.variance = static_cast<double>(m2);
    if (m2 > 0.0L) {
        out.skewness = static_cast<double>(m3 / std::pow(m2, 1.5L));
        out.excess_kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);
    }
    return out;
}

NormalityTest dagostino_k2(const std::vector<double>& xs) {
    if (xs.size() < 20) {
        throw_error(ErrorKind::InvalidArgument,
                    "K^2 test needs at least 20 samples");
    }
    const double n = static_cast<double>(xs.size());
    const Moments m = moments(xs);

    // Skewness transform (D'Agostino 1970).
    const double g1 = m.skewness;
    const double y = g1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(std::log(std::sqrt(w2)));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    const double z1 = delta * std::asinh(y / alpha);

    // Kurtosis transform (Anscombe-Glynn 1983).
    const double b2 = m.excess_kurtosis + 3.0;
    const double eb2 = 3.0 * (n - 1.0) / (n + 1.0);
    const double vb2 = 24.0 * n * (n - 2.0) * (n - 3.0) /
                       ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double xstd = (b2 - eb2) / std::sqrt(vb2);
    const double sqrt_beta1 =
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
        std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sqrt_beta1 *
                               (2.0 / sqrt_beta1 +
                                std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double inner = (1.0 - 2.0 / a) / (1.0 + xstd * std::sqrt(2.0 / (a - 4.0)));
    const double z2 =
        ((1.0 - 2.0 / (9.0 * a)) - std::cbrt(inner)) / std::sqrt(2.0 / (9.0 * a));

    NormalityTest t;
    t.z_skewness = z1;
    t.z_kurtosis = z2;
    t.k2 = z1 * z1 + z2 * z2;
    t.p_value = std::exp(-t.k2 / 2.0);  // chi^2_2 survival function
    return t;
}

double covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw_error(ErrorKind::InvalidArgument,
                    "covariance needs equal-length samples (>= 2)");
    }
    const double n = static_cast<double>(xs.size());
    long double mx = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    long double acc = 0.0L;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        acc += (xs[i] - mx) * (ys[i] - my);
    }
    return static_cast<double>(acc / n);
}

double bootstrap_cov_se(const std::vector<double>& xs,
                        const std::vector<double>& ys, std::size_t resamples,
                        std::uint64_t seed) {
    if (resamples < 2) {
        throw_error(ErrorKind::InvalidArgument, "need at least 2 resamples");
    }
    Rng rng(seed);
    const std::size_t n = xs.size();
    std::vector<double> rx(n), ry(n), covs;
    covs.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = static_cast<std::size_t>(rng.below(n));
            rx[i] = xs[j];
            ry[i] = ys[j];
        }
        covs.push_back(covariance(rx, ry));
    }
    const Moments m = moments(covs);
    // Unbiased-ish spread of the bootstrap distribution.
    return std::sqrt(m.variance * static_cast<double>(resamples) /
                     static_cast<double>(resamples - 1));
}

double median(std::vector<double> xs) {
    if (xs.empty()) {
        throw_error(ErrorKind::InvalidArgument, "median of empty sample");
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace mpskit
