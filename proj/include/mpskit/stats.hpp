#pragma once

#include <cstdint>
#include <vector>

namespace mpskit {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;         // biased (1/n) central m2
    double skewness = 0.0;         // g1 = m3 / m2^{3/2}
    double excess_kurtosis = 0.0;  // g2 = m4 / m2^2 - 3
};

Moments moments(const std::vector<double>& xs);

// D'Agostino K^2 omnibus normality test: transformed skewness (D'Agostino
// 1970) and kurtosis (Anscombe-Glynn 1983) z-scores combined against chi^2_2.
struct NormalityTest {
    double z_skewness = 0.0;
    double z_kurtosis = 0.0;
    double k2 = 0.0;
    double p_value = 1.0;
};

NormalityTest dagostino_k2(const std::vector<double>& xs);

double covariance(const std::vector<double>& xs, const std::vector<double>& ys);

// Bootstrap standard error of the empirical covariance (paired resampling).
double bootstrap_cov_se(const std::vector<double>& xs,
                        const std::vector<double>& ys, std::size_t resamples,
                        std::uint64_t seed);

double median(std::vector<double> xs);

}  // namespace mpskit
