#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpskit/feature_map.hpp"
#include "mpskit/stats.hpp"

namespace mpskit {

enum class GpWiden { Label, Phys };
enum class GpDist { Normal, Uniform };

// Random-MPS width experiment. Per sample one random model of the given
// width is drawn and its normalized label-summed output is evaluated on the
// fixed dataset; per-point moments across samples diagnose the Gaussian
// limit.
//
// Label widening draws one independent chain per label slot (the label leg
// indexes the hidden units of the equivalent network, and the units must be
// i.i.d. for the CLT to bite), summed with 1/sqrt(D) out-weights. Phys
// widening grows one site's kernel leg over a frozen environment with a
// seed-fixed random-cosine basis.
struct GpExperimentConfig {
    std::vector<std::size_t> widths{8, 64, 512, 2048};
    std::size_t n_sites = 5;
    std::size_t chi = 2;
    FeatureMap fm = FeatureMap::trig_pair();
    std::vector<std::vector<double>> dataset;  // <= 16 points, n_sites each
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    double init_std = 1.0;
    GpWiden widen = GpWiden::Label;
    GpDist dist = GpDist::Normal;
    // Freeze every non-widened tensor to seed-fixed constants (always on for
    // phys widening; optional for label widening).
    bool freeze_env = false;

    static std::vector<std::vector<double>> default_dataset(std::size_t n_sites,
                                                            std::size_t points);
};

struct GpWidthReport {
    std::size_t width = 0;
    std::vector<Moments> point_moments;        // one per dataset point
    std::vector<NormalityTest> normality;      // one per dataset point
    double median_abs_excess_kurtosis = 0.0;
    std::vector<double> covariance;            // row-major P x P
    std::vector<double> covariance_se;         // bootstrap SE, row-major P x P
};

struct GpReport {
    std::vector<GpWidthReport> widths;
    std::vector<std::string> warnings;
};

GpReport run_gp_experiment(const GpExperimentConfig& cfg);

// Raw output samples for one width (n_samples rows, one column per dataset
// point, row-major); the building block of run_gp_experiment, exposed for
// replication studies.
std::vector<double> gp_output_samples(const GpExperimentConfig& cfg,
                                      std::size_t width);

}  // namespace mpskit
