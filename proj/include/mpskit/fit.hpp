#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpskit/activated.hpp"

namespace mpskit {

using TargetFn = std::function<double(const std::vector<double>&)>;

// Built-in targets on [0,1]^n: "zero", "affine" (1.2*x1 - 0.3), "sin2pi"
// (sin(2*pi*x1)), "gauss_bump", "step_smooth", "poly".
TargetFn target_by_name(const std::string& name);
std::vector<std::string> target_names();

std::vector<std::vector<double>> uniform_grid_1d(std::size_t points);

enum class GradMode { Analytic, FiniteDiff };

struct FitConfig {
    std::string target = "sin2pi";
    std::vector<std::vector<double>> grid;  // evaluation points

    std::size_t n_sites = 1;
    std::size_t chi = 1;
    std::size_t label_dim = 8;
    FeatureMap fm = FeatureMap::affine_one();
    ScaleInvariantSigmoid sigma = ScaleInvariantSigmoid::scaled_logistic(1.0);
    // Comparison path with sigma replaced by the identity (the model is then
    // linear in its parameters).
    bool identity_activation = false;

    double learning_rate = 0.1;
    std::size_t iterations = 12000;
    GradMode grad_mode = GradMode::Analytic;
    double fd_eps = 1e-5;

    std::uint64_t seed = 1;
    double init_std = 12.0;
    bool zero_init = false;
    // Single-site AffineOne models: draw slopes at init_std scale, place the
    // sigmoid transitions uniformly in [0,1] and start the out-weights at
    // zero. Dodges the flat affine plateau of small-slope Gaussian inits.
    bool kink_init = true;
};

struct FitResult {
    ActivatedMps model;
    double sup_error = 0.0;
    std::vector<double> error_curve;  // sup error per iteration
    std::vector<double> loss_curve;   // mean squared error per iteration
    bool diverged = false;
    std::size_t diverged_at = 0;
    // Largest loss[i+1]/loss[i] observed (divergence-guard diagnostic).
    double max_loss_ratio = 0.0;
};

// Plain gradient descent on all site entries and out-weights.
// Deterministic given the seed.
FitResult fit_activated_mps(const FitConfig& cfg);

// Evaluation honoring the identity-activation comparison path.
double eval_model(const ActivatedMps& model, const std::vector<double>& x,
                  bool identity_activation);

// Analytic gradient of the model output versus central finite differences on
// a random parameter subset; returns the max relative deviation. eps must be
// in [1e-8, 1e-3].
double grad_check(const ActivatedMps& model, const std::vector<double>& x,
                  double eps, bool identity_activation = false,
                  std::uint64_t seed = 7, std::size_t max_params = 64);

// Random model of the given shape (shared by fit init and tests).
ActivatedMps random_activated(std::size_t n_sites, std::size_t chi,
                              std::size_t label_dim, const FeatureMap& fm,
                              const ScaleInvariantSigmoid& sigma,
                              std::uint64_t seed, double init_std,
                              bool zero_init = false);

}  // namespace mpskit
