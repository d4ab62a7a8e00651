#include "mpskit/fit.hpp"

#include <cmath>
#include <string>

#include "mpskit/error.hpp"
#include "mpskit/rng.hpp"

namespace mpskit {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TargetFn target_by_name(const std::string& name) {
    if (name == "zero") {
        return [](const std::vector<double>&) { return 0.0; };
    }
    if (name == "affine") {
        return [](const std::vector<double>& x) { return 1.2 * x[0] - 0.3; };
    }
    if (name == "sin2pi") {
        return [](const std::vector<double>& x) {
            return std::sin(2.0 * kPi * x[0]);
        };
    }
    if (name == "gauss_bump") {
        return [](const std::vector<double>& x) {
            const double t = (x[0] - 0.5) / 0.15;
            return std::exp(-0.5 * t * t);
        };
    }
    if (name == "step_smooth") {
        return [](const std::vector<double>& x) {
            return 1.0 / (1.0 + std::exp(-20.0 * (x[0] - 0.5)));
        };
    }
    if (name == "poly") {
        return [](const std::vector<double>& x) {
            return x[0] * x[0] * x[0] - 0.5 * x[0] + 0.2;
        };
    }
    throw_error(ErrorKind::InvalidArgument, "unknown target '" + name + "'");
}

std::vector<std::string> target_names() {
    return {"zero", "affine", "sin2pi", "gauss_bump", "step_smooth", "poly"};
}

std::vector<std::vector<double>> uniform_grid_1d(std::size_t points) {
    if (points < 2) {
        throw_error(ErrorKind::InvalidArgument, "grid needs at least 2 points");
    }
    std::vector<std::vector<double>> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = {static_cast<double>(i) / static_cast<double>(points - 1)};
    }
    return grid;
}

ActivatedMps random_activated(std::size_t n_sites, std::size_t chi,
                              std::size_t label_dim, const FeatureMap& fm,
                              const ScaleInvariantSigmoid& sigma,
                              std::uint64_t seed, double init_std,
                              bool zero_init) {
    if (n_sites == 0 || chi == 0 || label_dim == 0) {
        throw_error(ErrorKind::InvalidArgument, "degenerate model shape");
    }
    Rng rng(seed);
    const std::size_t p = Mps::default_label_site(n_sites);
    Mps core;
    core.boundary = Boundary::Open;
    core.label_site = p;
    for (std::size_t i = 0; i < n_sites; ++i) {
        const std::size_t l = i == 0 ? 1 : chi;
        const std::size_t r = i + 1 == n_sites ? 1 : chi;
        SiteTensor site = SiteTensor::zeros(l, fm.dim(), r, i == p ? label_dim : 0);
        if (!zero_init) {
            for (auto& e : site.data) e = init_std * rng.gaussian();
        }
        core.sites.push_back(std::move(site));
    }
    std::vector<double> w(label_dim, 0.0);
    if (!zero_init) {
        const double wstd = 1.0 / std::sqrt(static_cast<double>(label_dim));
        for (auto& e : w) e = wstd * rng.gaussian();
    }
    return ActivatedMps{std::move(core), std::vector<FeatureMap>(n_sites, fm),
                        sigma, std::move(w)};
}

namespace {

// Per-input workspace: site matrices, boundary sweeps, pre-activations and
// the output gradient. Open-boundary models only (which is what the harness
// builds).
struct EvalWork {
    std::vector<std::vector<double>> site_mats;  // per site, label slot 0
    std::vector<std::vector<double>> phis;
    std::vector<std::vector<double>> left;   // left[i]: row vector entering site i
    std::vector<std::vector<double>> right;  // right[i]: column vector leaving site i
    std::vector<double> z;                   // per label slot
};

void forward(const ActivatedMps& model, const std::vector<double>& x,
             EvalWork& work) {
    if (model.core.boundary != Boundary::Open) {
        throw_error(ErrorKind::InvalidArgument,
                    "fit machinery handles open-boundary models");
    }
    const std::size_t n = model.core.size();
    const std::size_t p = *model.core.label_site;
    const std::size_t out_dim = model.core.output_dim();

    work.site_mats.assign(n, {});
    work.phis.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        work.phis[i] = model.fms[i].eval(x[i]);
        const auto& site = model.core.sites[i];
        std::vector<double> m(site.left_bond * site.right_bond, 0.0);
        if (i != p) {
            for (std::size_t s = 0; s < site.phys_dim; ++s) {
                const double f = work.phis[i][s];
                const double* slice =
                    site.data.data() + (s * site.left_bond) * site.right_bond;
                for (std::size_t ab = 0; ab < m.size(); ++ab) m[ab] += f * slice[ab];
            }
        }
        work.site_mats[i] = std::move(m);
    }

    work.left.assign(n + 1, {});
    work.left[0] = {1.0};
    for (std::size_t i = 0; i < p; ++i) {
        const auto& site = model.core.sites[i];
        std::vector<double> next(site.right_bond, 0.0);
        for (std::size_t a = 0; a < site.left_bond; ++a) {
            const double va = work.left[i][a];
            for (std::size_t b = 0; b < site.right_bond; ++b) {
                next[b] += va * work.site_mats[i][a * site.right_bond + b];
            }
        }
        work.left[i + 1] = std::move(next);
    }
    work.right.assign(n + 1, {});
    work.right[n] = {1.0};
    for (std::size_t i = n; i-- > p + 1;) {
        const auto& site = model.core.sites[i];
        std::vector<double> next(site.left_bond, 0.0);
        for (std::size_t a = 0; a < site.left_bond; ++a) {
            double acc = 0.0;
            for (std::size_t b = 0; b < site.right_bond; ++b) {
                acc += work.site_mats[i][a * site.right_bond + b] *
                       work.right[i + 1][b];
            }
            next[a] = acc;
        }
        work.right[i] = std::move(next);
    }

    // Pre-activations through the label site.
    const auto& pivot = model.core.sites[p];
    work.z.assign(out_dim, 0.0);
    for (std::size_t l = 0; l < out_dim; ++l) {
        double z = 0.0;
        for (std::size_t s = 0; s < pivot.phys_dim; ++s) {
            const double f = work.phis[p][s];
            if (f == 0.0) continue;
            for (std::size_t a = 0; a < pivot.left_bond; ++a) {
                const double la = work.left[p][a] * f;
                if (la == 0.0) continue;
                for (std::size_t b = 0; b < pivot.right_bond; ++b) {
                    z += la * pivot.at(l, s, a, b) * work.right[p + 1][b];
                }
            }
        }
        work.z[l] = z;
    }
}

double model_value(const ActivatedMps& model, const EvalWork& work,
                   bool identity) {
    double out = 0.0;
    for (std::size_t l = 0; l < work.z.size(); ++l) {
        const double h = identity ? work.z[l] : model.sigma.value(work.z[l]);
        out += model.out_weights[l] * h;
    }
    return out;
}

std::size_t param_count(const ActivatedMps& model) {
    std::size_t total = 0;
    for (const auto& site : model.core.sites) total += site.data.size();
    return total + model.out_weights.size();
}

// Gradient of the scalar output with respect to every parameter, flattened
// site by site with the out-weights last. Scaled by `factor`, accumulated
// into grad.
void accumulate_output_gradient(const ActivatedMps& model, const EvalWork& work,
                                bool identity, double factor,
                                std::vector<double>& grad) {
    const std::size_t n = model.core.size();
    const std::size_t p = *model.core.label_site;
    const std::size_t out_dim = model.core.output_dim();
    const auto& pivot = model.core.sites[p];

    // coeff_l = factor * W_l * sigma'(z_l); label-summed pivot matrix Mbar.
    std::vector<double> coeff(out_dim, 0.0);
    for (std::size_t l = 0; l < out_dim; ++l) {
        const double slope = identity ? 1.0 : model.sigma.derivative(work.z[l]);
        coeff[l] = factor * model.out_weights[l] * slope;
    }
    std::vector<double> mbar(pivot.left_bond * pivot.right_bond, 0.0);
    for (std::size_t l = 0; l < out_dim; ++l) {
        if (coeff[l] == 0.0) continue;
        for (std::size_t s = 0; s < pivot.phys_dim; ++s) {
            const double f = work.phis[p][s];
            if (f == 0.0) continue;
            for (std::size_t a = 0; a < pivot.left_bond; ++a) {
                for (std::size_t b = 0; b < pivot.right_bond; ++b) {
                    mbar[a * pivot.right_bond + b] +=
                        coeff[l] * f * pivot.at(l, s, a, b);
                }
            }
        }
    }

    // Weighted right environments for sites left of the pivot.
    std::vector<std::vector<double>> rbar(p + 1);
    if (p > 0) {
        std::vector<double> cur(pivot.left_bond, 0.0);
        for (std::size_t a = 0; a < pivot.left_bond; ++a) {
            double acc = 0.0;
            for (std::size_t b = 0; b < pivot.right_bond; ++b) {
                acc += mbar[a * pivot.right_bond + b] * work.right[p + 1][b];
            }
            cur[a] = acc;
        }
        rbar[p] = cur;
        for (std::size_t i = p; i-- > 1;) {
            const auto& site = model.core.sites[i];
            std::vector<double> next(site.left_bond, 0.0);
            for (std::size_t a = 0; a < site.left_bond; ++a) {
                double acc = 0.0;
                for (std::size_t b = 0; b < site.right_bond; ++b) {
                    acc += work.site_mats[i][a * site.right_bond + b] *
                           rbar[i + 1][b];
                }
                next[a] = acc;
            }
            rbar[i] = std::move(next);
        }
    }
    // Weighted left environments for sites right of the pivot.
    std::vector<std::vector<double>> lbar(n + 1);
    if (p + 1 < n) {
        std::vector<double> cur(pivot.right_bond, 0.0);
        for (std::size_t b = 0; b < pivot.right_bond; ++b) {
            double acc = 0.0;
            for (std::size_t a = 0; a < pivot.left_bond; ++a) {
                acc += work.left[p][a] * mbar[a * pivot.right_bond + b];
            }
            cur[b] = acc;
        }
        lbar[p + 1] = cur;
        for (std::size_t i = p + 1; i + 1 < n; ++i) {
            const auto& site = model.core.sites[i];
            std::vector<double> next(site.right_bond, 0.0);
            for (std::size_t b = 0; b < site.right_bond; ++b) {
                double acc = 0.0;
                for (std::size_t a = 0; a < site.left_bond; ++a) {
                    acc += lbar[i][a] * work.site_mats[i][a * site.right_bond + b];
                }
                next[b] = acc;
            }
            lbar[i + 1] = std::move(next);
        }
    }

    std::size_t offset = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& site = model.core.sites[i];
        if (i < p) {
            for (std::size_t s = 0; s < site.phys_dim; ++s) {
                const double f = work.phis[i][s];
                for (std::size_t a = 0; a < site.left_bond; ++a) {
                    const double la = work.left[i][a] * f;
                    for (std::size_t b = 0; b < site.right_bond; ++b) {
                        grad[offset + (s * site.left_bond + a) * site.right_bond +
                             b] += la * rbar[i + 1][b];
                    }
                }
            }
        } else if (i > p) {
            for (std::size_t s = 0; s < site.phys_dim; ++s) {
                const double f = work.phis[i][s];
                for (std::size_t a = 0; a < site.left_bond; ++a) {
                    const double la = lbar[i][a] * f;
                    for (std::size_t b = 0; b < site.right_bond; ++b) {
                        grad[offset + (s * site.left_bond + a) * site.right_bond +
                             b] += la * work.right[i + 1][b];
                    }
                }
            }
        } else {
            for (std::size_t l = 0; l < out_dim; ++l) {
                if (coeff[l] == 0.0) continue;
                for (std::size_t s = 0; s < site.phys_dim; ++s) {
                    const double f = work.phis[i][s] * coeff[l];
                    for (std::size_t a = 0; a < site.left_bond; ++a) {
                        const double la = work.left[p][a] * f;
                        for (std::size_t b = 0; b < site.right_bond; ++b) {
                            grad[offset +
                                 ((l * site.phys_dim + s) * site.left_bond + a) *
                                     site.right_bond +
                                 b] += la * work.right[p + 1][b];
                        }
                    }
                }
            }
        }
        offset += site.data.size();
    }
    for (std::size_t l = 0; l < out_dim; ++l) {
        const double h = identity ? work.z[l] : model.sigma.value(work.z[l]);
        grad[offset + l] += factor * h;
    }
}

double& param_ref(ActivatedMps& model, std::size_t index) {
    for (auto& site : model.core.sites) {
        if (index < site.data.size()) return site.data[index];
        index -= site.data.size();
    }
    return model.out_weights[index];
}

}  // namespace

double eval_model(const ActivatedMps& model, const std::vector<double>& x,
                  bool identity_activation) {
    EvalWork work;
    forward(model, x, work);
    return model_value(model, work, identity_activation);
}

double grad_check(const ActivatedMps& model, const std::vector<double>& x,
                  double eps, bool identity_activation, std::uint64_t seed,
                  std::size_t max_params) {
    if (!(eps >= 1e-8 && eps <= 1e-3)) {
        throw_error(ErrorKind::InvalidArgument, "eps must lie in [1e-8, 1e-3]");
    }
    model.validate();

    EvalWork work;
    forward(model, x, work);
    std::vector<double> grad(param_count(model), 0.0);
    accumulate_output_gradient(model, work, identity_activation, 1.0, grad);

    Rng rng(seed);
    const std::size_t total = grad.size();
    const std::size_t checks = std::min(max_params, total);
    ActivatedMps probe = model;

    double worst = 0.0;
    for (std::size_t c = 0; c < checks; ++c) {
        const std::size_t idx =
            checks == total ? c : static_cast<std::size_t>(rng.below(total));
        double& slot = param_ref(probe, idx);
        const double saved = slot;
        slot = saved + eps;
        const double up = eval_model(probe, x, identity_activation);
        slot = saved - eps;
        const double down = eval_model(probe, x, identity_activation);
        slot = saved;
        const double fd = (up - down) / (2.0 * eps);
        const double denom = std::max({std::abs(grad[idx]), std::abs(fd), 1e-3});
        worst = std::max(worst, std::abs(grad[idx] - fd) / denom);
    }
    return worst;
}

FitResult fit_activated_mps(const FitConfig& cfg) {
    if (cfg.grid.empty()) {
        throw_error(ErrorKind::InvalidArgument, "fit grid must be nonempty");
    }
    if (cfg.iterations < 1) {
        throw_error(ErrorKind::InvalidArgument, "iterations must be >= 1");
    }
    const TargetFn target = target_by_name(cfg.target);
    for (const auto& x : cfg.grid) {
        if (x.size() != cfg.n_sites) {
            throw_error(ErrorKind::Shape, "grid point length != n_sites");
        }
    }

    FitResult result;
    const bool use_kinks = cfg.kink_init && !cfg.zero_init && cfg.n_sites == 1 &&
                           cfg.fm.kind() == FeatureKind::AffineOne;
    if (use_kinks) {
        result.model = random_activated(1, 1, cfg.label_dim, cfg.fm, cfg.sigma,
                                        cfg.seed, 0.0, true);
        Rng rng(cfg.seed);
        SiteTensor& site = result.model.core.sites[0];
        for (std::size_t l = 0; l < cfg.label_dim; ++l) {
            const double slope = cfg.init_std * rng.gaussian();
            site.at(l, 0, 0, 0) = slope;                          // a_l
            site.at(l, 1, 0, 0) = -slope * rng.uniform01();       // b_l
        }
    } else {
        result.model = random_activated(cfg.n_sites, cfg.chi, cfg.label_dim,
                                        cfg.fm, cfg.sigma, cfg.seed,
                                        cfg.init_std, cfg.zero_init);
    }
    ActivatedMps& model = result.model;

    const std::size_t g = cfg.grid.size();
    std::vector<double> targets(g);
    for (std::size_t i = 0; i < g; ++i) targets[i] = target(cfg.grid[i]);

    const std::size_t params = param_count(model);
    std::vector<double> grad(params, 0.0);
    EvalWork work;

    auto eval_metrics = [&](double& loss, double& sup) {
        long double acc = 0.0L;
        sup = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            const double r =
                eval_model(model, cfg.grid[i], cfg.identity_activation) -
                targets[i];
            acc += static_cast<long double>(r) * r;
            sup = std::max(sup, std::abs(r));
        }
        loss = static_cast<double>(acc / g);
    };

    double prev_loss = 0.0;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        long double acc = 0.0L;
        double sup = 0.0;
        for (std::size_t i = 0; i < g; ++i) {
            if (cfg.grad_mode == GradMode::Analytic) {
                forward(model, cfg.grid[i], work);
                const double r =
                    model_value(model, work, cfg.identity_activation) -
                    targets[i];
                acc += static_cast<long double>(r) * r;
                sup = std::max(sup, std::abs(r));
                accumulate_output_gradient(model, work, cfg.identity_activation,
                                           2.0 * r / static_cast<double>(g),
                                           grad);
            } else {
                const double r =
                    eval_model(model, cfg.grid[i], cfg.identity_activation) -
                    targets[i];
                acc += static_cast<long double>(r) * r;
                sup = std::max(sup, std::abs(r));
            }
        }
        if (cfg.grad_mode == GradMode::FiniteDiff) {
            // Central differences on the full loss, one parameter at a time.
            for (std::size_t idx = 0; idx < params; ++idx) {
                double& slot = param_ref(model, idx);
                const double saved = slot;
                auto loss_at = [&](double v) {
                    slot = v;
                    long double a2 = 0.0L;
                    for (std::size_t i = 0; i < g; ++i) {
                        const double r =
                            eval_model(model, cfg.grid[i],
                                       cfg.identity_activation) -
                            targets[i];
                        a2 += static_cast<long double>(r) * r;
                    }
                    return static_cast<double>(a2 / g);
                };
                const double up = loss_at(saved + cfg.fd_eps);
                const double down = loss_at(saved - cfg.fd_eps);
                slot = saved;
                grad[idx] = (up - down) / (2.0 * cfg.fd_eps);
            }
        }
        const double loss = static_cast<double>(acc / g);
        result.loss_curve.push_back(loss);
        result.error_curve.push_back(sup);
        if (!std::isfinite(loss)) {
            result.diverged = true;
            result.diverged_at = it;
            result.sup_error = sup;
            return result;
        }
        if (it > 0 && prev_loss > 0.0) {
            result.max_loss_ratio = std::max(result.max_loss_ratio, loss / prev_loss);
        }
        prev_loss = loss;

        std::size_t offset = 0;
        for (auto& site : model.core.sites) {
            for (auto& e : site.data) e -= cfg.learning_rate * grad[offset++];
        }
        for (auto& w : model.out_weights) w -= cfg.learning_rate * grad[offset++];
    }

    double final_loss = 0.0, final_sup = 0.0;
    eval_metrics(final_loss, final_sup);
    result.loss_curve.push_back(final_loss);
    result.error_curve.push_back(final_sup);
    result.sup_error = final_sup;
    if (!std::isfinite(final_loss)) {
        result.diverged = true;
        result.diverged_at = cfg.iterations;
    } else if (prev_loss > 0.0) {
        result.max_loss_ratio = std::max(result.max_loss_ratio, final_loss / prev_loss);
    }
    return result;
}

}  // namespace mpskit
