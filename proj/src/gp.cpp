#include "mpskit/gp.hpp"

#include <cmath>
#include <set>
#include <string>

#include "mpskit/error.hpp"
#include "mpskit/mps.hpp"
#include "mpskit/parallel.hpp"
#include "mpskit/rng.hpp"

namespace mpskit {

namespace {

constexpr double kPi = 3.14159265358979323846;

double draw_entry(Rng& rng, GpDist dist, double std) {
    if (dist == GpDist::Normal) return std * rng.gaussian();
    // Uniform with matching variance: U(-a, a), a = std * sqrt(3).
    const double a = std * std::sqrt(3.0);
    return rng.uniform(-a, a);
}

struct ChainShape {
    std::size_t n = 0;
    std::size_t chi = 0;
    std::size_t d = 0;

    std::size_t site_entries(std::size_t i) const {
        const std::size_t l = i == 0 ? 1 : chi;
        const std::size_t r = i + 1 == n ? 1 : chi;
        return d * l * r;
    }
};

constexpr std::size_t kChainBuf = 32;
constexpr std::size_t kMaxPoints = 16;

// Evaluates one open chain (entries laid out site by site, each site
// row-major over (s, a, b)) on every dataset point at once. phis_t holds the
// transposed features, per site and phys component a contiguous row of P
// point values, so the innermost loops run over points and vectorize.
// Adds the P results into out.
void eval_chain_all_points(const ChainShape& shape, const double* entries,
                           const std::vector<double>& phis_t, std::size_t points,
                           double* out) {
    const std::size_t chi = shape.chi;
    const std::size_t d = shape.d;
    double buf_a[kChainBuf * kMaxPoints];
    double buf_b[kChainBuf * kMaxPoints];
    double coef[kMaxPoints];
    double* v = buf_a;  // [bond][point]
    double* w = buf_b;

    const double* site = entries;
    {
        const std::size_t r = shape.n == 1 ? 1 : chi;
        for (std::size_t b = 0; b < r * points; ++b) v[b] = 0.0;
        const double* phi = phis_t.data();  // site 0 block
        for (std::size_t s = 0; s < d; ++s) {
            const double* f = phi + s * points;
            for (std::size_t b = 0; b < r; ++b) {
                const double e = site[s * r + b];
                double* dst = v + b * points;
                for (std::size_t pt = 0; pt < points; ++pt) dst[pt] += e * f[pt];
            }
        }
        site += shape.site_entries(0);
    }
    for (std::size_t i = 1; i < shape.n; ++i) {
        const std::size_t r = i + 1 == shape.n ? 1 : chi;
        const double* phi = phis_t.data() + i * d * points;
        for (std::size_t b = 0; b < r * points; ++b) w[b] = 0.0;
        for (std::size_t s = 0; s < d; ++s) {
            const double* f = phi + s * points;
            for (std::size_t a = 0; a < chi; ++a) {
                const double* va = v + a * points;
                for (std::size_t pt = 0; pt < points; ++pt) {
                    coef[pt] = f[pt] * va[pt];
                }
                const double* row = site + (s * chi + a) * r;
                for (std::size_t b = 0; b < r; ++b) {
                    const double e = row[b];
                    double* dst = w + b * points;
                    for (std::size_t pt = 0; pt < points; ++pt) {
                        dst[pt] += e * coef[pt];
                    }
                }
            }
        }
        std::swap(v, w);
        site += shape.site_entries(i);
    }
    for (std::size_t pt = 0; pt < points; ++pt) out[pt] += v[pt];
}

}  // namespace

std::vector<std::vector<double>> GpExperimentConfig::default_dataset(
    std::size_t n_sites, std::size_t points) {
    // Low-discrepancy spread over the unit cube.
    static const double gammas[] = {0.4142135623730951, 0.7320508075688772,
                                    0.2360679774997896, 0.6457513110645906,
                                    0.3166247903553998, 0.6055512754639893};
    std::vector<std::vector<double>> xs(points, std::vector<double>(n_sites));
    for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t i = 0; i < n_sites; ++i) {
            const double g = gammas[i % 6];
            double v = (static_cast<double>(j) + 1.0) * g;
            xs[j][i] = v - std::floor(v);
        }
    }
    return xs;
}

std::vector<double> gp_output_samples(const GpExperimentConfig& cfg,
                                      std::size_t width) {
    if (cfg.dataset.empty() || cfg.dataset.size() > 16) {
        throw_error(ErrorKind::InvalidArgument,
                    "dataset must hold 1..16 points");
    }
    if (cfg.n_sites == 0 || cfg.chi == 0 || width == 0) {
        throw_error(ErrorKind::InvalidArgument, "degenerate experiment shape");
    }
    if (cfg.chi > kChainBuf) {
        throw_error(ErrorKind::SizeGuard,
                    "experiment bond dimension is limited to " +
                        std::to_string(kChainBuf));
    }
    for (const auto& x : cfg.dataset) {
        if (x.size() != cfg.n_sites) {
            throw_error(ErrorKind::Shape, "dataset point length != n_sites");
        }
    }

    const std::size_t points = cfg.dataset.size();
    const std::size_t n = cfg.n_sites;
    const std::size_t d = cfg.fm.dim();
    const std::size_t p = Mps::default_label_site(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(width));

    // Feature vectors, one per (point, site).
    std::vector<std::vector<double>> phis(points * n);
    for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            phis[j * n + i] = cfg.fm.eval(cfg.dataset[j][i]);
        }
    }

    std::vector<double> samples(cfg.n_samples * points, 0.0);
    const std::uint64_t stream_base = static_cast<std::uint64_t>(width) << 40;

    if (cfg.widen == GpWiden::Label && !cfg.freeze_env) {
        // One independent chain per label slot.
        const ChainShape shape{n, cfg.chi, d};
        std::size_t total = 0;
        for (std::size_t i = 0; i < n; ++i) total += shape.site_entries(i);

        // Transposed features: [site][phys][point], rows contiguous in points.
        std::vector<double> phis_t(n * d * points);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t j = 0; j < points; ++j) {
                    phis_t[(i * d + s) * points + j] = phis[j * n + i][s];
                }
            }
        }

        parallel_for(cfg.n_samples, [&](std::size_t sample) {
            Rng rng = substream(cfg.seed, stream_base | sample);
            std::vector<double> entries(total);
            double* row = samples.data() + sample * points;
            for (std::size_t l = 0; l < width; ++l) {
                for (auto& e : entries) e = draw_entry(rng, cfg.dist, cfg.init_std);
                eval_chain_all_points(shape, entries.data(), phis_t, points, row);
            }
            for (std::size_t j = 0; j < points; ++j) row[j] *= norm;
        });
        return samples;
    }

    // Frozen environment around the widened site: left/right boundary
    // vectors are deterministic per point, only the widened slices are drawn
    // per sample.
    Rng env_rng = substream(cfg.seed, 0xE9Bull);
    const std::size_t chi_l = (p == 0) ? 1 : cfg.chi;
    const std::size_t chi_r = (p + 1 == n) ? 1 : cfg.chi;

    // Environment tensors (all sites but p) drawn once.
    std::vector<std::vector<double>> env(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == p) continue;
        const std::size_t l = i == 0 ? 1 : cfg.chi;
        const std::size_t r = i + 1 == n ? 1 : cfg.chi;
        env[i].resize(d * l * r);
        for (auto& e : env[i]) e = draw_entry(env_rng, cfg.dist, cfg.init_std);
    }

    // Per point: left row vector into p, right column vector out of p.
    std::vector<std::vector<double>> lvec(points), rvec(points);
    for (std::size_t j = 0; j < points; ++j) {
        std::vector<double> v{1.0};
        for (std::size_t i = 0; i < p; ++i) {
            const std::size_t l = i == 0 ? 1 : cfg.chi;
            const std::size_t r = cfg.chi;
            const auto& phi = phis[j * n + i];
            std::vector<double> next(r, 0.0);
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t a = 0; a < l; ++a) {
                    const double va = v[a] * phi[s];
                    for (std::size_t b = 0; b < r; ++b) {
                        next[b] += va * env[i][(s * l + a) * r + b];
                    }
                }
            }
            v = std::move(next);
        }
        lvec[j] = v;
        v = {1.0};
        for (std::size_t i = n; i-- > p + 1;) {
            const std::size_t l = cfg.chi;
            const std::size_t r = i + 1 == n ? 1 : cfg.chi;
            const auto& phi = phis[j * n + i];
            std::vector<double> next(l, 0.0);
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t a = 0; a < l; ++a) {
                    double acc = 0.0;
                    for (std::size_t b = 0; b < r; ++b) {
                        acc += env[i][(s * l + a) * r + b] * v[b];
                    }
                    next[a] += phi[s] * acc;
                }
            }
            v = std::move(next);
        }
        rvec[j] = v;
    }

    if (cfg.widen == GpWiden::Label) {
        // coef[j][s*chi_l*chi_r + a*chi_r + b] = phi_p[s] * L[a] * R[b]
        const std::size_t slice = d * chi_l * chi_r;
        std::vector<std::vector<double>> coef(points,
                                              std::vector<double>(slice, 0.0));
        for (std::size_t j = 0; j < points; ++j) {
            const auto& phi = phis[j * n + p];
            for (std::size_t s = 0; s < d; ++s) {
                for (std::size_t a = 0; a < chi_l; ++a) {
                    for (std::size_t b = 0; b < chi_r; ++b) {
                        coef[j][(s * chi_l + a) * chi_r + b] =
                            phi[s] * lvec[j][a] * rvec[j][b];
                    }
                }
            }
        }
        parallel_for(cfg.n_samples, [&](std::size_t sample) {
            Rng rng = substream(cfg.seed, stream_base | sample);
            std::vector<double> entries(slice);
            double* row = samples.data() + sample * points;
            for (std::size_t l = 0; l < width; ++l) {
                for (auto& e : entries) e = draw_entry(rng, cfg.dist, cfg.init_std);
                for (std::size_t j = 0; j < points; ++j) {
                    double z = 0.0;
                    for (std::size_t k = 0; k < slice; ++k) {
                        z += coef[j][k] * entries[k];
                    }
                    row[j] += z;
                }
            }
            for (std::size_t j = 0; j < points; ++j) row[j] *= norm;
        });
        return samples;
    }

    // Phys widening: the widened leg gets a seed-fixed random-cosine basis
    // phi_s(t) = cos(omega_s t + b_s); one chi_l x chi_r slice per basis
    // function is drawn each sample.
    Rng basis_rng = substream(cfg.seed, 0xFEA7ull);
    std::vector<double> omega(width), phase(width);
    for (std::size_t s = 0; s < width; ++s) {
        omega[s] = 2.0 * kPi * basis_rng.gaussian();
        phase[s] = basis_rng.uniform(0.0, 2.0 * kPi);
    }
    // cosphi[j][s]
    std::vector<std::vector<double>> cosphi(points, std::vector<double>(width));
    for (std::size_t j = 0; j < points; ++j) {
        const double t = cfg.dataset[j][p];
        for (std::size_t s = 0; s < width; ++s) {
            cosphi[j][s] = std::cos(omega[s] * t + phase[s]);
        }
    }
    // bilinear[j][a*chi_r+b] = L[a] R[b]
    const std::size_t bl = chi_l * chi_r;
    std::vector<std::vector<double>> bilinear(points, std::vector<double>(bl));
    for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t a = 0; a < chi_l; ++a) {
            for (std::size_t b = 0; b < chi_r; ++b) {
                bilinear[j][a * chi_r + b] = lvec[j][a] * rvec[j][b];
            }
        }
    }
    parallel_for(cfg.n_samples, [&](std::size_t sample) {
        Rng rng = substream(cfg.seed, stream_base | sample);
        std::vector<double> slice(bl);
        double* row = samples.data() + sample * points;
        for (std::size_t s = 0; s < width; ++s) {
            for (auto& e : slice) e = draw_entry(rng, cfg.dist, cfg.init_std);
            for (std::size_t j = 0; j < points; ++j) {
                double lar = 0.0;
                for (std::size_t k = 0; k < bl; ++k) lar += bilinear[j][k] * slice[k];
                row[j] += cosphi[j][s] * lar;
            }
        }
        for (std::size_t j = 0; j < points; ++j) row[j] *= norm;
    });
    return samples;
}

GpReport run_gp_experiment(const GpExperimentConfig& cfg) {
    if (cfg.widths.empty()) {
        throw_error(ErrorKind::InvalidArgument, "no widths given");
    }
    for (std::size_t i = 0; i + 1 < cfg.widths.size(); ++i) {
        if (cfg.widths[i] >= cfg.widths[i + 1]) {
            throw_error(ErrorKind::InvalidArgument, "widths must be ascending");
        }
    }
    if (cfg.n_samples < 500) {
        throw_error(ErrorKind::InvalidArgument, "n_samples must be >= 500");
    }

    GpReport report;
    {
        std::set<std::vector<double>> unique(cfg.dataset.begin(),
                                             cfg.dataset.end());
        if (unique.size() != cfg.dataset.size()) {
            report.warnings.push_back("dataset contains duplicate points");
        }
    }

    const std::size_t points = cfg.dataset.size();
    for (std::size_t wi = 0; wi < cfg.widths.size(); ++wi) {
        const std::size_t width = cfg.widths[wi];
        const auto samples = gp_output_samples(cfg, width);

        GpWidthReport wr;
        wr.width = width;
        std::vector<std::vector<double>> cols(points,
                                              std::vector<double>(cfg.n_samples));
        for (std::size_t s = 0; s < cfg.n_samples; ++s) {
            for (std::size_t j = 0; j < points; ++j) {
                cols[j][s] = samples[s * points + j];
            }
        }
        std::vector<double> abs_kurt;
        for (std::size_t j = 0; j < points; ++j) {
            wr.point_moments.push_back(moments(cols[j]));
            wr.normality.push_back(dagostino_k2(cols[j]));
            abs_kurt.push_back(std::abs(wr.point_moments.back().excess_kurtosis));
        }
        wr.median_abs_excess_kurtosis = median(abs_kurt);
        wr.covariance.assign(points * points, 0.0);
        wr.covariance_se.assign(points * points, 0.0);
        for (std::size_t a = 0; a < points; ++a) {
            for (std::size_t b = a; b < points; ++b) {
                const double c = covariance(cols[a], cols[b]);
                const double se = bootstrap_cov_se(
                    cols[a], cols[b], 200,
                    cfg.seed ^ (0xB007ull + width * 131 + a * 17 + b));
                wr.covariance[a * points + b] = wr.covariance[b * points + a] = c;
                wr.covariance_se[a * points + b] =
                    wr.covariance_se[b * points + a] = se;
            }
        }
        report.widths.push_back(std::move(wr));
    }
    return report;
}

}  // namespace mpskit
