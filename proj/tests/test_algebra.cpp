#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>

#include "mpskit/activated.hpp"
#include "mpskit/bool_compile.hpp"
#include "mpskit/bool_expr.hpp"
#include "mpskit/error.hpp"

#include "helpers.hpp"

using namespace mpskit;
using namespace mpskit::test;

namespace {

std::vector<std::vector<double>> probe_grid(Rng& rng, std::size_t n,
                                            std::size_t count) {
    std::vector<std::vector<double>> xs(count, std::vector<double>(n));
    for (auto& x : xs) {
        for (auto& v : x) v = rng.uniform01();
    }
    return xs;
}

// Wraps a boolean chain so that activated evaluation reproduces the gate
// exactly: slot 0 carries the gate pre-activation, slot 1 a constant zero,
// and the out-weights invert the affine map z -> (sigma(z)-sigma(0)) /
// (sigma(1)-sigma(0)) on {0,1} pre-activations.
ActivatedMps booleanized(const BooleanMps& gate,
                         const ScaleInvariantSigmoid& sigma) {
    Mps core = gate.mps;
    const std::size_t p = Mps::default_label_site(core.size());
    SiteTensor& site = core.sites[p];
    SiteTensor labelled = SiteTensor::zeros(site.left_bond, site.phys_dim,
                                            site.right_bond, 2);
    for (std::size_t s = 0; s < site.phys_dim; ++s) {
        for (std::size_t a = 0; a < site.left_bond; ++a) {
            for (std::size_t b = 0; b < site.right_bond; ++b) {
                labelled.at(0, s, a, b) = site.at(0, s, a, b);
            }
        }
    }
    site = std::move(labelled);
    core.label_site = p;
    const double s0 = sigma.value(0.0);
    const double s1 = sigma.value(1.0);
    const double inv = 1.0 / (s1 - s0);
    return ActivatedMps{std::move(core), gate.fms, sigma, {inv, -inv}};
}

}  // namespace

TEST_CASE("sigmoid family") {
    SUBCASE("limit contract at +-40") {
        const auto rs = ScaleInvariantSigmoid::reciprocal_shift(1.0);
        CHECK(std::abs(rs.value(40.0) - rs.limit_pos()) <= 1e-15);
        CHECK(std::abs(rs.value(-40.0) - rs.limit_neg()) <= 1e-15);
        const auto sl = ScaleInvariantSigmoid::scaled_logistic(1.0);
        CHECK(std::abs(sl.value(40.0) - sl.limit_pos()) <= 1e-15);
        CHECK(std::abs(sl.value(-40.0) - sl.limit_neg()) <= 1e-15);
    }
    SUBCASE("monotone approach to the limits") {
        const auto rs = ScaleInvariantSigmoid::reciprocal_shift(0.7);
        const auto sl = ScaleInvariantSigmoid::scaled_logistic(1.3);
        double prev_rs = rs.value(-50.0);
        double prev_sl = sl.value(-50.0);
        for (double z = -49.0; z <= 50.0; z += 1.0) {
            CHECK(rs.value(z) <= prev_rs);
            CHECK(sl.value(z) >= prev_sl);
            prev_rs = rs.value(z);
            prev_sl = sl.value(z);
        }
        CHECK(rs.orientation() == Orientation::Decreasing);
        CHECK(sl.orientation() == Orientation::Increasing);
        CHECK(ScaleInvariantSigmoid::scaled_logistic(-2.0).orientation() ==
              Orientation::Decreasing);
    }
    SUBCASE("saturation never produces NaN") {
        const auto rs = ScaleInvariantSigmoid::reciprocal_shift(2.0);
        CHECK(rs.value(1e308) == 0.0);
        CHECK(rs.value(-1e308) == doctest::Approx(0.5));
        CHECK(std::isfinite(rs.derivative(1e308)));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(ScaleInvariantSigmoid::reciprocal_shift(0.0), Error);
        CHECK_THROWS_AS(ScaleInvariantSigmoid::reciprocal_shift(-1.0), Error);
        CHECK_THROWS_AS(ScaleInvariantSigmoid::scaled_logistic(0.0), Error);
    }
}

TEST_CASE("eval_activated basics") {
    SUBCASE("logistic at a constant-zero core gives C/2") {
        Mps core;
        core.sites.push_back(SiteTensor::zeros(1, 2, 1));
        const ActivatedMps a = ActivatedMps::wrap(
            std::move(core), {FeatureMap::binary_indicator()},
            ScaleInvariantSigmoid::scaled_logistic(1.0), {1.0});
        CHECK(eval_activated(a, {0.3}) == doctest::Approx(0.5));
    }
    SUBCASE("reciprocal-shift saturates toward 0 for large pre-activations") {
        // One AffineOne site with a big slope: z = 1000 x.
        Mps core;
        SiteTensor site = SiteTensor::zeros(1, 2, 1);
        site.at(0, 0, 0, 0) = 1000.0;
        core.sites.push_back(std::move(site));
        const ActivatedMps a = ActivatedMps::wrap(
            std::move(core), {FeatureMap::affine_one()},
            ScaleInvariantSigmoid::reciprocal_shift(1.0), {1.0});
        CHECK(eval_activated(a, {1.0}) <= 1e-300);
        CHECK(std::isfinite(eval_activated(a, {1.0})));
        CHECK(eval_activated(a, {0.0}) == doctest::Approx(0.5));
    }
}

TEST_CASE("scale by out-weights") {
    Rng rng(101);
    const ActivatedMps a = random_activated_instance(rng, 3, 3, 2);
    const auto xs = probe_grid(rng, 3, 50);

    SUBCASE("k = 1 is the identity") {
        const ActivatedMps b = scale(a, 1.0);
        for (const auto& x : xs) {
            CHECK(eval_activated(b, x) == eval_activated(a, x));
        }
    }
    SUBCASE("k = 0 annihilates") {
        const ActivatedMps b = scale(a, 0.0);
        for (const auto& x : xs) CHECK(eval_activated(b, x) == 0.0);
    }
    SUBCASE("general k multiplies pointwise") {
        const ActivatedMps b = scale(a, -2.75);
        for (const auto& x : xs) {
            CHECK(rel_close(eval_activated(b, x), -2.75 * eval_activated(a, x),
                            1e-14));
        }
    }
}

TEST_CASE("scale_via_c agrees with out-weight scaling for k > 0") {
    Rng rng(202);
    for (int rep = 0; rep < 10; ++rep) {
        ActivatedMps a = random_activated_instance(rng, 3, 2, 2);
        const double k = 2.5;
        const ActivatedMps via_w = scale(a, k);
        const ActivatedMps via_c = scale_via_c(a, k);
        const auto xs = probe_grid(rng, 3, 100);
        for (const auto& x : xs) {
            CHECK(rel_close(eval_activated(via_w, x), eval_activated(via_c, x),
                            1e-10));
        }
    }
}

TEST_CASE("scale_via_c rejects non-positive factors") {
    Rng rng(203);
    const ActivatedMps a = random_activated_instance(rng, 2, 2, 1);
    CHECK_THROWS_AS(scale_via_c(a, 0.0), Error);
    CHECK_THROWS_AS(scale_via_c(a, -1.5), Error);
}

TEST_CASE("add: additive identity") {
    Rng rng(303);
    ActivatedMps a = random_activated_instance(rng, 3, 3, 2);
    // The zero function: zero tensors and weights in the same shape family.
    ActivatedMps zero = random_activated_instance(rng, 3, 2, 1);
    zero.sigma = a.sigma;
    for (auto& site : zero.core.sites) {
        std::fill(site.data.begin(), site.data.end(), 0.0);
    }
    zero.out_weights = {0.0};

    const ActivatedMps sum = add(a, zero);
    const auto xs = probe_grid(rng, 3, 60);
    for (const auto& x : xs) {
        CHECK(rel_close(eval_activated(sum, x), eval_activated(a, x), 1e-13));
    }
}

TEST_CASE("add: OR3 plus parity3 sums the two truth-table columns") {
    const auto sigma = ScaleInvariantSigmoid::scaled_logistic(1.0);
    const ActivatedMps or3 = booleanized(
        compile_gate(GateSpec::universal_or({false, false, false})), sigma);
    const ActivatedMps par3 =
        booleanized(compile_gate(GateSpec::parity(3)), sigma);

    for (std::uint32_t row = 0; row < 8; ++row) {
        std::vector<double> x{static_cast<double>((row >> 2) & 1),
                              static_cast<double>((row >> 1) & 1),
                              static_cast<double>(row & 1)};
        const double want_or = row != 0 ? 1.0 : 0.0;
        const double want_par = (std::popcount(row) % 2) ? 1.0 : 0.0;
        CHECK(eval_activated(or3, x) == doctest::Approx(want_or).epsilon(1e-12));
        CHECK(eval_activated(par3, x) ==
              doctest::Approx(want_par).epsilon(1e-12));
    }

    const ActivatedMps sum = add(or3, par3);
    for (std::uint32_t row = 0; row < 8; ++row) {
        std::vector<double> x{static_cast<double>((row >> 2) & 1),
                              static_cast<double>((row >> 1) & 1),
                              static_cast<double>(row & 1)};
        const double want = (row != 0 ? 1.0 : 0.0) +
                            ((std::popcount(row) % 2) ? 1.0 : 0.0);
        CHECK(eval_activated(sum, x) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("add: pointwise sum on random pairs") {
    Rng rng(404);
    for (int rep = 0; rep < 10; ++rep) {
        ActivatedMps a = random_activated_instance(rng, 4, 3, 2);
        ActivatedMps b = random_activated_instance(rng, 4, 3, 3);
        b.sigma = a.sigma;
        const ActivatedMps sum = add(a, b);
        CHECK(sum.label_dim() == a.label_dim() + b.label_dim());
        const auto xs = probe_grid(rng, 4, 200);
        for (const auto& x : xs) {
            CHECK(rel_close(eval_activated(sum, x),
                            eval_activated(a, x) + eval_activated(b, x), 1e-12));
        }
    }
}

TEST_CASE("add: block dims and exact zero blocks") {
    Rng rng(505);
    ActivatedMps a = random_activated_instance(rng, 4, 3, 2);
    ActivatedMps b = random_activated_instance(rng, 4, 2, 1);
    b.sigma = a.sigma;
    const ActivatedMps sum = add(a, b);

    const std::size_t n = 4;
    const std::size_t p = *sum.core.label_site;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& sa = a.core.sites[i];
        const auto& sb = b.core.sites[i];
        const auto& sm = sum.core.sites[i];
        CHECK(sm.phys_dim == sa.phys_dim + sb.phys_dim);
        if (i > 0) CHECK(sm.left_bond == sa.left_bond + sb.left_bond);
        if (i + 1 < n) CHECK(sm.right_bond == sa.right_bond + sb.right_bond);

        // Entries mixing the a-block with the b-block vanish exactly.
        for (std::size_t l = 0; l < sm.label_slots(); ++l) {
            for (std::size_t s = 0; s < sm.phys_dim; ++s) {
                for (std::size_t aa = 0; aa < sm.left_bond; ++aa) {
                    for (std::size_t bb = 0; bb < sm.right_bond; ++bb) {
                        const bool phys_a = s < sa.phys_dim;
                        const bool left_a = i == 0 || aa < sa.left_bond;
                        const bool right_a = i + 1 == n || bb < sa.right_bond;
                        const bool label_a = i != p || l < sa.label_slots();
                        const bool pure_a = phys_a && left_a && right_a && label_a;
                        const bool pure_b = !phys_a && (i == 0 || !left_a) &&
                                            (i + 1 == n || !right_a) &&
                                            (i != p || !label_a);
                        if (!pure_a && !pure_b) {
                            CHECK(sm.at(l, s, aa, bb) == 0.0);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("add: precondition errors") {
    Rng rng(606);
    ActivatedMps a = random_activated_instance(rng, 3, 2, 2);
    ActivatedMps b3 = random_activated_instance(rng, 4, 2, 2);
    b3.sigma = a.sigma;
    CHECK_THROWS_AS(add(a, b3), Error);

    ActivatedMps c = random_activated_instance(rng, 3, 2, 2);
    c.sigma = a.sigma.form() == SigmoidForm::ReciprocalShift
                  ? ScaleInvariantSigmoid::scaled_logistic(1.0)
                  : ScaleInvariantSigmoid::reciprocal_shift(1.0);
    try {
        add(a, c);
        FAIL("expected incompatible-activation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Incompatible);
    }
}

TEST_CASE("add_shared_kernel") {
    Rng rng(707);
    RandomMps ra = random_mps(rng, 4, 3, 2, Boundary::Open, false);
    RandomMps rb = random_mps(rng, 4, 2, 2, Boundary::Open, false);
    const auto sigma = ScaleInvariantSigmoid::scaled_logistic(1.5);
    ActivatedMps a{ra.mps, ra.fms, sigma, {0.7, -0.4}};
    ActivatedMps b{rb.mps, rb.fms, sigma, {1.1, 0.3}};

    SUBCASE("doubling") {
        const ActivatedMps twice = add_shared_kernel(a, a);
        const auto xs = probe_grid(rng, 4, 50);
        for (const auto& x : xs) {
            CHECK(rel_close(eval_activated(twice, x), 2.0 * eval_activated(a, x),
                            1e-12));
        }
    }
    SUBCASE("matches the general add pointwise") {
        const ActivatedMps lean = add_shared_kernel(a, b);
        const ActivatedMps full = add(a, b);
        const auto xs = probe_grid(rng, 4, 200);
        for (const auto& x : xs) {
            CHECK(rel_close(eval_activated(lean, x), eval_activated(full, x),
                            1e-12));
        }
    }
    SUBCASE("bonds add, phys dims stay") {
        const ActivatedMps lean = add_shared_kernel(a, b);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(lean.core.sites[i].phys_dim == a.core.sites[i].phys_dim);
            if (i > 0) {
                CHECK(lean.core.sites[i].left_bond ==
                      a.core.sites[i].left_bond + b.core.sites[i].left_bond);
            }
        }
    }
    SUBCASE("feature-map mismatch is rejected") {
        ActivatedMps c = b;
        c.fms[0] = FeatureMap::trig_pair();
        CHECK_THROWS_AS(add_shared_kernel(a, c), Error);
    }
}

TEST_CASE("vector-space laws on sampled grids") {
    Rng rng(808);
    ActivatedMps a = random_activated_instance(rng, 3, 2, 2);
    ActivatedMps b = random_activated_instance(rng, 3, 3, 1);
    ActivatedMps c = random_activated_instance(rng, 3, 2, 2);
    b.sigma = a.sigma;
    c.sigma = a.sigma;
    const auto xs = probe_grid(rng, 3, 40);
    const double k = -1.7;

    const ActivatedMps ab = add(a, b);
    const ActivatedMps ba = add(b, a);
    const ActivatedMps ab_c = add(ab, c);
    const ActivatedMps a_bc = add(a, add(b, c));
    const ActivatedMps k_ab = scale(ab, k);
    const ActivatedMps ka_kb = add(scale(a, k), scale(b, k));

    for (const auto& x : xs) {
        CHECK(rel_close(eval_activated(ab, x), eval_activated(ba, x), 1e-10));
        CHECK(rel_close(eval_activated(ab_c, x), eval_activated(a_bc, x), 1e-10));
        CHECK(rel_close(eval_activated(k_ab, x), eval_activated(ka_kb, x), 1e-10));
    }
}

TEST_CASE("add handles periodic chains by direct-summing every bond") {
    Rng rng(909);
    RandomMps ra = random_mps(rng, 3, 2, 2, Boundary::Periodic, false);
    RandomMps rb = random_mps(rng, 3, 3, 1, Boundary::Periodic, false);
    const auto sigma = ScaleInvariantSigmoid::reciprocal_shift(1.0);
    const ActivatedMps a{ra.mps, ra.fms, sigma, {0.4, -0.9}};
    const ActivatedMps b{rb.mps, rb.fms, sigma, {1.2}};
    const ActivatedMps sum = add(a, b);
    CHECK(sum.core.boundary == Boundary::Periodic);
    CHECK(sum.core.sites[0].left_bond ==
          a.core.sites[0].left_bond + b.core.sites[0].left_bond);
    for (int rep = 0; rep < 60; ++rep) {
        std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        CHECK(rel_close(eval_activated(sum, x),
                        eval_activated(a, x) + eval_activated(b, x), 1e-12));
    }
}
