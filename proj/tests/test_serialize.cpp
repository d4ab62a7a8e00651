#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "mpskit/bool_compile.hpp"
#include "mpskit/bool_expr.hpp"
#include "mpskit/error.hpp"
#include "mpskit/fit.hpp"
#include "mpskit/flatten.hpp"
#include "mpskit/serialize.hpp"

#include "helpers.hpp"

using namespace mpskit;
using namespace mpskit::test;

TEST_CASE("MPS documents round-trip bit-exactly") {
    SUBCASE("integer-valued compiled chain") {
        const auto e = parse_expr("X1|X2|X3");
        const BooleanMps compiled = compile(to_dnf(table_from_expr(*e, 3)), 3);
        const std::string doc = save_mps(compiled.mps, compiled.fms);
        const LoadedMps loaded = load_mps(doc);
        REQUIRE(loaded.mps.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(loaded.mps.sites[i].data == compiled.mps.sites[i].data);
            CHECK(loaded.fms[i] == compiled.fms[i]);
        }
        CHECK(save_mps(loaded.mps, loaded.fms) == doc);
        CHECK(verify_against_table(BooleanMps{loaded.mps, loaded.fms},
                                   table_from_expr(*e, 3))
                  .ok);
    }
    SUBCASE("random real-valued chain round-trips exactly") {
        Rng rng(3);
        RandomMps rm = random_mps(rng, 4, 3, 2, Boundary::Periodic);
        const LoadedMps loaded = load_mps(save_mps(rm.mps, rm.fms));
        CHECK(loaded.mps.boundary == Boundary::Periodic);
        REQUIRE(loaded.mps.label_site.has_value());
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(loaded.mps.sites[i].data == rm.mps.sites[i].data);
            CHECK(loaded.fms[i] == rm.fms[i]);
        }
    }
}

TEST_CASE("activated documents carry sigma and out-weights") {
    Rng rng(5);
    const ActivatedMps a = random_activated_instance(rng, 3, 2, 2);
    const ActivatedMps b = load_activated(save_activated(a));
    CHECK(b.sigma == a.sigma);
    CHECK(b.out_weights == a.out_weights);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(b.core.sites[i].data == a.core.sites[i].data);
    }
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        CHECK(eval_activated(a, x) == eval_activated(b, x));
    }
}

TEST_CASE("orientation mismatch in a sigma document is rejected") {
    Rng rng(6);
    const ActivatedMps a = random_activated_instance(rng, 2, 2, 1);
    std::string doc = save_activated(a);
    const bool increasing =
        doc.find("\"orientation\": \"increasing\"") != std::string::npos;
    const std::string from = increasing ? "\"increasing\"" : "\"decreasing\"";
    const std::string to = increasing ? "\"decreasing\"" : "\"increasing\"";
    doc.replace(doc.find(from), from.size(), to);
    CHECK_THROWS_AS(load_activated(doc), Error);
}

TEST_CASE("flat documents list weights and the kernel descriptor") {
    const BooleanMps parity = compile_gate(GateSpec::parity(3));
    const FlatNetwork flat = flatten(parity.mps, parity.fms);
    const std::string doc = save_flat(flat, true);
    const auto j = nlohmann::json::parse(doc);
    CHECK(j["format"] == "mpskit-flat");
    CHECK(j["flat_dim"] == 8);
    CHECK(j["weights"].size() == 8);
    CHECK(j["kernel"].size() == 8);
    CHECK(j["kernel"][0] == nlohmann::json::array({0, 0, 0}));
    CHECK(j["monomials"].size() == 8);
}

TEST_CASE("truth table files") {
    SUBCASE("bits format round-trips") {
        const auto e = parse_expr("(X1 & X2) | !X3");
        const TruthTable t = table_from_expr(*e, 3);
        CHECK(load_table(save_table(t)) == t);
    }
    SUBCASE("rows may arrive in any order") {
        const std::string doc = "n=2\n11 1\n00 0\n10 1\n01 0\n";
        const TruthTable t = load_table(doc);
        CHECK(t.at(0) == false);
        CHECK(t.at(1) == false);
        CHECK(t.at(2) == true);
        CHECK(t.at(3) == true);
    }
    SUBCASE("hex format") {
        // Rows 0..7 of the 3-input OR: 0111 1111 -> 0x7F.
        const TruthTable t = load_table("n=3\nhex=7f\n");
        for (std::uint32_t row = 0; row < 8; ++row) {
            CHECK(t.at(row) == (row != 0));
        }
    }
    SUBCASE("parse errors") {
        CHECK_THROWS_AS(load_table("m=3\n"), Error);
        CHECK_THROWS_AS(load_table("n=0\n"), Error);
        CHECK_THROWS_AS(load_table("n=2\n00 1\n00 0\n01 1\n10 0\n"), Error);
        CHECK_THROWS_AS(load_table("n=2\n00 1\n"), Error);
        CHECK_THROWS_AS(load_table("n=2\nhex=fff\n"), Error);
        CHECK_THROWS_AS(load_table("n=2\n00 2\n01 0\n10 0\n11 0\n"), Error);
    }
}

TEST_CASE("config files") {
    const auto kv = parse_config(
        "# comment\n"
        "widths = 8, 64 ,512\n"
        "\n"
        "n_samples=1000   # trailing comment\n");
    CHECK(kv.at("widths") == "8, 64 ,512");
    CHECK(kv.at("n_samples") == "1000");
    CHECK(split_list(kv.at("widths")) ==
          std::vector<std::string>{"8", "64", "512"});
    CHECK_THROWS_AS(parse_config("just a line\n"), Error);
}

TEST_CASE("format confusion is reported") {
    Rng rng(8);
    RandomMps rm = random_mps(rng, 2, 2);
    const std::string doc = save_mps(rm.mps, rm.fms);
    CHECK_THROWS_AS(load_activated(doc), Error);
    CHECK_THROWS_AS(load_mps("{\"format\":\"other\"}"), Error);
    CHECK_THROWS_AS(load_mps("not json"), Error);

    // A plain MPS wraps into an activated model on request.
    const ActivatedMps wrapped = load_activated_or_wrap(
        doc, ScaleInvariantSigmoid::scaled_logistic(1.0));
    CHECK(wrapped.label_dim() == 1);
}
