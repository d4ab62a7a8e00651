#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mpskit {

// Per-site map phi(x) producing a d-vector. The three named kinds cover the
// embeddings used throughout; Custom holds coefficient rows over a fixed
// primitive basis so that sums of models with different maps stay expressible
// (the concatenated map of a block sum is a Custom).
enum class FeatureKind {
    BinaryIndicator,  // [x, 1-x]
    AffineOne,        // [x, 1]
    TrigPair,         // [sin x, cos x]
    Custom,           // rows of coefficients over {x, 1-x, 1, sin x, cos x}
};

class FeatureMap {
public:
    // Primitive basis order for Custom rows.
    static constexpr std::size_t kBasisX = 0;
    static constexpr std::size_t kBasisOneMinusX = 1;
    static constexpr std::size_t kBasisOne = 2;
    static constexpr std::size_t kBasisSin = 3;
    static constexpr std::size_t kBasisCos = 4;
    static constexpr std::size_t kBasisSize = 5;

    static FeatureMap binary_indicator();
    static FeatureMap affine_one();
    static FeatureMap trig_pair();
    // Each row has kBasisSize coefficients; one output component per row.
    static FeatureMap custom(std::vector<std::vector<double>> rows);
    // d=1 map phi(x) = [1 - x]; the Not-gate embedding.
    static FeatureMap one_minus_x();
    // d=1 map phi(x) = [1]; carries constant channels.
    static FeatureMap constant_one();

    FeatureKind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

    std::vector<double> eval(double x) const;

    // True when eval at x in {0,1} is integer-valued by construction: the
    // named boolean-friendly kinds, and Customs with integer coefficients on
    // the {x, 1-x, 1} primitives only.
    bool integer_on_bits() const;
    std::vector<std::int64_t> eval_bit(int bit) const;

    // Equivalent Custom form (identity for Custom).
    FeatureMap as_custom() const;
    // Concatenated map [this; other] of dimension dim()+other.dim().
    FeatureMap concat(const FeatureMap& other) const;

    bool operator==(const FeatureMap& other) const;

    std::string kind_name() const;

private:
    FeatureMap(FeatureKind kind, std::size_t dim,
               std::vector<std::vector<double>> rows)
        : kind_(kind), dim_(dim), rows_(std::move(rows)) {}

    FeatureKind kind_;
    std::size_t dim_;
    std::vector<std::vector<double>> rows_;  // Custom only
};

}  // namespace mpskit
