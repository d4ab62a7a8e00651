#include "mpskit/feature_map.hpp"

#include <cmath>

#include "mpskit/error.hpp"

namespace mpskit {

FeatureMap FeatureMap::binary_indicator() {
    return FeatureMap(FeatureKind::BinaryIndicator, 2, {});
}

FeatureMap FeatureMap::affine_one() {
    return FeatureMap(FeatureKind::AffineOne, 2, {});
}

FeatureMap FeatureMap::trig_pair() {
    return FeatureMap(FeatureKind::TrigPair, 2, {});
}

FeatureMap FeatureMap::custom(std::vector<std::vector<double>> rows) {
    if (rows.empty()) {
        throw_error(ErrorKind::InvalidArgument,
                    "custom feature map needs at least one coefficient row");
    }
    for (const auto& row : rows) {
        if (row.size() != kBasisSize) {
            throw_error(ErrorKind::InvalidArgument,
                        "custom feature map row must have " +
                            std::to_string(kBasisSize) + " coefficients");
        }
    }
    const std::size_t d = rows.size();
    return FeatureMap(FeatureKind::Custom, d, std::move(rows));
}

FeatureMap FeatureMap::one_minus_x() {
    std::vector<std::vector<double>> rows{{0.0, 1.0, 0.0, 0.0, 0.0}};
    return custom(std::move(rows));
}

FeatureMap FeatureMap::constant_one() {
    std::vector<std::vector<double>> rows{{0.0, 0.0, 1.0, 0.0, 0.0}};
    return custom(std::move(rows));
}

std::vector<double> FeatureMap::eval(double x) const {
    switch (kind_) {
        case FeatureKind::BinaryIndicator:
            return {x, 1.0 - x};
        case FeatureKind::AffineOne:
            return {x, 1.0};
        case FeatureKind::TrigPair:
            return {std::sin(x), std::cos(x)};
        case FeatureKind::Custom: {
            const double basis[kBasisSize] = {x, 1.0 - x, 1.0, std::sin(x),
                                              std::cos(x)};
            std::vector<double> out(dim_, 0.0);
            for (std::size_t r = 0; r < dim_; ++r) {
                double acc = 0.0;
                for (std::size_t b = 0; b < kBasisSize; ++b) {
                    acc += rows_[r][b] * basis[b];
                }
                out[r] = acc;
            }
            return out;
        }
    }
    throw_error(ErrorKind::InvalidArgument, "unknown feature map kind");
}

bool FeatureMap::integer_on_bits() const {
    switch (kind_) {
        case FeatureKind::BinaryIndicator:
        case FeatureKind::AffineOne:
            return true;
        case FeatureKind::TrigPair:
            return false;
        case FeatureKind::Custom:
            for (const auto& row : rows_) {
                if (row[kBasisSin] != 0.0 || row[kBasisCos] != 0.0) return false;
                for (std::size_t b = 0; b < 3; ++b) {
                    if (row[b] != std::nearbyint(row[b])) return false;
                }
            }
            return true;
    }
    return false;
}

std::vector<std::int64_t> FeatureMap::eval_bit(int bit) const {
    if (!integer_on_bits()) {
        throw_error(ErrorKind::Numeric,
                    "feature map is not integer-valued on {0,1} inputs");
    }
    switch (kind_) {
        case FeatureKind::BinaryIndicator:
            return {bit, 1 - bit};
        case FeatureKind::AffineOne:
            return {bit, 1};
        default: {
            const std::int64_t basis[3] = {bit, 1 - bit, 1};
            std::vector<std::int64_t> out(dim_, 0);
            for (std::size_t r = 0; r < dim_; ++r) {
                std::int64_t acc = 0;
                for (std::size_t b = 0; b < 3; ++b) {
                    acc += static_cast<std::int64_t>(rows_[r][b]) * basis[b];
                }
                out[r] = acc;
            }
            return out;
        }
    }
}

FeatureMap FeatureMap::as_custom() const {
    switch (kind_) {
        case FeatureKind::BinaryIndicator:
            return custom({{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}});
        case FeatureKind::AffineOne:
            return custom({{1, 0, 0, 0, 0}, {0, 0, 1, 0, 0}});
        case FeatureKind::TrigPair:
            return custom({{0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}});
        case FeatureKind::Custom:
            return *this;
    }
    throw_error(ErrorKind::InvalidArgument, "unknown feature map kind");
}

FeatureMap FeatureMap::concat(const FeatureMap& other) const {
    auto rows = as_custom().rows_;
    const auto other_rows = other.as_custom().rows_;
    rows.insert(rows.end(), other_rows.begin(), other_rows.end());
    return custom(std::move(rows));
}

bool FeatureMap::operator==(const FeatureMap& other) const {
    if (kind_ != other.kind_ || dim_ != other.dim_) return false;
    return rows_ == other.rows_;
}

std::string FeatureMap::kind_name() const {
    switch (kind_) {
        case FeatureKind::BinaryIndicator:
            return "binary_indicator";
        case FeatureKind::AffineOne:
            return "affine_one";
        case FeatureKind::TrigPair:
            return "trig_pair";
        case FeatureKind::Custom:
            return "custom";
    }
    return "unknown";
}

}  // namespace mpskit
