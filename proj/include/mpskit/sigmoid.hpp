#pragma once

#include <string>

namespace mpskit {

enum class SigmoidForm {
    ReciprocalShift,  // 1 / (C + e^z), C > 0
    ScaledLogistic,   // C / (1 + e^{-z}), C != 0
};

enum class Orientation { Increasing, Decreasing };

// Sigmoid family closed under real scaling via reparameterization of C.
// ReciprocalShift runs from 1/C down to 0 (orientation Decreasing);
// ScaledLogistic runs from 0 to C.
class ScaleInvariantSigmoid {
public:
    // exp is clamped at |z| <= kClampZ; beyond that the limit value is
    // returned, so evaluation never overflows to inf or NaN.
    static constexpr double kClampZ = 700.0;

    static ScaleInvariantSigmoid reciprocal_shift(double c);
    static ScaleInvariantSigmoid scaled_logistic(double c);

    SigmoidForm form() const { return form_; }
    double c() const { return c_; }
    Orientation orientation() const { return orientation_; }

    double value(double z) const;
    double derivative(double z) const;
    double limit_neg() const;  // z -> -inf
    double limit_pos() const;  // z -> +inf

    bool operator==(const ScaleInvariantSigmoid& other) const = default;

    std::string form_name() const;

private:
    ScaleInvariantSigmoid(SigmoidForm form, double c, Orientation o)
        : form_(form), c_(c), orientation_(o) {}

    SigmoidForm form_;
    double c_;
    Orientation orientation_;
};

}  // namespace mpskit
