#include "mpskit/sigmoid.hpp"

#include <cmath>

#include "mpskit/error.hpp"

namespace mpskit {

ScaleInvariantSigmoid ScaleInvariantSigmoid::reciprocal_shift(double c) {
    if (!(c > 0.0)) {
        throw_error(ErrorKind::InvalidArgument,
                    "reciprocal-shift sigmoid requires C > 0");
    }
    return {SigmoidForm::ReciprocalShift, c, Orientation::Decreasing};
}

ScaleInvariantSigmoid ScaleInvariantSigmoid::scaled_logistic(double c) {
    if (c == 0.0 || !std::isfinite(c)) {
        throw_error(ErrorKind::InvalidArgument,
                    "scaled-logistic sigmoid requires nonzero finite C");
    }
    return {SigmoidForm::ScaledLogistic, c,
            c > 0.0 ? Orientation::Increasing : Orientation::Decreasing};
}

double ScaleInvariantSigmoid::value(double z) const {
    switch (form_) {
        case SigmoidForm::ReciprocalShift:
            if (z > kClampZ) return 0.0;
            if (z < -kClampZ) return 1.0 / c_;
            return 1.0 / (c_ + std::exp(z));
        case SigmoidForm::ScaledLogistic:
            if (z > kClampZ) return c_;
            if (z < -kClampZ) return 0.0;
            return c_ / (1.0 + std::exp(-z));
    }
    return 0.0;
}

double ScaleInvariantSigmoid::derivative(double z) const {
    if (z > kClampZ || z < -kClampZ) return 0.0;
    switch (form_) {
        case SigmoidForm::ReciprocalShift: {
            const double e = std::exp(z);
            const double denom = c_ + e;
            return -e / (denom * denom);
        }
        case SigmoidForm::ScaledLogistic: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return c_ * s * (1.0 - s);
        }
    }
    return 0.0;
}

double ScaleInvariantSigmoid::limit_neg() const {
    return form_ == SigmoidForm::ReciprocalShift ? 1.0 / c_ : 0.0;
}

double ScaleInvariantSigmoid::limit_pos() const {
    return form_ == SigmoidForm::ReciprocalShift ? 0.0 : c_;
}

std::string ScaleInvariantSigmoid::form_name() const {
    return form_ == SigmoidForm::ReciprocalShift ? "reciprocal_shift"
                                                 : "scaled_logistic";
}

}  // namespace mpskit
