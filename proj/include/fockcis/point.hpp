// point.hpp — log-polar representation of a point of the plane.

#pragma once

#include "fockcis/numerics.hpp"

namespace fockcis {

// z = e^t e^{i theta}. The origin is t = -inf.
struct LogPoint {
    double t = kNegInf;
    double theta = 0.0;

    static LogPoint from_log(double t, double theta) {
        return {t, normalize_angle(theta)};
    }
    static LogPoint origin() { return {kNegInf, 0.0}; }
    bool is_origin() const { return t == kNegInf; }
};

}  // namespace fockcis
