#pragma once

#include <functional>

namespace qrecur::detail {

struct RichardsonResult {
    double value;
    double last_change;  // |T[n][n] - T[n-1][n-1]|
};

// Central-difference derivative (order 1 or 2) of f at x0 with starting step h,
// refined by a Richardson tableau of the given depth (steps h, h/2, h/4, ...).
// Throws NumericalQualityError when the last two diagonal entries differ by
// more than max(rel_tol * |value|, abs_floor).
RichardsonResult richardson_derivative(const std::function<double(double)>& f, double x0, double h,
                                       int order, int levels, double rel_tol, double abs_floor);

}  // namespace qrecur::detail
