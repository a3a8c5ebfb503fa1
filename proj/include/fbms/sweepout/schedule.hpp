#pragma once

#include "fbms/core/errors.hpp"
#include "fbms/core/scalar.hpp"

#include <functional>
#include <string>

namespace fbms {

/// Parameters of the genus-g sweepout: cylinder radius r for the catenoid
/// stage, neck half-height h = t0, ribbon radius cap eps0 and the ribbon
/// radius profile eps_fn on [t0, 1).
template <typename Scalar>
struct SweepoutSchedule {
    int g = 1;
    Scalar r;
    Scalar h;
    Scalar t0;
    Scalar eps0;
    /// ribbon radius for t in [t0, 1): eps0 * ((1 - t) / (1 - t0))^eps_power
    Scalar eps_power = Scalar(1);

    int n() const { return g + 1; }

    Scalar eps_fn(const Scalar& t) const {
        using std::pow;
        const Scalar x = (Scalar(1) - t) / (Scalar(1) - t0);
        const Scalar e = eps0 * (eps_power == Scalar(1) ? x : Scalar(pow(x, eps_power)));
        const Scalar floor = eps0 * Scalar(1e-30);
        return e > floor ? e : floor;
    }

    /// sin(pi / (2g + 2)), the distance from an anchor point to the
    /// neighbouring horizontal axes
    Scalar r_bar() const {
        using std::sin;
        return sin(pi<Scalar>() / Scalar(2 * n()));
    }

    /// Throws a precondition error naming the first violated constraint.
    void validate() const {
        using std::log;
        require(g >= 1, ErrorKind::Precondition, "schedule needs g >= 1");
        require(r > Scalar(0) && r < r_bar(), ErrorKind::Precondition, "schedule needs 0 < r < sin(pi/(2g+2))");
        require(h > Scalar(0) && h < r / Scalar(5), ErrorKind::Precondition, "schedule needs 0 < h < r/5");
        require(-log(h) > Scalar(8 * n()), ErrorKind::Precondition, "schedule needs -log h > 8(g+1)");
        require(t0 == h, ErrorKind::Precondition, "schedule needs t0 = h");
        require(eps0 == t0 / Scalar(2 * n()), ErrorKind::Precondition, "schedule needs eps0 = t0/(2(g+1))");
        require(eps_power > Scalar(0), ErrorKind::Precondition, "eps profile exponent must be positive");
    }
};

/// r = 0.9 sin(pi/(2g+2)), h = min(r/10, exp(-(8(g+1)+1))), t0 = h,
/// eps0 = t0/(2(g+1)), linear eps ramp.
template <typename Scalar>
SweepoutSchedule<Scalar> default_schedule(int g) {
    using std::exp;
    require(g >= 1, ErrorKind::Precondition, "default_schedule needs g >= 1");
    SweepoutSchedule<Scalar> s;
    s.g = g;
    s.r = Scalar(0.9) * s.r_bar();
    const Scalar cap = exp(-Scalar(8 * (g + 1) + 1));
    s.h = (s.r / Scalar(10) < cap) ? Scalar(s.r / Scalar(10)) : cap;
    s.t0 = s.h;
    s.eps0 = s.t0 / Scalar(2 * (g + 1));
    s.validate();
    return s;
}

/// Applies overrides (values <= 0 mean "keep"). t0 and h are tied, so
/// overriding either sets both; eps0 follows t0.
template <typename Scalar>
SweepoutSchedule<Scalar> override_schedule(SweepoutSchedule<Scalar> s, double r, double h, double t0, double eps_power) {
    if (r > 0) s.r = Scalar(r);
    if (t0 > 0) h = t0;
    if (h > 0) {
        s.h = Scalar(h);
        s.t0 = s.h;
        s.eps0 = s.t0 / Scalar(2 * s.n());
    }
    if (eps_power > 0) s.eps_power = Scalar(eps_power);
    s.validate();
    return s;
}

}  // namespace fbms
