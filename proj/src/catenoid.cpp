#include "fbms/catenoid/catenoid.hpp"

#include "fbms/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace fbms {

namespace {

// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign, run to machine precision.
template <typename Fn>
double bisect(Fn&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace

double tangency_parameter() {
    static const double t0 = bisect([](double t) { return std::cosh(t) - t * std::sinh(t); }, 1.0, 2.0);
    return t0;
}

CatenoidFamily CatenoidFamily::make(double r, double h) {
    require(r > 0 && h > 0, ErrorKind::Domain, "catenoid family needs r > 0 and h > 0");
    CatenoidFamily fam;
    fam.r = r;
    fam.h = h;
    if (h < r / std::sinh(tangency_parameter())) {
        try {
            const auto [a, b] = solve_balance(r, h);
            fam.s1 = a;
            fam.s2 = b;
        } catch (const Error&) {
            // numerically tangent: leave the roots empty
        }
    }
    return fam;
}

bool CatenoidFamily::maximality_hypotheses() const { return h > 0 && 2.0 * h < r * std::tanh(1.0); }

double profile(const CatenoidFamily& fam, double s, double z) {
    require(std::abs(z) <= fam.h * (1 + 1e-15), ErrorKind::Domain, "profile needs |z| <= h");
    require(s >= 0, ErrorKind::Domain, "profile needs s >= 0");
    if (s == 0) return fam.r;
    if (std::isinf(s)) return std::abs(z) >= fam.h ? fam.r : 0.0;
    // cosh(sz)/cosh(sh) without overflow for large s
    const double a = s * std::abs(z), b = s * fam.h;
    return fam.r * std::exp(a - b) * (1 + std::exp(-2 * a)) / (1 + std::exp(-2 * b));
}

int curvature_sign(const CatenoidFamily& fam, double s, double tol) {
    if (std::isinf(s)) return -1;
    const double v = fam.r * s - std::cosh(s * fam.h);
    if (std::abs(v) <= tol * std::max(1.0, fam.r * s)) return 0;
    return v > 0 ? 1 : -1;
}

std::pair<double, double> solve_balance(double r, double h) {
    require(r > 0 && h > 0, ErrorKind::Domain, "solve_balance needs r > 0 and h > 0");
    const double threshold = r / std::sinh(tangency_parameter());
    require(h < threshold, ErrorKind::NoRoots,
            "h = " + std::to_string(h) + " >= r / sinh(t0) = " + std::to_string(threshold) + ": no two roots");
    const auto f = [r, h](double s) { return r * s - std::cosh(s * h); };
    // f is concave with f(0) = -1 and its maximum where sinh(s h) = r / h
    const double s_peak = std::asinh(r / h) / h;
    require(f(s_peak) > 0, ErrorKind::NoRoots, "balance equation has a tangent double root");
    double hi = 2.0 * s_peak;
    while (f(hi) >= 0) hi *= 2.0;
    const double s1 = bisect(f, 0.0, s_peak);
    const double s2 = bisect(f, s_peak, hi);
    return {s1, s2};
}

double area(const CatenoidFamily& fam, double s) {
    require(s >= 0, ErrorKind::Domain, "area needs s >= 0");
    const double r = fam.r, h = fam.h, pi = boost::math::constants::pi<double>();
    if (s == 0) return 4 * pi * r * h;
    if (std::isinf(s)) return 2 * pi * r * r;
    const double w = r * s * std::tanh(s * h);
    return 2 * pi / (s * s) * (std::asinh(w) + w * std::sqrt(1 + w * w));
}

double unstable_excess(const CatenoidFamily& fam) {
    require(fam.has_roots(), ErrorKind::NoRoots, "family has no unstable catenoid");
    const double s = *fam.s2, u = s * fam.h, pi = boost::math::constants::pi<double>();
    return 2 * pi * fam.h / s - 4 * pi * fam.r * fam.r / (std::exp(2 * u) + 1);
}

std::vector<double> uniform_s_grid(const CatenoidFamily& fam, int points, double K) {
    require(fam.has_roots(), ErrorKind::NoRoots, "family has no roots");
    require(points >= 2, ErrorKind::Domain, "grid needs >= 2 points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = K * *fam.s2 * i / (points - 1);
    return grid;
}

UnstableMaxReport verify_unstable_max(const CatenoidFamily& fam, const std::vector<double>& s_grid) {
    require(fam.maximality_hypotheses(), ErrorKind::Precondition, "needs 0 < 2h < r tanh(1)");
    require(fam.has_roots(), ErrorKind::NoRoots, "family has no roots");
    const double pi = boost::math::constants::pi<double>();
    UnstableMaxReport rep;
    rep.s1 = *fam.s1;
    rep.s2 = *fam.s2;
    rep.area_s1 = area(fam, rep.s1);
    rep.area_s2 = area(fam, rep.s2);
    rep.area_cylinder = area(fam, 0.0);
    rep.grid_points = static_cast<int>(s_grid.size());
    const double slack = 4 * std::numeric_limits<double>::epsilon() * rep.area_s2;
    std::vector<double> a(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        a[i] = area(fam, s_grid[i]);
        if (a[i] > rep.area_s2 + slack) ++rep.grid_violations;
    }
    for (std::size_t i = 0; i + 1 < s_grid.size(); ++i) {
        const double lo = s_grid[i], hi = s_grid[i + 1];
        if ((lo <= rep.s1 && rep.s1 <= hi) || (lo <= rep.s2 && rep.s2 <= hi)) continue;
        const double da = a[i + 1] - a[i];
        if (std::abs(da) <= 64 * std::numeric_limits<double>::epsilon() * std::max(a[i], a[i + 1])) continue;
        const int sign = curvature_sign(fam, 0.5 * (lo + hi), 0.0);
        if ((da > 0 ? 1 : -1) != sign) ++rep.slope_sign_mismatches;
    }
    const double d1 = 1e-4 * rep.s1, d2 = 1e-4 * rep.s2;
    rep.local_min_at_s1 = area(fam, rep.s1 - d1) > rep.area_s1 && area(fam, rep.s1 + d1) > rep.area_s1;
    rep.local_max_at_s2 = area(fam, rep.s2 - d2) < rep.area_s2 && area(fam, rep.s2 + d2) < rep.area_s2;
    rep.s2h_above_one = rep.s2 * fam.h > 1.0;
    rep.above_tanh_disc_area = rep.area_s2 > 2 * pi * fam.r * fam.r * std::tanh(1.0);
    rep.above_cylinder = rep.area_s2 > rep.area_cylinder;
    return rep;
}

CatenoidEstimate catenoid_estimate_check(const CatenoidFamily& fam) {
    require(fam.h < 1, ErrorKind::Domain, "catenoid estimate needs h < 1");
    require(fam.maximality_hypotheses(), ErrorKind::Precondition, "needs 0 < 2h < r tanh(1)");
    require(fam.has_roots(), ErrorKind::NoRoots, "family has no roots");
    const double pi = boost::math::constants::pi<double>();
    CatenoidEstimate e;
    const double slack = 4 * pi * fam.h * fam.h / (-std::log(fam.h));
    e.lhs = area(fam, *fam.s2);
    e.rhs = 2 * pi * fam.r * fam.r + slack;
    e.margin = slack - unstable_excess(fam);
    e.holds = e.margin >= 0;
    return e;
}

double empirical_estimate_threshold(double r, int points) {
    const double h_max = 0.5 * r * std::tanh(1.0) * (1 - 1e-9);
    const double h_min = std::min(1e-12, h_max);
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double h = h_min * std::pow(h_max / h_min, static_cast<double>(i) / (points - 1));
        if (h >= 1) break;
        const auto fam = CatenoidFamily::make(r, h);
        if (!fam.has_roots() || !catenoid_estimate_check(fam).holds) break;
        best = h;
    }
    return best;
}

TriMesh<double> catenoid_mesh(const CatenoidFamily& fam, double s, int resolution) {
    require(resolution >= 8, ErrorKind::Precondition, "catenoid_mesh needs resolution >= 8");
    require(s >= 0 && std::isfinite(s), ErrorKind::Domain, "catenoid_mesh needs finite s >= 0");
    const double pi = boost::math::constants::pi<double>();
    const int rows = std::max(4, resolution / 2);
    // meridian arclength table
    const int dense = 20000;
    std::vector<double> zs(dense + 1), len(dense + 1, 0.0);
    for (int k = 0; k <= dense; ++k) zs[k] = -fam.h + 2 * fam.h * k / dense;
    for (int k = 1; k <= dense; ++k)
        len[k] = len[k - 1] + std::hypot(zs[k] - zs[k - 1], profile(fam, s, zs[k]) - profile(fam, s, zs[k - 1]));
    std::vector<double> zr(rows + 1);
    for (int i = 0; i <= rows; ++i) {
        const double target = len[dense] * i / rows;
        const auto it = std::lower_bound(len.begin(), len.end(), target);
        const int k = std::clamp(static_cast<int>(it - len.begin()), 1, dense);
        const double w = (len[k] > len[k - 1]) ? (target - len[k - 1]) / (len[k] - len[k - 1]) : 0.0;
        zr[i] = zs[k - 1] + w * (zs[k] - zs[k - 1]);
    }
    zr.front() = -fam.h;
    zr.back() = fam.h;
    std::vector<Vec3d> v;
    std::vector<VertexTag> tags;
    for (int i = 0; i <= rows; ++i) {
        const double rho = profile(fam, s, zr[i]);
        for (int j = 0; j < resolution; ++j) {
            const double th = 2 * pi * j / resolution;
            v.emplace_back(rho * std::cos(th), rho * std::sin(th), zr[i]);
            tags.push_back({});
        }
    }
    std::vector<Face> f;
    auto id = [resolution](int i, int j) { return i * resolution + (j % resolution); };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < resolution; ++j) {
            f.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    return TriMesh<double>(std::move(v), std::move(f), std::move(tags));
}

CatenoidReport catenoid_report(double r, double h, int grid_points) {
    const auto fam = CatenoidFamily::make(r, h);
    require(fam.has_roots(), ErrorKind::NoRoots, "no catenoid roots for r = " + std::to_string(r) + ", h = " + std::to_string(h));
    CatenoidReport rep;
    rep.r = r;
    rep.h = h;
    rep.s1 = *fam.s1;
    rep.s2 = *fam.s2;
    rep.area_s1 = area(fam, rep.s1);
    rep.area_s2 = area(fam, rep.s2);
    rep.area_cylinder = area(fam, 0.0);
    rep.s2h = rep.s2 * h;
    rep.maximality = verify_unstable_max(fam, uniform_s_grid(fam, grid_points));
    rep.estimate = catenoid_estimate_check(fam);
    rep.bound_rhs = rep.estimate.rhs;
    rep.margin = rep.estimate.margin;
    rep.checks_passed = rep.maximality.passed() && rep.estimate.holds;
    return rep;
}

void write_catenoid_csv(std::ostream& os, const std::vector<CatenoidReport>& rows) {
    os << "r,h,s1,s2,A_s1,A_s2,A_cyl,bound_rhs,margin,s2h,checks_passed\n";
    os << std::setprecision(17);
    for (const auto& c : rows)
        os << c.r << ',' << c.h << ',' << c.s1 << ',' << c.s2 << ',' << c.area_s1 << ',' << c.area_s2 << ','
           << c.area_cylinder << ',' << c.bound_rhs << ',' << c.margin << ',' << c.s2h << ','
           << (c.checks_passed ? "true" : "false") << '\n';
}

}  // namespace fbms
