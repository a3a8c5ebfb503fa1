#pragma once

#include "fbms/geom/tri_mesh.hpp"

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

namespace fbms {

/// Surfaces of revolution rho(z) = r cosh(s z) / cosh(s h), |z| <= h, spanning
/// two coaxial circles of radius r at heights +-h. s = 0 is the cylinder and
/// s = infinity the two flat discs joined by a segment.
struct CatenoidFamily {
    double r = 1.0;
    double h = 0.2;
    std::optional<double> s1;  // stable catenoid
    std::optional<double> s2;  // unstable catenoid

    /// Builds the family and fills in the roots when they exist.
    static CatenoidFamily make(double r, double h);

    bool has_roots() const { return s1.has_value() && s2.has_value(); }
    /// 0 < 2h < r tanh(1)
    bool maximality_hypotheses() const;
};

/// Distinguished value for the s = infinity limit.
inline constexpr double kInfiniteS = std::numeric_limits<double>::infinity();

/// Positive root of cosh t = t sinh t; the balance equation has two roots
/// exactly when h < r / sinh(tangency_parameter()).
double tangency_parameter();

double profile(const CatenoidFamily& fam, double s, double z);

/// Sign of r s - cosh(s h), which is the sign of the mean curvature of the
/// slice s. Values within `tol` of zero count as zero.
int curvature_sign(const CatenoidFamily& fam, double s, double tol = 1e-10);

/// The two positive roots s1 < s2 of r s = cosh(s h). Throws no-roots when
/// h >= r / sinh(t0).
std::pair<double, double> solve_balance(double r, double h);

/// Closed-form area of the slice s, with the limits 4 pi r h at s = 0 and
/// 2 pi r^2 at s = infinity.
double area(const CatenoidFamily& fam, double s);

/// area(fam, s2) - 2 pi r^2 without cancellation, using the balance equation at s2.
double unstable_excess(const CatenoidFamily& fam);

struct UnstableMaxReport {
    double s1 = 0, s2 = 0;
    double area_s1 = 0, area_s2 = 0, area_cylinder = 0;
    int grid_points = 0;
    int grid_violations = 0;        // grid s with A(s) > A(s2)
    int slope_sign_mismatches = 0;  // finite-difference sign vs curvature sign
    bool local_min_at_s1 = false;
    bool local_max_at_s2 = false;
    bool s2h_above_one = false;            // s2 h > 1
    bool above_tanh_disc_area = false;     // A(s2) > 2 pi r^2 tanh(1)
    bool above_cylinder = false;           // A(s2) > 4 pi r h

    bool passed() const {
        return grid_violations == 0 && slope_sign_mismatches == 0 && local_min_at_s1 && local_max_at_s2 &&
               s2h_above_one && above_tanh_disc_area && above_cylinder;
    }
};

/// `points` equally spaced values covering [0, K s2].
std::vector<double> uniform_s_grid(const CatenoidFamily& fam, int points = 10000, double K = 4.0);

UnstableMaxReport verify_unstable_max(const CatenoidFamily& fam, const std::vector<double>& s_grid);

struct CatenoidEstimate {
    bool holds = false;
    double lhs = 0;     // sup_s A(s) = A(s2)
    double rhs = 0;     // 2 pi r^2 + 4 pi h^2 / (-log h)
    double margin = 0;  // rhs - lhs
};

CatenoidEstimate catenoid_estimate_check(const CatenoidFamily& fam);

/// Largest h on a geometric grid below which the estimate holds for every
/// grid point, for fixed r. Returns 0 when it fails at the smallest grid h.
double empirical_estimate_threshold(double r, int points = 200);

/// Surface-of-revolution triangulation with `resolution` angular segments
/// and rows spaced evenly in meridian arclength.
TriMesh<double> catenoid_mesh(const CatenoidFamily& fam, double s, int resolution);

/// One row of the catenoid CSV report.
struct CatenoidReport {
    double r = 0, h = 0;
    double s1 = 0, s2 = 0;
    double area_s1 = 0, area_s2 = 0, area_cylinder = 0;
    double bound_rhs = 0, margin = 0;
    double s2h = 0;
    bool checks_passed = false;
    UnstableMaxReport maximality;
    CatenoidEstimate estimate;
};

CatenoidReport catenoid_report(double r, double h, int grid_points = 10000);

void write_catenoid_csv(std::ostream& os, const std::vector<CatenoidReport>& rows);

}  // namespace fbms
