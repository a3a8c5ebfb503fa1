#pragma once

#include "fbms/core/errors.hpp"
#include "fbms/core/scalar.hpp"

#include <optional>
#include <vector>

namespace fbms {

/// Linear isometry fixing the origin. Every element used here is a rotation.
template <typename Scalar>
class Isometry {
public:
    Isometry() : m_(Mat3<Scalar>::Identity()) {}
    explicit Isometry(const Mat3<Scalar>& m) : m_(m) {}

    static Isometry rotation_z(const Scalar& angle) {
        using std::cos;
        using std::sin;
        Mat3<Scalar> m = Mat3<Scalar>::Identity();
        m(0, 0) = cos(angle);
        m(0, 1) = -sin(angle);
        m(1, 0) = sin(angle);
        m(1, 1) = cos(angle);
        return Isometry(m);
    }

    /// Rotation by pi about the line spanned by the unit vector `axis`.
    static Isometry half_turn(const Vec3<Scalar>& axis) {
        Mat3<Scalar> m = Scalar(2) * axis * axis.transpose() - Mat3<Scalar>::Identity();
        return Isometry(m);
    }

    const Mat3<Scalar>& matrix() const { return m_; }

    Vec3<Scalar> operator()(const Vec3<Scalar>& p) const { return m_ * p; }

    Isometry operator*(const Isometry& other) const { return Isometry(Mat3<Scalar>(m_ * other.m_)); }

    Isometry inverse() const { return Isometry(Mat3<Scalar>(m_.transpose())); }

    Scalar orthogonality_defect() const {
        return (m_.transpose() * m_ - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff();
    }

    Scalar determinant() const { return m_.determinant(); }

    bool approx_equal(const Isometry& other, const Scalar& tol) const {
        return (m_ - other.m_).cwiseAbs().maxCoeff() <= tol;
    }

private:
    Mat3<Scalar> m_;
};

/// The dihedral group D_n acting on the closed unit ball: rotations by
/// 2 pi m / n about the vertical axis xi_0 and half-turns about the n
/// horizontal axes xi_k at angle k pi / n.
///
/// Element layout: indices [0, n) are the rotations R^m, index n + k - 1 is
/// the half-turn about xi_k (k = 1..n).
template <typename Scalar>
class DihedralGroup {
public:
    explicit DihedralGroup(int n) : n_(n) {
        require(n >= 2, ErrorKind::InvalidOrder, "dihedral group needs n >= 2, got " + std::to_string(n));
        const Scalar two_pi = Scalar(2) * pi<Scalar>();
        axes_.push_back(Vec3<Scalar>::UnitZ());
        for (int k = 1; k <= n; ++k) axes_.push_back(horizontal_axis(k));
        for (int m = 0; m < n; ++m) elements_.push_back(Isometry<Scalar>::rotation_z(two_pi * Scalar(m) / Scalar(n)));
        for (int k = 1; k <= n; ++k) elements_.push_back(Isometry<Scalar>::half_turn(axes_[k]));
    }

    int n() const { return n_; }
    int order() const { return 2 * n_; }
    const std::vector<Isometry<Scalar>>& elements() const { return elements_; }
    const Isometry<Scalar>& operator[](int i) const { return elements_[i]; }

    /// Unit direction of xi_k, k = 0..n.
    const Vec3<Scalar>& axis(int k) const { return axes_.at(k); }
    const std::vector<Vec3<Scalar>>& axes() const { return axes_; }

    int rotation_index(int m) const { return ((m % n_) + n_) % n_; }
    int half_turn_index(int k) const {
        require(k >= 1 && k <= n_, ErrorKind::Domain, "half-turn axis index out of range");
        return n_ + k - 1;
    }
    const Isometry<Scalar>& rotation(int m) const { return elements_[rotation_index(m)]; }
    const Isometry<Scalar>& half_turn(int k) const { return elements_[half_turn_index(k)]; }

    /// Index of the element equal to `g`, if any.
    std::optional<int> find(const Isometry<Scalar>& g, const Scalar& tol) const {
        for (int i = 0; i < order(); ++i)
            if (elements_[i].approx_equal(g, tol)) return i;
        return std::nullopt;
    }

    /// Full composition table; entry (i, j) is the index of elements[i] * elements[j].
    /// Throws if the set is not closed.
    std::vector<std::vector<int>> composition_table(const Scalar& tol) const {
        std::vector<std::vector<int>> table(order(), std::vector<int>(order(), -1));
        for (int i = 0; i < order(); ++i)
            for (int j = 0; j < order(); ++j) {
                auto k = find(elements_[i] * elements_[j], tol);
                require(k.has_value(), ErrorKind::InvalidOrder, "dihedral group is not closed under composition");
                table[i][j] = *k;
            }
        return table;
    }

    /// True if p lies (within tol) on the singular locus xi_0 u ... u xi_n.
    bool on_singular_locus(const Vec3<Scalar>& p, const Scalar& tol) const {
        for (const auto& a : axes_) {
            const Vec3<Scalar> perp = p - a * a.dot(p);
            if (perp.norm() <= tol) return true;
        }
        return false;
    }

private:
    Vec3<Scalar> horizontal_axis(int k) const {
        using std::cos;
        using std::sin;
        const Scalar ang = pi<Scalar>() * Scalar(k) / Scalar(n_);
        return Vec3<Scalar>(cos(ang), sin(ang), Scalar(0));
    }

    int n_;
    std::vector<Vec3<Scalar>> axes_;
    std::vector<Isometry<Scalar>> elements_;
};

template <typename Scalar = double>
DihedralGroup<Scalar> dihedral_group(int n) {
    return DihedralGroup<Scalar>(n);
}

}  // namespace fbms
