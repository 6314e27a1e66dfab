#pragma once
/**
 * @file mesh.hpp
 * @brief Cell-centered meshes of the unit ball and scalar fields on them.
 *
 * Polar (d = 2): cell 0 is the disk r < dr; the remaining (n_r - 1) * n_theta
 * cells are annular sectors, ring i (1 <= i < n_r) stored at
 * 1 + (i - 1) * n_theta + j.
 * Radial (d = 2 or 3): n_r shells, for radially symmetric data.
 * Cartesian (d = 2): a uniform box grid, used in free-space mode.
 */

#include <string>
#include <vector>

#include "kdl/vec.hpp"

namespace kdl {

enum class MeshKind { Polar, Radial, Cartesian };

/// Two-point flux face between cells a and b with transmissibility T
/// (face measure over center distance).
struct Face {
    int a;
    int b;
    double T;
};

class Mesh {
public:
    static Mesh polar(int n_r, int n_theta);
    static Mesh radial(int dim, int n_r);
    static Mesh cartesian(int n, double lo, double hi);

    MeshKind kind() const { return kind_; }
    int dim() const { return dim_; }
    int n_r() const { return n_r_; }
    int n_theta() const { return n_theta_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int size() const;
    bool empty() const { return size() == 0; }

    double volume(int c) const;
    double total_volume() const;
    /// Nominal cell center (inside the cell).
    Vec center(int c) const;
    double center_r(int c) const;
    double center_theta(int c) const;
    /// Index of the cell containing x, or -1 outside the mesh.
    int locate(const Vec& x) const;
    /// Cells whose outer face lies on the unit sphere.
    std::vector<int> boundary_cells() const;
    std::vector<Face> faces() const;

    /// Cell bounds in (r, theta) for polar/radial, (x, y) for Cartesian.
    struct Box {
        double a0, a1, b0, b1;
    };
    Box bounds(int c) const;

    std::string describe() const;
    bool operator==(const Mesh& o) const;

private:
    MeshKind kind_ = MeshKind::Polar;
    int dim_ = 2;
    int n_r_ = 0;
    int n_theta_ = 1;
    double lo_ = 0.0;
    double hi_ = 1.0;
};

struct ScalarField {
    Mesh mesh;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(Mesh m, double fill = 0.0) : mesh(std::move(m)), values(mesh.size(), fill) {}

    double integral() const;
    double min() const;
    double max() const;
};

struct VectorField {
    Mesh mesh;
    std::vector<Vec> values;
};

/// sqrt(sum (a - b)^2 vol).
double l2_error(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);

/// Volume-weighted average of a nested fine field onto a coarse mesh.
ScalarField restrict_to(const ScalarField& fine, const Mesh& coarse);

/// CSV with columns r, theta, x, y, value (radial cells are listed along the x axis).
std::string to_csv(const ScalarField& f);

}  // namespace kdl
