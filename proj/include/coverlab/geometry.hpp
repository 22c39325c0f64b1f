#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coverlab {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

enum class BoundaryCondition { neumann, dirichlet };

struct Circle {
    Point center;
    double radius = 0.0;
    BoundaryCondition bc = BoundaryCondition::neumann;
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResolutionError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class ReflectionError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

struct DomainSpec {
    Circle outer;
    std::vector<Circle> holes;
};

/// Disk with circular holes. Boundary component 0 is the outer circle,
/// component j+1 is hole j.
class PlanarDomain {
public:
    explicit PlanarDomain(DomainSpec spec);

    const Circle& outer() const { return spec_.outer; }
    const std::vector<Circle>& holes() const { return spec_.holes; }
    const Circle& component(int c) const { return c == 0 ? spec_.outer : spec_.holes[c - 1]; }
    int num_components() const { return 1 + static_cast<int>(spec_.holes.size()); }
    int rank() const { return static_cast<int>(spec_.holes.size()); }
    const DomainSpec& spec() const { return spec_; }

    bool contains(Point p) const;
    double area() const;
    bool all_neumann() const;

    /// Smallest hole radius or gap between two boundary circles.
    double min_feature() const { return min_feature_; }

    /// Largest excursion outside M that boundary_projection accepts.
    double trust_distance() const { return 0.5 * min_feature_; }

    /// Boundary component nearest to p and the distance to it.
    int nearest_component(Point p, double* distance = nullptr) const;

    /// Outward unit normal of M at the point of component c nearest to p.
    Point outward_normal(int c, Point p) const;

private:
    DomainSpec spec_;
    double min_feature_ = 0.0;
};

PlanarDomain build_domain(const DomainSpec& spec);
bool contains(const PlanarDomain& domain, Point p);

struct Reflection {
    Point point;
    Point normal;
    int component = -1;
};

/// Radial mirror of a point that has left M across one boundary circle.
Reflection boundary_projection(const PlanarDomain& domain, Point p);
Reflection boundary_projection(const PlanarDomain& domain, Point p, double trust);

enum class NodeKind : std::uint8_t { interior, neumann_boundary, dirichlet_boundary, exterior };

/// Masked lattice over the bounding box of the outer circle. Nodes strictly
/// inside M are active; an active node missing one of its four lattice
/// neighbours is a boundary node, typed by the circle that edge crosses.
class Grid {
public:
    // neighbour directions, in this order
    static constexpr int kDirs = 4;
    static constexpr std::array<int, 4> kDi = {1, -1, 0, 0};
    static constexpr std::array<int, 4> kDj = {0, 0, 1, -1};

    Grid(const PlanarDomain& domain, double h);

    const PlanarDomain& domain() const { return domain_; }
    double h() const { return h_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    Point origin() const { return origin_; }

    int num_active() const { return static_cast<int>(active_to_lattice_.size()); }
    int lattice_id(int i, int j) const { return j * nx_ + i; }
    bool in_lattice(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }
    Point lattice_point(int i, int j) const {
        return {centre_.x + (i - half_) * h_, centre_.y + (j - half_) * h_};
    }

    /// Active index of lattice node (i, j), or -1.
    int active_index(int i, int j) const {
        return in_lattice(i, j) ? lattice_to_active_[lattice_id(i, j)] : -1;
    }
    std::array<int, 2> coords(int a) const {
        int id = active_to_lattice_[a];
        return {id % nx_, id / nx_};
    }
    Point node(int a) const {
        auto [i, j] = coords(a);
        return lattice_point(i, j);
    }
    NodeKind kind(int a) const { return kind_[a]; }
    NodeKind lattice_kind(int i, int j) const;

    int neighbor(int a, int d) const { return nbr_[a][d]; }
    /// Boundary component crossed by the missing edge (a, d), or -1 when the neighbour exists.
    int crossed_component(int a, int d) const { return crossed_[a][d]; }
    /// Outward normal from the exact circle; zero for interior nodes.
    Point normal(int a) const { return normal_[a]; }

    std::size_t count(NodeKind k) const;
    double area_estimate() const { return num_active() * h_ * h_; }

    /// Active node nearest to p (lattice rounding, then a local search).
    int nearest_active(Point p) const;

private:
    PlanarDomain domain_;
    double h_;
    int nx_ = 0, ny_ = 0;
    Point origin_;
    Point centre_;
    int half_ = 0;  // lattice index of the outer centre
    std::vector<int> lattice_to_active_;
    std::vector<int> active_to_lattice_;
    std::vector<NodeKind> kind_;
    std::vector<std::array<int, 4>> nbr_;
    std::vector<std::array<std::int8_t, 4>> crossed_;
    std::vector<Point> normal_;
};

Grid discretize(const PlanarDomain& domain, double h);

/// Point on the segment a -> b where it meets circle c; a inside the
/// circle's M side, b outside.
Point segment_circle_crossing(const Circle& c, bool is_outer, Point a, Point b);

}  // namespace coverlab
