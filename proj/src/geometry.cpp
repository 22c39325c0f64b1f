#include "coverlab/geometry.hpp"

#include <algorithm>
#include <limits>

namespace coverlab {

namespace {

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

PlanarDomain::PlanarDomain(DomainSpec spec) : spec_(std::move(spec)) {
    const Circle& o = spec_.outer;
    if (!finite(o.center) || !(o.radius > 0.0) || !std::isfinite(o.radius))
        throw GeometryError("outer circle needs a finite centre and positive radius");
    min_feature_ = o.radius;
    for (std::size_t j = 0; j < spec_.holes.size(); ++j) {
        const Circle& c = spec_.holes[j];
        if (!finite(c.center) || !(c.radius > 0.0) || !std::isfinite(c.radius))
            throw GeometryError("hole " + std::to_string(j) + ": bad centre or radius");
        double to_outer = o.radius - norm(c.center - o.center) - c.radius;
        if (to_outer <= 0.0)
            throw GeometryError("hole " + std::to_string(j) + " is not strictly inside the outer circle");
        min_feature_ = std::min({min_feature_, c.radius, to_outer});
        for (std::size_t i = 0; i < j; ++i) {
            const Circle& d = spec_.holes[i];
            double gap = norm(c.center - d.center) - c.radius - d.radius;
            if (gap <= 0.0)
                throw GeometryError("holes " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
            min_feature_ = std::min(min_feature_, gap);
        }
    }
}

bool PlanarDomain::contains(Point p) const {
    Point d = p - spec_.outer.center;
    if (!(dot(d, d) < spec_.outer.radius * spec_.outer.radius)) return false;
    for (const Circle& c : spec_.holes) {
        Point e = p - c.center;
        if (!(dot(e, e) > c.radius * c.radius)) return false;
    }
    return true;
}

double PlanarDomain::area() const {
    double a = M_PI * spec_.outer.radius * spec_.outer.radius;
    for (const Circle& c : spec_.holes) a -= M_PI * c.radius * c.radius;
    return a;
}

bool PlanarDomain::all_neumann() const {
    for (int c = 0; c < num_components(); ++c)
        if (component(c).bc != BoundaryCondition::neumann) return false;
    return true;
}

int PlanarDomain::nearest_component(Point p, double* distance) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_components(); ++c) {
        const Circle& circ = component(c);
        double d = std::abs(norm(p - circ.center) - circ.radius);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (distance) *distance = best_d;
    return best;
}

Point PlanarDomain::outward_normal(int c, Point p) const {
    const Circle& circ = component(c);
    Point d = p - circ.center;
    double r = norm(d);
    if (r == 0.0) throw GeometryError("normal undefined at a circle centre");
    double s = (c == 0) ? 1.0 / r : -1.0 / r;
    return s * d;
}

PlanarDomain build_domain(const DomainSpec& spec) { return PlanarDomain(spec); }

bool contains(const PlanarDomain& domain, Point p) { return domain.contains(p); }

Reflection boundary_projection(const PlanarDomain& domain, Point p) {
    return boundary_projection(domain, p, domain.trust_distance());
}

Reflection boundary_projection(const PlanarDomain& domain, Point p, double trust) {
    if (domain.contains(p)) throw ReflectionError("point is inside the domain; nothing to reflect");
    double dist = 0.0;
    int c = domain.nearest_component(p, &dist);
    if (dist > trust)
        throw ReflectionError("point lies " + std::to_string(dist) + " outside the boundary (trust " +
                              std::to_string(trust) + "); reduce dt");
    const Circle& circ = domain.component(c);
    Point d = p - circ.center;
    double r = norm(d);
    if (r == 0.0) throw ReflectionError("point at a circle centre");
    double rr = 2.0 * circ.radius - r;
    Reflection out;
    out.point = circ.center + (rr / r) * d;
    out.normal = domain.outward_normal(c, p);
    out.component = c;
    if (!domain.contains(out.point)) throw ReflectionError("mirror image is not inside the domain");
    return out;
}

Point segment_circle_crossing(const Circle& c, bool is_outer, Point a, Point b) {
    Point d = b - a;
    Point f = a - c.center;
    double A = dot(d, d);
    double B = 2.0 * dot(f, d);
    double C = dot(f, f) - c.radius * c.radius;
    double disc = std::max(0.0, B * B - 4.0 * A * C);
    double sq = std::sqrt(disc);
    double s = is_outer ? (-B + sq) / (2.0 * A) : (-B - sq) / (2.0 * A);
    s = std::clamp(s, 0.0, 1.0);
    return a + s * d;
}

Grid::Grid(const PlanarDomain& domain, double h) : domain_(domain), h_(h) {
    if (!(h > 0.0) || !(h < domain.min_feature() / 4.0))
        throw ResolutionError("grid spacing " + std::to_string(h) + " must be below " +
                              std::to_string(domain.min_feature() / 4.0));
    const Circle& o = domain.outer();
    int m = static_cast<int>(std::ceil(o.radius / h)) + 2;
    nx_ = ny_ = 2 * m + 1;
    origin_ = {o.center.x - m * h, o.center.y - m * h};
    centre_ = o.center;
    half_ = m;

    lattice_to_active_.assign(static_cast<std::size_t>(nx_) * ny_, -1);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            if (domain.contains(lattice_point(i, j))) {
                lattice_to_active_[lattice_id(i, j)] = static_cast<int>(active_to_lattice_.size());
                active_to_lattice_.push_back(lattice_id(i, j));
            }

    int n = num_active();
    kind_.resize(n);
    nbr_.resize(n);
    crossed_.resize(n);
    normal_.assign(n, Point{});
    for (int a = 0; a < n; ++a) {
        auto [i, j] = coords(a);
        bool missing = false, dirichlet = false;
        for (int d = 0; d < kDirs; ++d) {
            int b = active_index(i + kDi[d], j + kDj[d]);
            nbr_[a][d] = b;
            crossed_[a][d] = -1;
            if (b >= 0) continue;
            missing = true;
            Point q = lattice_point(i + kDi[d], j + kDj[d]);
            int comp = 0;
            if (norm(q - o.center) < o.radius) {
                for (int hj = 0; hj < domain.rank(); ++hj)
                    if (norm(q - domain.holes()[hj].center) <= domain.holes()[hj].radius) {
                        comp = hj + 1;
                        break;
                    }
            }
            crossed_[a][d] = static_cast<std::int8_t>(comp);
            if (domain.component(comp).bc == BoundaryCondition::dirichlet) dirichlet = true;
        }
        if (!missing) {
            kind_[a] = NodeKind::interior;
        } else {
            kind_[a] = dirichlet ? NodeKind::dirichlet_boundary : NodeKind::neumann_boundary;
            Point p = node(a);
            normal_[a] = domain.outward_normal(domain.nearest_component(p), p);
        }
    }
}

NodeKind Grid::lattice_kind(int i, int j) const {
    int a = active_index(i, j);
    return a < 0 ? NodeKind::exterior : kind_[a];
}

std::size_t Grid::count(NodeKind k) const {
    if (k == NodeKind::exterior) return lattice_to_active_.size() - active_to_lattice_.size();
    return static_cast<std::size_t>(std::count(kind_.begin(), kind_.end(), k));
}

int Grid::nearest_active(Point p) const {
    int ic = static_cast<int>(std::lround((p.x - origin_.x) / h_));
    int jc = static_cast<int>(std::lround((p.y - origin_.y) / h_));
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int r = 0; r <= 3 && best < 0; ++r)
        for (int j = jc - r; j <= jc + r; ++j)
            for (int i = ic - r; i <= ic + r; ++i) {
                int a = active_index(i, j);
                if (a < 0) continue;
                double d = norm(node(a) - p);
                if (d < best_d) {
                    best_d = d;
                    best = a;
                }
            }
    return best;
}

Grid discretize(const PlanarDomain& domain, double h) { return Grid(domain, h); }

}  // namespace coverlab
