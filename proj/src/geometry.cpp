#include "bmlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace bmlab::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// --- per-primitive helpers ---------------------------------------------

bool ball_contains(const Ball& b, const Point& p, int d) {
    return norm(sub(p, b.center), d) <= b.radius;
}

bool box_contains(const Box& b, const Point& p, int d) {
    for (int i = 0; i < d; ++i)
        if (p[i] < b.min[i] || p[i] > b.max[i]) return false;
    return true;
}

double segment_distance(const Segment& s, const Point& p) {
    const Point pq = sub(s.q, s.p);
    const double len2 = dot(pq, pq, 2);
    double t = len2 > 0.0 ? dot(sub(p, s.p), pq, 2) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Point proj = add(s.p, mul(pq, t));
    return norm(sub(p, proj), 2);
}

void cylinder_coords(const Cylinder& c, const Point& p, double& s,
                     double& rho) {
    const Point rel = sub(p, c.base_center);
    s = dot(rel, c.axis, 3);
    const Point radial = sub(rel, mul(c.axis, s));
    rho = norm(radial, 3);
}

bool cylinder_contains(const Cylinder& c, const Point& p) {
    double s, rho;
    cylinder_coords(c, p, s, rho);
    return s >= 0.0 && s <= c.height && rho <= c.radius;
}

double cylinder_sdf(const Cylinder& c, const Point& p) {
    double s, rho;
    cylinder_coords(c, p, s, rho);
    const double dx = rho - c.radius;
    const double dy = std::max(-s, s - c.height);
    const double outside =
        std::sqrt(sq(std::max(dx, 0.0)) + sq(std::max(dy, 0.0)));
    const double inside = std::min(std::max(dx, dy), 0.0);
    return outside + inside;
}

double box_sdf(const Box& b, const Point& p, int d) {
    double inside = -kInf;
    double out2 = 0.0;
    for (int i = 0; i < d; ++i) {
        const double half = 0.5 * (b.max[i] - b.min[i]);
        const double center = 0.5 * (b.max[i] + b.min[i]);
        const double q = std::fabs(p[i] - center) - half;
        out2 += sq(std::max(q, 0.0));
        inside = std::max(inside, q);
    }
    return std::sqrt(out2) + std::min(inside, 0.0);
}

double primitive_max_norm(const Primitive& prim, int d) {
    if (const auto* b = std::get_if<Ball>(&prim))
        return norm(b->center, d) + b->radius;
    if (const auto* b = std::get_if<Box>(&prim)) {
        double m = 0.0;
        const int corners = d == 2 ? 4 : 8;
        for (int mask = 0; mask < corners; ++mask) {
            Point c{0.0, 0.0, 0.0};
            for (int i = 0; i < d; ++i)
                c[i] = (mask >> i & 1) ? b->max[i] : b->min[i];
            m = std::max(m, norm(c, d));
        }
        return m;
    }
    if (const auto* s = std::get_if<Segment>(&prim))
        return std::max(norm(s->p, 2), norm(s->q, 2));
    const auto& c = std::get<Cylinder>(prim);
    double m = 0.0;
    for (double s : {0.0, c.height}) {
        const Point end = add(c.base_center, mul(c.axis, s));
        const double axial = dot(end, c.axis, 3);
        const Point perp = sub(end, mul(c.axis, axial));
        const double rho = norm(perp, 3);
        m = std::max(m, std::sqrt(dot(end, end, 3) + sq(c.radius) +
                                  2.0 * c.radius * rho));
    }
    return m;
}

// Largest ray parameter s with z + s e inside the primitive; -inf if the
// ray misses.
double primitive_ray_exit(const Primitive& prim, const Point& z,
                          const Point& e, int d) {
    if (const auto* b = std::get_if<Ball>(&prim)) {
        const Point rel = sub(z, b->center);
        const double pb = dot(rel, e, d);
        const double disc = sq(pb) - (dot(rel, rel, d) - sq(b->radius));
        if (disc < 0.0) return -kInf;
        return -pb + std::sqrt(disc);
    }
    if (const auto* b = std::get_if<Box>(&prim)) {
        double tmin = -kInf, tmax = kInf;
        for (int i = 0; i < d; ++i) {
            if (std::fabs(e[i]) < 1e-300) {
                if (z[i] < b->min[i] || z[i] > b->max[i]) return -kInf;
                continue;
            }
            double t1 = (b->min[i] - z[i]) / e[i];
            double t2 = (b->max[i] - z[i]) / e[i];
            if (t1 > t2) std::swap(t1, t2);
            tmin = std::max(tmin, t1);
            tmax = std::min(tmax, t2);
        }
        return tmin <= tmax ? tmax : -kInf;
    }
    if (const auto* s = std::get_if<Segment>(&prim)) {
        // Solve z + t e = p + tau (q - p) in the plane.
        const Point pq = sub(s->q, s->p);
        const double det = e[0] * (-pq[1]) - e[1] * (-pq[0]);
        const Point rhs = sub(s->p, z);
        if (std::fabs(det) < 1e-14) {
            // Parallel; collinear if p is on the ray's line.
            const double cross = e[0] * rhs[1] - e[1] * rhs[0];
            if (std::fabs(cross) > 1e-12) return -kInf;
            return std::max(dot(rhs, e, 2), dot(sub(s->q, z), e, 2));
        }
        const double t = (rhs[0] * (-pq[1]) - rhs[1] * (-pq[0])) / det;
        const double tau = (e[0] * rhs[1] - e[1] * rhs[0]) / det;
        if (tau < 0.0 || tau > 1.0) return -kInf;
        return t;
    }
    const auto& c = std::get<Cylinder>(prim);
    // Intersect the slab 0 <= axial <= height with the infinite cylinder.
    const Point rel = sub(z, c.base_center);
    const double ez = dot(e, c.axis, 3);
    const double rz = dot(rel, c.axis, 3);
    double tmin = -kInf, tmax = kInf;
    if (std::fabs(ez) < 1e-300) {
        if (rz < 0.0 || rz > c.height) return -kInf;
    } else {
        double t1 = (0.0 - rz) / ez;
        double t2 = (c.height - rz) / ez;
        if (t1 > t2) std::swap(t1, t2);
        tmin = t1;
        tmax = t2;
    }
    const Point ep = sub(e, mul(c.axis, ez));
    const Point rp = sub(rel, mul(c.axis, rz));
    const double a = dot(ep, ep, 3);
    if (a < 1e-300) {
        if (norm(rp, 3) > c.radius) return -kInf;
    } else {
        const double bq = dot(rp, ep, 3);
        const double disc = sq(bq) - a * (dot(rp, rp, 3) - sq(c.radius));
        if (disc < 0.0) return -kInf;
        const double sd = std::sqrt(disc);
        tmin = std::max(tmin, (-bq - sd) / a);
        tmax = std::min(tmax, (-bq + sd) / a);
    }
    return tmin <= tmax ? tmax : -kInf;
}

}  // namespace

double dot(const Point& a, const Point& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

double norm(const Point& a, int d) { return std::sqrt(dot(a, a, d)); }

Point sub(const Point& a, const Point& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Point add(const Point& a, const Point& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

Point mul(const Point& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

void ShapeSpec::validate() const {
    if (d != 2 && d != 3)
        throw std::domain_error("ShapeSpec: d must be 2 or 3");
    if (primitives.empty())
        throw std::domain_error("ShapeSpec: primitive list must be non-empty");
    for (const auto& prim : primitives) {
        if (const auto* b = std::get_if<Ball>(&prim)) {
            if (!(b->radius > 0.0))
                throw std::domain_error("ShapeSpec: ball radius must be > 0");
        } else if (const auto* b = std::get_if<Box>(&prim)) {
            for (int i = 0; i < d; ++i)
                if (!(b->min[i] < b->max[i]))
                    throw std::domain_error(
                        "ShapeSpec: box min must be < max componentwise");
        } else if (std::get_if<Segment>(&prim)) {
            if (d != 2)
                throw std::domain_error("ShapeSpec: segment requires d = 2");
        } else {
            const auto& c = std::get<Cylinder>(prim);
            if (d != 3)
                throw std::domain_error("ShapeSpec: cylinder requires d = 3");
            if (!(c.radius > 0.0) || !(c.height > 0.0))
                throw std::domain_error(
                    "ShapeSpec: cylinder radius/height must be > 0");
            if (std::fabs(norm(c.axis, 3) - 1.0) > 1e-9)
                throw std::domain_error("ShapeSpec: cylinder axis must be unit");
        }
    }
}

Direction Direction::make(const Point& v, int d) {
    const double n = norm(v, d);
    if (!(n > 0.0)) throw std::domain_error("Direction: zero vector");
    Direction dir;
    dir.e = mul(v, 1.0 / n);
    if (d == 2) dir.e[2] = 0.0;
    return dir;
}

bool contains(const ShapeSpec& shape, const Point& p) {
    for (const auto& prim : shape.primitives) {
        if (const auto* b = std::get_if<Ball>(&prim)) {
            if (ball_contains(*b, p, shape.d)) return true;
        } else if (const auto* b = std::get_if<Box>(&prim)) {
            if (box_contains(*b, p, shape.d)) return true;
        } else if (const auto* s = std::get_if<Segment>(&prim)) {
            if (segment_distance(*s, p) <= 1e-12) return true;
        } else if (cylinder_contains(std::get<Cylinder>(prim), p)) {
            return true;
        }
    }
    return false;
}

double r_out(const ShapeSpec& shape) {
    double m = 0.0;
    for (const auto& prim : shape.primitives)
        m = std::max(m, primitive_max_norm(prim, shape.d));
    return m;
}

double signed_distance(const ShapeSpec& shape, const Point& p) {
    double dist = kInf;
    for (const auto& prim : shape.primitives) {
        double v;
        if (const auto* b = std::get_if<Ball>(&prim))
            v = norm(sub(p, b->center), shape.d) - b->radius;
        else if (const auto* b = std::get_if<Box>(&prim))
            v = box_sdf(*b, p, shape.d);
        else if (const auto* s = std::get_if<Segment>(&prim))
            v = segment_distance(*s, p);
        else
            v = cylinder_sdf(std::get<Cylinder>(prim), p);
        dist = std::min(dist, v);
    }
    return dist;
}

ShapeSpec scale(const ShapeSpec& shape, double R) {
    if (!(R > 0.0)) throw std::domain_error("scale: R must be > 0");
    ShapeSpec out;
    out.d = shape.d;
    for (const auto& prim : shape.primitives) {
        if (const auto* b = std::get_if<Ball>(&prim))
            out.primitives.push_back(Ball{mul(b->center, R), b->radius * R});
        else if (const auto* b = std::get_if<Box>(&prim))
            out.primitives.push_back(Box{mul(b->min, R), mul(b->max, R)});
        else if (const auto* s = std::get_if<Segment>(&prim))
            out.primitives.push_back(Segment{mul(s->p, R), mul(s->q, R)});
        else {
            const auto& c = std::get<Cylinder>(prim);
            out.primitives.push_back(Cylinder{mul(c.base_center, R), c.axis,
                                              c.radius * R, c.height * R});
        }
    }
    return out;
}

double Raster::cell_volume() const {
    return d == 2 ? cell : cell * cell;
}

double Raster::area() const {
    size_t count = 0;
    for (uint8_t o : occupied) count += o;
    return static_cast<double>(count) * cell_volume();
}

Point Raster::lift(int i, int j) const {
    const double c0 = lo0 + (i + 0.5) * cell;
    Point z = mul(u, c0);
    if (d == 3) {
        const double c1 = lo1 + (j + 0.5) * cell;
        z = add(z, mul(w, c1));
    }
    return add(z, mul(e, height[idx(i, j)]));
}

bool Raster::on_lifted_surface(const Point& xi, double tol) const {
    const double c0 = dot(xi, u, d);
    const int i = static_cast<int>(std::floor((c0 - lo0) / cell));
    if (i < 0 || i >= n0) return false;
    int j = 0;
    if (d == 3) {
        const double c1 = dot(xi, w, d);
        j = static_cast<int>(std::floor((c1 - lo1) / cell));
        if (j < 0 || j >= n1) return false;
    }
    if (!cell_occupied(i, j)) return false;
    return std::fabs(dot(xi, e, d) - height[idx(i, j)]) <= tol;
}

double Raster::jump_fraction(double jump_factor) const {
    size_t occ = 0, flagged = 0;
    for (int j = 0; j < n1; ++j) {
        for (int i = 0; i < n0; ++i) {
            if (!cell_occupied(i, j)) continue;
            ++occ;
            const double h = height[idx(i, j)];
            bool jump = false;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < (d == 2 ? 2 : 4); ++k) {
                const int ii = i + di[k], jj = j + dj[k];
                if (ii < 0 || ii >= n0 || jj < 0 || jj >= n1) continue;
                if (!cell_occupied(ii, jj)) continue;
                if (std::fabs(h - height[idx(ii, jj)]) > jump_factor * cell) {
                    jump = true;
                    break;
                }
            }
            if (jump) ++flagged;
        }
    }
    return occ == 0 ? 0.0 : static_cast<double>(flagged) / occ;
}

Raster project(const ShapeSpec& shape, const Direction& dir, double cell) {
    shape.validate();
    const double R = r_out(shape);
    if (!(cell > 0.0) || cell > R / 8.0)
        throw std::domain_error("project: need 0 < cell <= r_out/8");

    Raster r;
    r.d = shape.d;
    r.cell = cell;
    r.e = dir.e;
    // plane basis orthogonal to e
    if (shape.d == 2) {
        r.u = {-dir.e[1], dir.e[0], 0.0};
        r.w = {0.0, 0.0, 0.0};
    } else {
        Point seed = std::fabs(dir.e[0]) < 0.9 ? Point{1.0, 0.0, 0.0}
                                               : Point{0.0, 1.0, 0.0};
        const double c = dot(seed, dir.e, 3);
        Point u = sub(seed, mul(dir.e, c));
        u = mul(u, 1.0 / norm(u, 3));
        r.u = u;
        r.w = {dir.e[1] * u[2] - dir.e[2] * u[1],
               dir.e[2] * u[0] - dir.e[0] * u[2],
               dir.e[0] * u[1] - dir.e[1] * u[0]};
    }
    const double span = R + 2.0 * cell;
    r.lo0 = -span;
    r.lo1 = -span;
    r.n0 = static_cast<int>(std::ceil(2.0 * span / cell));
    r.n1 = shape.d == 3 ? r.n0 : 1;
    r.height.assign(static_cast<size_t>(r.n0) * r.n1, -kInf);
    r.occupied.assign(static_cast<size_t>(r.n0) * r.n1, 0);

    for (int j = 0; j < r.n1; ++j) {
        for (int i = 0; i < r.n0; ++i) {
            const double c0 = r.lo0 + (i + 0.5) * cell;
            Point z = mul(r.u, c0);
            if (shape.d == 3) {
                const double c1 = r.lo1 + (j + 0.5) * cell;
                z = add(z, mul(r.w, c1));
            }
            double h = -kInf;
            for (const auto& prim : shape.primitives)
                h = std::max(h, primitive_ray_exit(prim, z, r.e, shape.d));
            if (h > -kInf) {
                r.height[r.idx(i, j)] = h;
                r.occupied[r.idx(i, j)] = 1;
            }
        }
    }
    return r;
}

double m_measure(const ShapeSpec& shape, const Direction& dir, double cell,
                 const std::function<bool(const Point&)>& selector) {
    const Raster r = project(shape, dir, cell);
    double total = 0.0;
    for (int j = 0; j < r.n1; ++j)
        for (int i = 0; i < r.n0; ++i)
            if (r.cell_occupied(i, j) && selector(r.lift(i, j)))
                total += r.cell_volume();
    return total;
}

// --- JSON ----------------------------------------------------------------

namespace {

using nlohmann::json;

Point parse_point(const json& arr, int d, const char* what) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != d)
        throw std::invalid_argument(std::string("ShapeSpec: ") + what +
                                    " must be an array of length d");
    Point p{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) p[i] = arr[i].get<double>();
    return p;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) known = true;
        if (!known)
            throw std::invalid_argument(std::string("ShapeSpec: unknown field '") +
                                        it.key() + "' in " + where);
    }
}

}  // namespace

ShapeSpec ShapeSpec::from_json_text(const std::string& text) {
    json doc = json::parse(text);
    reject_unknown(doc, {"d", "primitives"}, "shape");
    ShapeSpec s;
    s.d = doc.at("d").get<int>();
    if (s.d != 2 && s.d != 3)
        throw std::invalid_argument("ShapeSpec: d must be 2 or 3");
    for (const auto& pj : doc.at("primitives")) {
        if (!pj.is_object() || pj.size() != 1)
            throw std::invalid_argument(
                "ShapeSpec: each primitive must be a single-key object");
        if (pj.contains("ball")) {
            const auto& b = pj["ball"];
            reject_unknown(b, {"center", "radius"}, "ball");
            s.primitives.push_back(Ball{parse_point(b.at("center"), s.d, "center"),
                                        b.at("radius").get<double>()});
        } else if (pj.contains("box")) {
            const auto& b = pj["box"];
            reject_unknown(b, {"min", "max"}, "box");
            s.primitives.push_back(Box{parse_point(b.at("min"), s.d, "min"),
                                       parse_point(b.at("max"), s.d, "max")});
        } else if (pj.contains("segment")) {
            const auto& b = pj["segment"];
            reject_unknown(b, {"p", "q"}, "segment");
            s.primitives.push_back(Segment{parse_point(b.at("p"), s.d, "p"),
                                           parse_point(b.at("q"), s.d, "q")});
        } else if (pj.contains("cylinder")) {
            const auto& b = pj["cylinder"];
            reject_unknown(b, {"base_center", "axis", "radius", "height"},
                           "cylinder");
            Cylinder c{parse_point(b.at("base_center"), s.d, "base_center"),
                       parse_point(b.at("axis"), s.d, "axis"),
                       b.at("radius").get<double>(),
                       b.at("height").get<double>()};
            const double n = norm(c.axis, 3);
            if (n > 0.0) c.axis = mul(c.axis, 1.0 / n);
            s.primitives.push_back(c);
        } else {
            throw std::invalid_argument("ShapeSpec: unknown primitive type");
        }
    }
    s.validate();
    return s;
}

std::string ShapeSpec::to_json_text() const {
    json doc;
    doc["d"] = d;
    doc["primitives"] = json::array();
    auto pt = [&](const Point& p) {
        json a = json::array();
        for (int i = 0; i < d; ++i) a.push_back(p[i]);
        return a;
    };
    for (const auto& prim : primitives) {
        json pj;
        if (const auto* b = std::get_if<Ball>(&prim))
            pj["ball"] = {{"center", pt(b->center)}, {"radius", b->radius}};
        else if (const auto* b = std::get_if<Box>(&prim))
            pj["box"] = {{"min", pt(b->min)}, {"max", pt(b->max)}};
        else if (const auto* s = std::get_if<Segment>(&prim))
            pj["segment"] = {{"p", pt(s->p)}, {"q", pt(s->q)}};
        else {
            const auto& c = std::get<Cylinder>(prim);
            pj["cylinder"] = {{"base_center", pt(c.base_center)},
                              {"axis", pt(c.axis)},
                              {"radius", c.radius},
                              {"height", c.height}};
        }
        doc["primitives"].push_back(pj);
    }
    return doc.dump();
}

}  // namespace bmlab::geometry
