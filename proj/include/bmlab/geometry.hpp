#pragma once

// Bounded sets A in R^d (d = 2, 3) as unions of closed primitives with
// closed-form ray intersections, plus directional projections, height
// functions and the projected surface measure on the e-facing boundary.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace bmlab::geometry {

using Point = std::array<double, 3>;  // third component unused when d == 2

double dot(const Point& a, const Point& b, int d);
double norm(const Point& a, int d);
Point sub(const Point& a, const Point& b);
Point add(const Point& a, const Point& b);
Point mul(const Point& a, double s);

struct Ball {
    Point center{};
    double radius = 0.0;
};

struct Box {
    Point min{};
    Point max{};
};

// d = 2 only; a closed line segment (measure-zero but non-polar).
struct Segment {
    Point p{};
    Point q{};
};

// d = 3 only; solid capped cylinder.
struct Cylinder {
    Point base_center{};
    Point axis{};  // unit vector
    double radius = 0.0;
    double height = 0.0;
};

using Primitive = std::variant<Ball, Box, Segment, Cylinder>;

struct ShapeSpec {
    int d = 3;
    std::vector<Primitive> primitives;

    void validate() const;

    // {"d":3,"primitives":[{"ball":{"center":[0,0,0],"radius":1.0}},...]}
    // Unknown fields are rejected.
    static ShapeSpec from_json_text(const std::string& text);
    std::string to_json_text() const;
};

// Unit direction in R^d.
struct Direction {
    Point e{};
    static Direction make(const Point& v, int d);
};

// Membership in the closed union.  Segments, being measure-zero, answer
// true only within a 1e-12 slab.
bool contains(const ShapeSpec& shape, const Point& p);

// R_A = sup{|y| : y in A}, exact per primitive.
double r_out(const ShapeSpec& shape);

// Distance to the union (negative inside a solid primitive).
double signed_distance(const ShapeSpec& shape, const Point& p);

// Every primitive scaled about the origin by R > 0.
ShapeSpec scale(const ShapeSpec& shape, double R);

// Raster of the projection pr_e K on the plane through the origin
// perpendicular to e, with the per-cell height h(z) = sup{s : z + s e in K}
// evaluated at cell centers.  For d = 2 the grid is one-dimensional.
struct Raster {
    int d = 3;
    double cell = 0.0;
    Point e{}, u{}, w{};       // axis and plane basis (w unused when d == 2)
    double lo0 = 0.0, lo1 = 0.0;
    int n0 = 0, n1 = 1;
    std::vector<double> height;     // -inf outside pr_e K
    std::vector<uint8_t> occupied;

    double cell_volume() const;     // cell^{d-1}
    double area() const;            // (#occupied) * cell^{d-1}
    bool cell_occupied(int i, int j) const { return occupied[idx(i, j)] != 0; }
    double cell_height(int i, int j) const { return height[idx(i, j)]; }
    Point lift(int i, int j) const;  // z + h(z) e for the cell center
    size_t idx(int i, int j) const { return static_cast<size_t>(j) * n0 + i; }

    // True if xi projects into an occupied cell whose lifted height matches
    // xi's axial coordinate within tol.
    bool on_lifted_surface(const Point& xi, double tol) const;

    // Fraction of occupied cells whose height jumps by more than
    // jump_factor * cell against an occupied neighbor (empirical stand-in
    // for the discontinuity-set smallness hypothesis).
    double jump_fraction(double jump_factor = 8.0) const;
};

// Requires cell <= r_out(shape) / 8.
Raster project(const ShapeSpec& shape, const Direction& e, double cell);

// m_{K,e}(E) approximated on the raster: sums cell^{d-1} over occupied
// cells whose lifted point satisfies the selector.
double m_measure(const ShapeSpec& shape, const Direction& e, double cell,
                 const std::function<bool(const Point&)>& selector);

}  // namespace bmlab::geometry
