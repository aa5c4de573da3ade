#pragma once

#include "nueg/periodic.hpp"
#include "nueg/polytope.hpp"
#include "nueg/types.hpp"

#include <array>
#include <cstdint>

namespace nueg::geometry {

// x -> R x + t with R in SO(d).
struct Isometry {
  Matrix rotation;
  Point translation;

  static Isometry identity(int d);
  int dim() const { return static_cast<int>(rotation.rows()); }
  Point apply(const Point& x) const { return rotation * x + translation; }
  Isometry inverse() const;
  // (this o other)(x) = this(other(x))
  Isometry compose(const Isometry& other) const;
  // Throws unless R^T R = I and det R = 1 within tol.
  void validate(double tol = 1e-12) const;
};

enum class DomainKind { Cube, Tetrahedron, Polytope };

// Bounded convex domain in R^d. Everything is stored as a convex polytope:
// vertex list, outward facets and the matching half-space description.
class Domain {
public:
  // Open cube (-side/2, side/2)^d + center.
  static Domain cube(int d, double side, const Point& center = Point());
  // scale * (reference tetrahedron), then moved by `iso`.
  static Domain tetrahedron(double scale, const Isometry& iso = Isometry::identity(3));
  // Convex hull of the given points.
  static Domain polytope(const PointList& vertices);

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double volume() const { return volume_; }
  // Perimeter in 2D, surface area in 3D, number of endpoints (2) in 1D.
  double boundary_area() const { return boundary_; }
  double scale() const { return scale_; }
  const PointList& vertices() const { return vertices_; }
  const Point& bbox_lo() const { return lo_; }
  const Point& bbox_hi() const { return hi_; }
  double diameter() const;

  // Facet normals (rows) and offsets: x inside iff normals * x <= offsets.
  const Matrix& normals() const { return normals_; }
  const Vector& offsets() const { return offsets_; }
  std::vector<Halfspace> halfspaces() const;

  bool contains(const Point& x) const;  // closed
  bool contains_open(const Point& x, double tol = 0.0) const;
  double distance_to_boundary(const Point& x) const;

  Domain transformed(const Isometry& iso) const;

private:
  static Domain from_hull(int d, const PointList& vertices, DomainKind kind, double scale);

  DomainKind kind_ = DomainKind::Polytope;
  int dim_ = 0;
  double volume_ = 0.0;
  double boundary_ = 0.0;
  double scale_ = 1.0;
  PointList vertices_;
  std::vector<std::vector<int>> facets_;  // vertex indices, cyclic in 3D, pairs in 2D
  Matrix normals_;
  Vector offsets_;
  Point lo_, hi_;
};

// The 24 tetrahedra spanned by the centre of C_1 = (-1/2,1/2)^3, a face
// centre and one edge of that face. Tile j = T_j(ref) with T_j(x) = R_j x - z_j.
struct Tiling24 {
  std::array<Matrix3, 24> rotation;
  std::array<Vector3, 24> shift;       // z_j
  std::array<Vector3, 4> reference;    // vertices of the reference tetrahedron, barycentre 0
  Vector3 base_barycenter;             // barycentre of tile 0 inside C_1

  Vector3 map(int j, const Vector3& x) const { return rotation[j] * x - shift[j]; }
  Vector3 unmap(int j, const Vector3& y) const { return rotation[j].transpose() * (y + shift[j]); }
  std::array<Vector3, 4> tile_vertices(int j, double scale = 1.0, double shrink = 1.0) const;
  // Smallest barycentric coordinate of x in tile j (positive iff in the open tile).
  double barycentric_margin(int j, const Vector3& x, double scale = 1.0) const;
  // Index of the open tile containing x in C_1 scaled by `scale`, or -1 when x
  // lies within `tol` (barycentric) of a tile boundary.
  int locate(const Vector3& x, double scale = 1.0, double tol = 0.0) const;
};

const Tiling24& tiling24();

// Seeded low-discrepancy sample of SO(d). d=1: the identity only.
std::vector<Matrix> so_quadrature(int d, int n, std::uint64_t seed);

// |{x : dist(x, boundary) <= |Omega|^{1/d} t}| / |Omega| by Monte Carlo. With
// include_exterior the shell outside Omega is counted as well.
double fisher_regularity(const Domain& domain, double t, std::uint64_t seed, int samples = 200000,
                         bool include_exterior = false);

// Radial bump exp(-1/(1-r^2)) on the unit ball, normalised to unit mass and
// scaled to support radius b*delta.
struct Mollifier {
  double delta = 1.0;
  double b = 1.0;
  int dim = 3;

  double radius() const { return b * delta; }
  double operator()(const Point& x) const;
  // Integral by radial Gauss-Legendre, for checking the normalisation.
  double mass() const;
  // C with int |grad sqrt(1_Omega * eta)|^2 <= C |boundary| / delta for convex
  // Omega: (1/2b) int |grad eta|^2 / eta of the unit profile. Cauchy-Schwarz
  // gives |grad sqrt f|^2 <= (1_Omega * |grad eta|^2/eta) / 4, and only the
  // inner shell of width 2 b delta feeds the region where f < 1.
  double kinetic_constant() const;
  // Flat-boundary value: integral of ((sqrt Phi)')^2 for the unit profile's
  // marginal, divided by b. Edges and corners push cubes above it.
  double half_space_constant() const;
};

// 1_Omega * eta on a uniform 3D grid with cell width h. Cell values are the
// exact cell fractions of Omega convolved with the discrete kernel.
struct SmearedIndicator {
  Vector3 origin;              // lower corner of cell (0,0,0)
  double h = 0.0;
  std::array<int, 3> shape{};
  std::vector<double> values;
  bool empty_core = false;     // delta exceeds the inradius: no "== 1" region

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k;
  }
  Vector3 cell_center(int i, int j, int k) const {
    return origin + h * Vector3(i + 0.5, j + 0.5, k + 0.5);
  }
  double integral() const;
};

SmearedIndicator smear(const Domain& domain, const Mollifier& m, double h = 0.0);

// Integral of |grad sqrt(S)|^2 by forward differences on the grid of S.
double smeared_kinetic(const SmearedIndicator& s);
double smeared_kinetic(const Domain& domain, const Mollifier& m, double h = 0.0);

// (l Z^3)-periodic field sum_{z,j} 1_{l T_j(shrink ref)} * eta(. - l z) on an
// n^3 cell-centred grid.
periodic::PeriodicField smeared_tiles(double ell, double shrink, const Mollifier& m, int n);

// b must stay below a third of the smallest barycentre-to-face distance of
// the reference tile (0.0884), or the shrunken smeared tiles reach into the
// skeleton's support.
struct SkeletonOptions {
  double b = 0.025;
  int cells_per_delta = 16;
};

// Skeleton function completing the shrunken smeared tiles to a partition of unity.
periodic::PeriodicField skeleton(double ell, double delta, const SkeletonOptions& opt = {});

// Grid size used by skeleton() for (ell, delta).
int skeleton_grid(double ell, double delta, const SkeletonOptions& opt = {});

} // namespace nueg::geometry
