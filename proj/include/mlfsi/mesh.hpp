#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mlfsi {

/// Dimensions and resolution of the fluid channel (0,L)x(0,R) and the thick wall (0,L)x(R,R+H).
/// A single config drives both meshes so their interface partitions always agree.
struct GeometryConfig {
  double length = 1.0;     // L
  double radius = 1.0;     // R
  double thickness = 1.0;  // H
  int nz = 8;              // interface elements (>= 2)
  int nr_fluid = 8;        // fluid radial elements (>= 2)
  int nr_solid = 1;        // solid radial elements (>= 1)

  /// Throws ConfigError listing every violated bound.
  void validate() const;
};

/// Boundary tags carried by mesh nodes. Corner nodes carry every incident tag.
enum BoundaryTag : std::uint8_t {
  kInterface = 1u << 0,    // fluid r = R, solid r = R
  kInlet = 1u << 1,        // fluid z = 0
  kOutlet = 1u << 2,       // fluid z = L
  kAxis = 1u << 3,         // fluid r = 0 (symmetry)
  kSolidInlet = 1u << 4,   // solid z = 0
  kSolidOutlet = 1u << 5,  // solid z = L
  kExternal = 1u << 6,     // solid r = R + H
};

/// Structured tensor-product quadrilateral mesh with biquadratic (Q2) nodes for vector
/// fields and bilinear (Q1) nodes for pressure.
///
/// Q2 node (i, j), 0 <= i <= 2*nz, 0 <= j <= 2*nr, has index j*(2*nz+1) + i.
/// Q1 node (i, j), 0 <= i <= nz, 0 <= j <= nr, has index j*(nz+1) + i.
/// Element (ez, er) has index er*nz + ez.  Vector DOFs are interleaved: 2*node + component,
/// component 0 = z, 1 = r.
struct FemMesh {
  double z0 = 0.0, r0 = 0.0;  // lower-left corner
  double lz = 1.0, lr = 1.0;  // extents
  int nz = 0, nr = 0;

  std::vector<double> node_z, node_r;  // Q2 node coordinates
  std::vector<std::uint8_t> node_tags;  // Q2 node boundary tags
  std::vector<double> pnode_z, pnode_r; // Q1 node coordinates

  std::size_t element_count() const { return static_cast<std::size_t>(nz) * nr; }
  std::size_t nodes_z() const { return 2 * static_cast<std::size_t>(nz) + 1; }
  std::size_t nodes_r() const { return 2 * static_cast<std::size_t>(nr) + 1; }
  std::size_t node_count() const { return node_z.size(); }
  std::size_t pressure_node_count() const { return pnode_z.size(); }
  std::size_t vector_dof_count() const { return 2 * node_count(); }

  std::size_t node_index(std::size_t i, std::size_t j) const { return j * nodes_z() + i; }

  /// Global Q2 node indices of element e, local ordering a + 3*b.
  std::array<std::size_t, 9> element_nodes(std::size_t e) const;
  /// Global Q1 node indices of element e, local ordering a + 2*b.
  std::array<std::size_t, 4> element_pressure_nodes(std::size_t e) const;

  double element_hz() const { return lz / nz; }
  double element_hr() const { return lr / nr; }
  /// Signed area of element e computed from its corner nodes.
  double element_area(std::size_t e) const;

  bool has_tag(std::size_t node, BoundaryTag tag) const { return (node_tags[node] & tag) != 0; }
};

FemMesh build_fluid_mesh(const GeometryConfig& cfg);
FemMesh build_solid_mesh(const GeometryConfig& cfg);

/// One interface node seen from the three coupled fields.
struct InterfaceTriple {
  std::size_t fluid_radial_dof;  // velocity DOF of u_r at the fluid node on r = R
  std::size_t wall_node;         // thin-wall node (index into eta / v)
  std::size_t solid_radial_dof;  // displacement DOF of d_r at the solid node on r = R
  bool dirichlet;                // thin-wall end point (eta = 0)
};

/// Identification of the fluid trace, the thin wall and the thick-wall bottom trace.
struct InterfaceMaps {
  std::vector<InterfaceTriple> triples;     // ordered by z
  std::vector<double> wall_z;               // z coordinate of each thin-wall node
  std::vector<std::size_t> pinned_solid_dofs;  // d_z DOFs on r = R
  std::vector<std::size_t> fluid_nodes;     // fluid Q2 node per wall node
  std::vector<std::size_t> solid_nodes;     // solid Q2 node per wall node

  std::size_t wall_node_count() const { return triples.size(); }
};

/// Throws MeshError if the interface coordinates differ by more than 1e-12.
InterfaceMaps build_interface_maps(const FemMesh& fluid, const FemMesh& solid);

}  // namespace mlfsi
