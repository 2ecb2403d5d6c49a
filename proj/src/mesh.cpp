#include "mlfsi/mesh.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mlfsi/errors.hpp"

namespace mlfsi {

void GeometryConfig::validate() const {
  std::ostringstream err;
  if (!(length > 0.0)) err << "geometry: L must be > 0; ";
  if (!(radius > 0.0)) err << "geometry: R must be > 0; ";
  if (!(thickness > 0.0)) err << "geometry: H must be > 0; ";
  if (nz < 2) err << "geometry: nz must be >= 2 (got " << nz << "); ";
  if (nr_fluid < 2) err << "geometry: nr_fluid must be >= 2 (got " << nr_fluid << "); ";
  if (nr_solid < 1) err << "geometry: nr_solid must be >= 1 (got " << nr_solid << "); ";
  if (!err.str().empty()) throw ConfigError(err.str());
}

namespace {

FemMesh build_rectangle(double z0, double r0, double lz, double lr, int nz, int nr) {
  FemMesh m;
  m.z0 = z0;
  m.r0 = r0;
  m.lz = lz;
  m.lr = lr;
  m.nz = nz;
  m.nr = nr;
  const std::size_t nzn = m.nodes_z();
  const std::size_t nrn = m.nodes_r();
  m.node_z.resize(nzn * nrn);
  m.node_r.resize(nzn * nrn);
  m.node_tags.assign(nzn * nrn, 0);
  for (std::size_t j = 0; j < nrn; ++j) {
    for (std::size_t i = 0; i < nzn; ++i) {
      const std::size_t k = m.node_index(i, j);
      // Exact end coordinates; interior nodes by uniform subdivision.
      m.node_z[k] = (i == nzn - 1) ? z0 + lz : z0 + lz * static_cast<double>(i) / (nzn - 1);
      m.node_r[k] = (j == nrn - 1) ? r0 + lr : r0 + lr * static_cast<double>(j) / (nrn - 1);
    }
  }
  const std::size_t pz = static_cast<std::size_t>(nz) + 1;
  const std::size_t pr = static_cast<std::size_t>(nr) + 1;
  m.pnode_z.resize(pz * pr);
  m.pnode_r.resize(pz * pr);
  for (std::size_t j = 0; j < pr; ++j)
    for (std::size_t i = 0; i < pz; ++i) {
      m.pnode_z[j * pz + i] = m.node_z[m.node_index(2 * i, 2 * j)];
      m.pnode_r[j * pz + i] = m.node_r[m.node_index(2 * i, 2 * j)];
    }
  return m;
}

void tag_edges(FemMesh& m, std::uint8_t left, std::uint8_t right, std::uint8_t bottom,
               std::uint8_t top) {
  const std::size_t nzn = m.nodes_z();
  const std::size_t nrn = m.nodes_r();
  for (std::size_t j = 0; j < nrn; ++j) {
    for (std::size_t i = 0; i < nzn; ++i) {
      std::uint8_t& t = m.node_tags[m.node_index(i, j)];
      if (i == 0) t |= left;
      if (i == nzn - 1) t |= right;
      if (j == 0) t |= bottom;
      if (j == nrn - 1) t |= top;
    }
  }
}

}  // namespace

std::array<std::size_t, 9> FemMesh::element_nodes(std::size_t e) const {
  const std::size_t ez = e % static_cast<std::size_t>(nz);
  const std::size_t er = e / static_cast<std::size_t>(nz);
  std::array<std::size_t, 9> out{};
  for (std::size_t b = 0; b < 3; ++b)
    for (std::size_t a = 0; a < 3; ++a) out[a + 3 * b] = node_index(2 * ez + a, 2 * er + b);
  return out;
}

std::array<std::size_t, 4> FemMesh::element_pressure_nodes(std::size_t e) const {
  const std::size_t ez = e % static_cast<std::size_t>(nz);
  const std::size_t er = e / static_cast<std::size_t>(nz);
  const std::size_t pz = static_cast<std::size_t>(nz) + 1;
  std::array<std::size_t, 4> out{};
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t a = 0; a < 2; ++a) out[a + 2 * b] = (er + b) * pz + (ez + a);
  return out;
}

double FemMesh::element_area(std::size_t e) const {
  const auto n = element_nodes(e);
  // Shoelace over the four corners (local 0, 2, 8, 6).
  const std::array<std::size_t, 4> c{n[0], n[2], n[8], n[6]};
  double a = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::size_t p = c[k];
    const std::size_t q = c[(k + 1) % 4];
    a += node_z[p] * node_r[q] - node_z[q] * node_r[p];
  }
  return 0.5 * a;
}

FemMesh build_fluid_mesh(const GeometryConfig& cfg) {
  cfg.validate();
  FemMesh m = build_rectangle(0.0, 0.0, cfg.length, cfg.radius, cfg.nz, cfg.nr_fluid);
  tag_edges(m, kInlet, kOutlet, kAxis, kInterface);
  return m;
}

FemMesh build_solid_mesh(const GeometryConfig& cfg) {
  cfg.validate();
  FemMesh m =
      build_rectangle(0.0, cfg.radius, cfg.length, cfg.thickness, cfg.nz, cfg.nr_solid);
  tag_edges(m, kSolidInlet, kSolidOutlet, kInterface, kExternal);
  return m;
}

InterfaceMaps build_interface_maps(const FemMesh& fluid, const FemMesh& solid) {
  if (fluid.nodes_z() != solid.nodes_z())
    throw MeshError("interface: fluid and solid meshes have different axial node counts");
  const std::size_t n = fluid.nodes_z();
  const std::size_t top = fluid.nodes_r() - 1;
  InterfaceMaps maps;
  maps.triples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t fn = fluid.node_index(i, top);
    const std::size_t sn = solid.node_index(i, 0);
    const double dz = std::abs(fluid.node_z[fn] - solid.node_z[sn]);
    const double dr = std::abs(fluid.node_r[fn] - solid.node_r[sn]);
    if (dz > 1e-12 || dr > 1e-12) {
      std::ostringstream os;
      os << "interface: node " << i << " mismatch (dz=" << dz << ", dr=" << dr << ")";
      throw MeshError(os.str());
    }
    if (!fluid.has_tag(fn, kInterface) || !solid.has_tag(sn, kInterface))
      throw MeshError("interface: node " + std::to_string(i) + " is not tagged as interface");
    maps.triples.push_back({2 * fn + 1, i, 2 * sn + 1, i == 0 || i == n - 1});
    maps.wall_z.push_back(fluid.node_z[fn]);
    maps.pinned_solid_dofs.push_back(2 * sn);
    maps.fluid_nodes.push_back(fn);
    maps.solid_nodes.push_back(sn);
  }
  return maps;
}

}  // namespace mlfsi
