#pragma once

#include <array>
#include <functional>
#include <vector>

#include "macflow/mesh.hpp"

namespace macflow {

using ScalarFunction = std::function<double(const Vec3&)>;
using VectorFunction = std::function<Vec3(const Vec3&)>;

/// Piecewise constant scalar on primal cells (density, pressure, viscosity).
struct CellScalarField {
  std::vector<double> values;

  static CellScalarField zeros(const MacMesh& mesh) { return {std::vector<double>(mesh.num_cells(), 0.0)}; }
  static CellScalarField constant(const MacMesh& mesh, double c) {
    return {std::vector<double>(mesh.num_cells(), c)};
  }
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

/// One scalar per face of E^(i), piecewise constant on the dual cells D_sigma.
struct FaceScalars {
  int direction = 0;
  std::vector<double> values;

  static FaceScalars zeros(const MacMesh& mesh, int i) {
    return {i, std::vector<double>(mesh.num_faces(i), 0.0)};
  }
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

/// Staggered velocity: component i lives on E^(i). Fields in H_E,0 carry
/// exact zeros on boundary faces.
struct VelocityField {
  int dim = 2;
  std::array<std::vector<double>, kMaxDim> comp;

  static VelocityField zeros(const MacMesh& mesh);
  FaceScalars component(int i) const { return {i, comp[i]}; }
  /// Forces boundary-face entries to zero.
  void apply_dirichlet(const MacMesh& mesh);
  bool satisfies_dirichlet(const MacMesh& mesh) const;
};

/// Plain per-face storage for all d directions (no boundary semantics).
using FaceField = VelocityField;

/// One value per dual-dual cell of a fixed (i, j) partition.
struct DualGridField {
  int i = 0;
  int j = 0;
  std::vector<double> values;

  static DualGridField zeros(const MacMesh& mesh, int i, int j) {
    return {i, j, std::vector<double>(mesh.num_dual(i, j), 0.0)};
  }
};

/// d x d family of dual-grid fields; entry (i, j) lives on the (i, j) partition.
struct DualTensorField {
  int dim = 2;
  std::array<std::vector<double>, kMaxDim * kMaxDim> comp;

  static DualTensorField zeros(const MacMesh& mesh);
  std::vector<double>& operator()(int i, int j) { return comp[i * kMaxDim + j]; }
  const std::vector<double>& operator()(int i, int j) const { return comp[i * kMaxDim + j]; }
};

// Projections of continuous data ---------------------------------------------

/// Cell averages.
CellScalarField project_cell(const MacMesh& mesh, const ScalarFunction& f, int quadrature_order = 5);

enum class FaceProjection {
  kDualMean,  // component i averaged over D_sigma
  kFaceMean,  // component i averaged over sigma itself (Fortin operator)
};

/// Velocity projection; boundary faces are set to zero.
VelocityField project_face(const MacMesh& mesh, const VectorFunction& f,
                           FaceProjection kind = FaceProjection::kDualMean, int quadrature_order = 5);

// Reconstructions -------------------------------------------------------------

/// Cell values to faces of E^(i) by the |D_{K,sigma}| / |D_sigma| weighted average;
/// boundary faces take the value of their only cell.
FaceScalars reconstruct_cell_to_face(const MacMesh& mesh, const CellScalarField& q, int i);

/// Faces of E^(i) to cells: mean of the two direction-i faces of each cell.
CellScalarField reconstruct_face_to_cell(const MacMesh& mesh, const FaceScalars& v);

/// Faces of E^(i) to the (i, j) dual-dual cells with weight alpha[t] on the
/// lower face and 1 - alpha[t] on the upper one. On boundary dual faces the
/// single existing face value is scaled by alpha[t]. An empty alpha means 1/2.
DualGridField reconstruct_face_to_dual(const MacMesh& mesh, const FaceScalars& v, int j,
                                       const std::vector<double>& alpha = {});

// Norms and inner products ----------------------------------------------------

double norm_lp(const MacMesh& mesh, const CellScalarField& q, double p);
double norm_lp(const MacMesh& mesh, const FaceScalars& v, double p);
double norm_lp(const MacMesh& mesh, const DualGridField& v, double p);

double norm_l2(const MacMesh& mesh, const CellScalarField& q);
double norm_l2(const MacMesh& mesh, const VelocityField& u);

/// Discrete H^1_0 norm ||u||_{1,E,0}.
double norm_h1(const MacMesh& mesh, const VelocityField& u);

double integrate(const MacMesh& mesh, const CellScalarField& a, const CellScalarField& b);
double integrate(const MacMesh& mesh, const VelocityField& u, const VelocityField& v);
/// Integral of sum_{i,j} a_ij b_ij over the dual-dual partitions.
double integrate(const MacMesh& mesh, const DualTensorField& a, const DualTensorField& b);

double mean(const MacMesh& mesh, const CellScalarField& q);

/// Constant of the (i, j) reconstruction stability bound for d = 2:
/// max over sigma of (|D_lo| + |D_hi|) / |D_sigma| is at most 1 + eta^2.
double reconstruction_constant(double eta);

}  // namespace macflow
