#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "macflow/exec.hpp"
#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"

namespace macflow {

// Primal operators ------------------------------------------------------------

/// (div u)_K = (1/|K|) sum_sigma |sigma| u_{K,sigma}.
CellScalarField divergence(const MacMesh& mesh, const VelocityField& u, Exec exec = {});

/// (grad p)_sigma = |sigma| / |D_sigma| (p_hi - p_lo) on interior faces, 0 elsewhere.
VelocityField pressure_gradient(const MacMesh& mesh, const CellScalarField& p, Exec exec = {});

/// d_j u_i on the (i, j) dual-dual cells. Missing neighbours count as zero
/// (homogeneous Dirichlet), which gives the one-sided boundary quotient.
DualGridField velocity_gradient(const MacMesh& mesh, const FaceScalars& ui, int j, Exec exec = {});
DualTensorField velocity_gradient(const MacMesh& mesh, const VelocityField& u, Exec exec = {});

/// Symmetric part 1/2 (d_j u_i + d_i u_j).
DualTensorField strain_tensor(const MacMesh& mesh, const VelocityField& u, Exec exec = {});

// Viscosity -------------------------------------------------------------------

using ViscosityLaw = std::function<double(double)>;

struct ViscosityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ViscosityTensorField {
  CellScalarField cell;  // mu_K
  DualTensorField dual;  // mu on each (i, j) dual-dual cell
};

/// mu_K = law(rho_K), then overlap-weighted averages on the dual-dual cells.
/// Throws ViscosityError if the law returns a non-positive or non-finite value.
ViscosityTensorField viscosity_tensor(const MacMesh& mesh, const CellScalarField& rho, const ViscosityLaw& law,
                                      Exec exec = {});

/// Same averaging from given cell viscosities.
ViscosityTensorField viscosity_from_cells(const MacMesh& mesh, const CellScalarField& mu, Exec exec = {});

/// div_E(mu D(u)); zero on boundary faces.
VelocityField diffusion_apply(const MacMesh& mesh, const ViscosityTensorField& mu, const VelocityField& u,
                              Exec exec = {});

// Mass fluxes -----------------------------------------------------------------

/// Face and dual-face mass fluxes for one (rho, u) pair.
///
/// flux[i][s] is the mass flux through sigma in direction +e_i, so that
/// F_{K,sigma} = +flux for the lower cell and -flux for the upper one.
/// dual(i, j)[t] is the dual flux through the (i, j) dual face along +e_j;
/// F_{sigma, dual} = sign * dual(i, j)[t] with the sign stored in DualRef.
struct MassFluxSet {
  FaceField rho_face;      // upwind density rho_sigma
  FaceField flux;          // |sigma| rho_sigma u_sigma
  DualTensorField dual;    // G
  DualTensorField dual_rho;  // rho on the dual face
  DualTensorField dual_u;    // u-hat on the dual face

  /// F_{K,sigma} for sigma in E^(i) seen from cell K.
  double outward(const MacMesh& mesh, int k, int i, int s) const;
};

/// Upwind face densities and primal fluxes. Ties u_sigma == 0 take the
/// lower cell.
MassFluxSet primal_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u,
                          Exec exec = {});

/// Fills the dual part of `fluxes` (needs the primal part and the velocity
/// it was built from).
void dual_fluxes(const MacMesh& mesh, const VelocityField& u, MassFluxSet& fluxes, Exec exec = {});

/// primal_fluxes followed by dual_fluxes.
MassFluxSet mass_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u, Exec exec = {});

/// |D_sigma| rho_D = |D_{K,sigma}| rho_K + |D_{L,sigma}| rho_L for every direction.
FaceField dual_cell_density(const MacMesh& mesh, const CellScalarField& rho, Exec exec = {});

// Convection ------------------------------------------------------------------

enum class AdvectionScheme { kCentered, kUpwind };

/// "centered" or "upwind"; throws std::invalid_argument otherwise.
AdvectionScheme parse_advection_scheme(std::string_view name);
std::string to_string(AdvectionScheme scheme);

/// (C v)_sigma = (1/|D_sigma|) sum F_{sigma,dual} v_dual on interior faces.
VelocityField convection_apply(const MacMesh& mesh, const MassFluxSet& fluxes, const VelocityField& v,
                               AdvectionScheme scheme, Exec exec = {});

/// b_E = sum_i int (C v_i) w_i.
double trilinear(const MacMesh& mesh, const MassFluxSet& fluxes, const VelocityField& v, const VelocityField& w,
                 AdvectionScheme scheme, Exec exec = {});

/// b_E through reconstructions onto the dual-dual cells:
/// -sum_{i,j} int R(rho) R(u_j) R(v_i) d_j w_i, built from (rho, u) directly.
double trilinear_reconstructed(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u,
                               const VelocityField& v, const VelocityField& w, AdvectionScheme scheme);

/// Second form of the convection duality:
/// -sum_{i,j} sum_dual G v_dual (w_hi - w_lo).
double convection_dual_form(const MacMesh& mesh, const MassFluxSet& fluxes, const VelocityField& v,
                            const VelocityField& w, AdvectionScheme scheme);

}  // namespace macflow
