#pragma once

#include "macflow/fields.hpp"
#include "macflow/mesh.hpp"
#include "macflow/operators.hpp"

/// Serial scatter-form kernels. They loop over the entity that owns each
/// flux and add it to both neighbours, the opposite traversal of the
/// gather kernels in operators.hpp. Kept for cross-checking and benchmarks.
namespace macflow::reference {

CellScalarField divergence(const MacMesh& mesh, const VelocityField& u);
VelocityField pressure_gradient(const MacMesh& mesh, const CellScalarField& p);
DualTensorField velocity_gradient(const MacMesh& mesh, const VelocityField& u);
VelocityField diffusion_apply(const MacMesh& mesh, const ViscosityTensorField& mu, const VelocityField& u);
MassFluxSet mass_fluxes(const MacMesh& mesh, const CellScalarField& rho, const VelocityField& u);
VelocityField convection_apply(const MacMesh& mesh, const MassFluxSet& fluxes, const VelocityField& v,
                               AdvectionScheme scheme);

}  // namespace macflow::reference
