#pragma once

#include "coneflow/field.hpp"
#include "coneflow/quad.hpp"

namespace coneflow {

struct MollifySpec {
    int nodes_per_axis = 40;
};

// Smooths f by convolution with the tensor-product bump kernel supported in
// the unit max-norm ball: f_eps(t, x) = sum_i W_i f(t, x - eps s_i), where
// (s_i, W_i) is the Gauss-Legendre discretization of rho per axis with the
// discrete weights renormalized to unit mass. The returned field lives on
// the shrunken domain; its Jacobian is the same quadrature applied to f's
// Jacobian when present.
VectorField mollify(const VectorField& field, double epsilon, MollifySpec spec = {});

// Defect of the discrete kernel mass before renormalization (diagnostic for
// the quadrature resolution).
double mollifier_mass_defect(int nodes_per_axis, std::size_t dim);

}  // namespace coneflow
