#pragma once

#include "md2d/field.hpp"

namespace md2d {

/// psi0 in L^2, divergence-free electric data E0df and magnetic data B03.
struct ChargeClassData {
  Spinor psi0;
  VecField E0df;
  ComplexField2D B03;

  const Grid2D& grid() const { return psi0[0].grid(); }

  static ChargeClassData zero(const Grid2D& g) {
    ChargeClassData d;
    for (auto& c : d.psi0) c = ComplexField2D(g, Representation::physical);
    for (auto& c : d.E0df) c = ComplexField2D(g, Representation::physical);
    d.B03 = ComplexField2D(g, Representation::physical);
    return d;
  }
};

/// Lorenz-gauge potential A_mu (lower index) and its time derivative.
struct PotentialState {
  FieldArray<3> A;
  FieldArray<3> At;

  static PotentialState zero(const Grid2D& g, Representation r = Representation::fourier) {
    PotentialState p;
    for (auto& c : p.A) c = ComplexField2D(g, r);
    for (auto& c : p.At) c = ComplexField2D(g, r);
    return p;
  }
};

/// J^mu = <alpha^mu psi, psi> (upper index).
struct Current {
  ComplexField2D J0, J1, J2;
  const ComplexField2D& operator[](int mu) const { return mu == 0 ? J0 : (mu == 1 ? J1 : J2); }
  ComplexField2D& operator[](int mu) { return mu == 0 ? J0 : (mu == 1 ? J1 : J2); }
};

/// Split electromagnetic fields E^df_pm and B^3_pm.
struct EMSplit {
  VecField Edf_plus, Edf_minus;
  ComplexField2D B3_plus, B3_minus;
};

/// Fields reconstructed from a potential.
struct EMFields {
  VecField E;
  ComplexField2D B3;
  VecField Edf;
};

}  // namespace md2d
