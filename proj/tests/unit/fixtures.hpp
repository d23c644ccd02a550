#pragma once

#include <utility>

#include "urnclt/spectrum.hpp"

namespace urnclt::testfix {

// Balanced two-color urn with diagonal `diag`: eigenvalue 2*diag - 1 on
// the difference column (1, -1). Unit starting mass, symmetric start.
inline UrnModel two_color_model(double diag) {
  SpectralSpec s;
  s.k = 2;
  s.combination = Matrix::from_rows({{1.0, 1.0}, {1.0, -1.0}});
  JordanBlockSpec b;
  b.lambda_r = 2.0 * diag - 1.0;
  b.col_begin = 1;
  s.blocks.push_back(b);
  auto model = model_from_spectral_spec(s);
  model.set_initial_state({0.5, 0.5});
  return model;
}

// Four colors, orthogonal eigenbasis, one block per regime.
inline UrnModel haar_model(double l1 = 0.2, double l2 = 0.5, double l3 = 0.775) {
  SpectralSpec s;
  s.k = 4;
  s.combination = Matrix::from_rows({{1.0, 1.0, 0.0, 1.0},
                                     {1.0, -1.0, 0.0, 1.0},
                                     {1.0, 0.0, 1.0, -1.0},
                                     {1.0, 0.0, -1.0, -1.0}});
  double lams[3] = {l1, l2, l3};
  for (int i = 0; i < 3; ++i) {
    JordanBlockSpec b;
    b.lambda_r = lams[i];
    b.col_begin = 1 + i;
    s.blocks.push_back(b);
  }
  auto model = model_from_spectral_spec(s);
  model.set_initial_state({0.25, 0.25, 0.25, 0.25});
  return model;
}

// Three colors, two scalar supercritical blocks (0.75 and 0.8).
inline UrnModel two_super_model() {
  SpectralSpec s;
  s.k = 3;
  s.combination = Matrix::from_rows(
      {{1.0, 1.0, 1.0}, {1.0, -1.0, 0.0}, {1.0, 0.0, -1.0}});
  JordanBlockSpec b1;
  b1.lambda_r = 0.75;
  b1.col_begin = 1;
  JordanBlockSpec b2;
  b2.lambda_r = 0.8;
  b2.col_begin = 2;
  s.blocks.push_back(b1);
  s.blocks.push_back(b2);
  auto model = model_from_spectral_spec(s);
  double third = 1.0 / 3.0;
  model.set_initial_state({third, third, third});
  return model;
}

// Circulant three-color chain with a subcritical conjugate pair.
inline UrnModel rotation_model() {
  auto r = StochasticMatrix::from_matrix(Matrix::from_rows(
      {{0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}, {0.5, 0.3, 0.2}}));
  return model_from_matrix(r);
}

// Circulant whose pair sits exactly on the critical line.
inline UrnModel rotation_critical_model() {
  double a = 2.0 / 3.0, b = 1.0 / 3.0;
  auto r = StochasticMatrix::from_matrix(
      Matrix::from_rows({{a, b, 0.0}, {0.0, a, b}, {b, 0.0, a}}));
  return model_from_matrix(r);
}

// Three colors, one supercritical Jordan chain of length 2.
inline UrnModel super_d2_model() {
  SpectralSpec s;
  s.k = 3;
  s.combination = Matrix::from_rows(
      {{1.0, 0.1, 0.0}, {1.0, -0.1, 1.0}, {1.0, 0.0, -1.0}});
  JordanBlockSpec b;
  b.lambda_r = 0.75;
  b.d = 2;
  b.col_begin = 1;
  s.blocks.push_back(b);
  return model_from_spectral_spec(s);
}

}  // namespace urnclt::testfix
