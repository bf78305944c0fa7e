#pragma once

#include "kasnerlab/field.hpp"

namespace kasnerlab {

enum class SobolevKind { full, homogeneous };

// Pointwise |T|_Frame.
Field frame_norm(const Field& t);

// Pointwise |T|_g: upper indices lowered with g, lower indices raised with g^{-1}.
Field g_norm(const Field& t, const Field& g, const Field& ginv);

// Pointwise |dT|_g of the coordinate gradient (dT)_{a ...} = d_a T_{...}, which
// carries one extra covariant index. Only active directions contribute.
Field gradient_g_norm(const Field& t, const Field& g, const Field& ginv);
Field gradient_frame_norm(const Field& t);

// Scalar-field Lebesgue norms with the flat measure dx on the unit torus.
double l2_norm(const Field& scalar);
double sup_norm(const Field& scalar);
double min_value(const Field& scalar);
double max_value(const Field& scalar);

// Sobolev norms built from multi-index derivatives over the active directions:
// { sum_{|I| (<=|=) M} || |d_I T| ||_{L^2}^2 }^{1/2}. The first overload uses
// the frame norm; the second contracts with g. Throws ConfigError for M > 6.
double sobolev_norm(const Field& t, int order, SobolevKind kind);
double sobolev_norm(const Field& t, int order, SobolevKind kind, const Field& g, const Field& ginv);

// Same, applied to the gradient dT (so d_I dT has |I| + 1 derivatives).
double gradient_sobolev_norm(const Field& t, int order, SobolevKind kind);
double gradient_sobolev_norm(const Field& t, int order, SobolevKind kind, const Field& g, const Field& ginv);

// sum_{|I| <= M} || |d_I T|_Frame ||_{L^infty}.
double w_inf_norm(const Field& t, int order);

}  // namespace kasnerlab
