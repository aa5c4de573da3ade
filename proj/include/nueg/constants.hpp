#pragma once

#include <cmath>

namespace nueg::constants {

// Graf-Schenker localization constant pi (1 + 2 sqrt 2) / 4.
inline double c_gs() { return M_PI * (1.0 + 2.0 * std::sqrt(2.0)) / 4.0; }

// Thomas-Fermi constant (3/5) (2 pi)^2 (4 pi / 3)^{-2/3} (spinless).
inline double c_tf() { return 0.6 * std::pow(2.0 * M_PI, 2) * std::pow(4.0 * M_PI / 3.0, -2.0 / 3.0); }

// Best known 3D Coulomb Lieb-Oxford constant.
inline constexpr double c_lo_3d = 1.58;

// Lieb-Narnhofer lower bound on c_UEG: -(3/5) (9 pi / 2)^{1/3}.
inline double lieb_narnhofer_floor() { return -0.6 * std::cbrt(4.5 * M_PI); }

// Morrey constant bound on tetrahedra, p > 3.
inline double c_mo(double p) { return 2.0 * std::pow(24.0, 1.0 / p) * (p - 1.0) / (p + 1.0); }

} // namespace nueg::constants
