#pragma once

#include <array>

namespace kle_test {

// Leading 20 eigenvalues of the exponential covariance operator
// (sigma = 1, ell = 1) on [0, 1], discretized with the composite trapezoid
// rule on 2000 nodes. Reference grid fixed once; coarse-grid results are
// compared against these values.
inline constexpr std::array<double, 20> kExponentialSpectrumN2000 = {
    0.73881080642411989,     0.13800379822703812,
    0.045088521962693806,    0.02132896954879273,
    0.012278953551695837,    0.0079454114328515735,
    0.0055511101381661501,   0.0040933714834407164,
    0.0031415029383168708,   0.0024862696921357369,
    0.0020162617421337885,   0.0016677953570748711,
    0.0014023503697382328,   0.0011955273876312908,
    0.0010312671990200441,   0.00089865197820525647,
    0.00079005061195845455,  0.00069999971344009094,
    0.00062450492644811474,  0.00056059140721877491,
};

}  // namespace kle_test
