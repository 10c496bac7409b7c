#ifndef SQMOD_CONSTANTS_HPP
#define SQMOD_CONSTANTS_HPP

namespace sqmod {

// CODATA 2018 values (q and c are exact by definition since the SI redefinition).
struct PhysConstants {
    static constexpr double q    = 1.602176634e-19;   // electron charge, C
    static constexpr double hbar = 1.054571817e-34;   // reduced Planck constant, J s
    static constexpr double c    = 299792458.0;       // speed of light, m/s
};

} // namespace sqmod

#endif
