#include "doctest.h"

#include "sqmod/constants.hpp"
#include "sqmod/params.hpp"

#include <cmath>

using namespace sqmod;

namespace {

ProbeParams nominal_probe() {
    ProbeParams p;
    p.power_avg_w = 0.2e-3;
    p.wavelength_m = 740.0e-9;
    p.squeezing_phi = 1.0;
    return p;
}

DetectionParams nominal_det() {
    DetectionParams d;
    d.eta = 1.0;
    d.load_r_ohm = 50.0;
    d.rbw_hz = 1.0e4;
    d.m_avg = 1.0;
    return d;
}

} // namespace

TEST_CASE("phi/dB conversion uses the noise-power convention") {
    CHECK(phi_from_db(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi_from_db(-1.6) == doctest::Approx(0.6918309709189364).epsilon(1e-12));
    CHECK(phi_from_db(-2.6) == doctest::Approx(0.5495408738576245).epsilon(1e-12));
    // consistency anchor: 1/phi(-1.6 dB) reproduces the optimal advantage 1.45
    CHECK(1.0 / phi_from_db(-1.6) == doctest::Approx(1.4454397707459274).epsilon(1e-12));
}

TEST_CASE("phi/dB round trip to 1e-12 relative over [0.01, 100]") {
    for (double x = 0.01; x <= 100.0; x *= 1.171) {
        CHECK(phi_from_db(db_from_phi(x)) == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK_THROWS_AS(db_from_phi(0.0), ParamError);
    CHECK_THROWS_AS(phi_from_db(std::nan("")), ParamError);
}

TEST_CASE("mean photocurrent at 0.2 mW, 740 nm, eta 1") {
    const double i0 = mean_photocurrent(nominal_probe(), nominal_det());
    CHECK(i0 == doctest::Approx(1.1937005034590867e-4).epsilon(1e-12));

    ProbeParams dark = nominal_probe();
    dark.power_avg_w = 0.0;
    CHECK(mean_photocurrent(dark, nominal_det()) == 0.0);

    DetectionParams blind = nominal_det();
    blind.eta = 0.0;
    CHECK(mean_photocurrent(nominal_probe(), blind) == 0.0);
}

TEST_CASE("mean photocurrent is linear in P and eta") {
    ProbeParams p = nominal_probe();
    DetectionParams d = nominal_det();
    d.eta = 0.37;
    const double base = mean_photocurrent(p, d);
    p.power_avg_w *= 2.0;
    CHECK(mean_photocurrent(p, d) == 2.0 * base);
    p.power_avg_w /= 2.0;
    d.eta *= 2.0;
    CHECK(mean_photocurrent(p, d) == 2.0 * base);
}

TEST_CASE("mean photon count") {
    CHECK(mean_photon_count(1.19e-4, 1.0e4) == doctest::Approx(7.427395798608308e10).epsilon(1e-12));
    CHECK(mean_photon_count(0.0, 1.0e4) == 0.0);
    const double n1 = mean_photon_count(1.19e-4, 1.0e4);
    const double n2 = mean_photon_count(1.19e-4, 2.0e4);
    CHECK(n2 == doctest::Approx(0.5 * n1).epsilon(1e-15));
    CHECK_THROWS_AS(mean_photon_count(1.0e-4, 0.0), std::domain_error);
    CHECK_THROWS_AS(mean_photon_count(1.0e-4, -5.0), std::domain_error);
}

TEST_CASE("modulation factors") {
    for (double dm : {0.0, 1.0e-6, 1.0e-5, 1.0e-4, 1.0e-3, 9.9e-3}) {
        const auto m = ModulationParams::make(dm, 1.0e7);
        CHECK(m.psi_m == dm / 2.0);
        CHECK(m.psi0 == 1.0 - dm / 2.0);
        CHECK(m.psi0 + m.psi_m == 1.0); // exact
    }
    CHECK_THROWS_AS(ModulationParams::make(0.01, 1.0e7), ParamError);
    CHECK_THROWS_AS(ModulationParams::make(-1.0e-4, 1.0e7), ParamError);
    CHECK_THROWS_AS(ModulationParams::make(1.0e-4, 0.0), ParamError);
}

TEST_CASE("parameter invariants are enforced") {
    ProbeParams p = nominal_probe();
    p.wavelength_m = 0.0;
    CHECK_THROWS_AS(p.validate(), ParamError);
    p = nominal_probe();
    p.squeezing_phi = 0.0;
    CHECK_THROWS_AS(p.validate(), ParamError);

    DetectionParams d = nominal_det();
    d.eta = 1.5;
    CHECK_THROWS_AS(d.validate(), ParamError);
    d = nominal_det();
    d.m_avg = 0.5;
    CHECK_THROWS_AS(d.validate(), ParamError);
    d = nominal_det();
    d.rbw_hz = 0.0;
    CHECK_THROWS_AS(d.validate(), ParamError);
}

TEST_CASE("squeezing band must cover the sideband") {
    ProbeParams p = nominal_probe();
    p.squeeze_bandwidth_hz = 1.0e7; // Lambda/2 = 5 MHz < Omega
    const auto mod = ModulationParams::make(1.0e-4, 1.0e7);
    CHECK_THROWS_AS(check_band_covers_sideband(p, mod), ParamError);
    p.squeeze_bandwidth_hz = 1.0e8;
    CHECK_NOTHROW(check_band_covers_sideband(p, mod));
}
