// Metric upgrade of parallel two-slit cameras seen through a projective
// transform.

#include <cstdio>

#include "twoslit/twoslit.hpp"

using namespace twoslit;

int main() {
  for (double noise : {0.0, 1e-4}) {
    SelfcalConfig cfg;
    cfg.noise = noise;
    const SelfcalReport r = run_selfcal_experiment(cfg);
    if (!r.ok()) {
      std::printf("noise %g: %s\n", noise, r.message.c_str());
      continue;
    }
    std::printf("noise %g\n  camera    true u   found u    true v   found v\n", noise);
    for (std::size_t i = 0; i < r.cameras.size(); ++i) {
      const CameraCalibration& c = r.upgrade->calibrations[i];
      std::printf("  %6zu %9.4f %9.4f %9.4f %9.4f\n", i, r.true_magnifications[i][0], c.magnification1,
                  r.true_magnifications[i][1], c.magnification2);
    }
    std::printf("  orthogonality error %.2e, affine error %.2e\n", r.similarity->orthogonality_error,
                r.similarity->affine_error);
  }
}
