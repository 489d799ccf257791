// Linear structure from motion on synthetic correspondences at several
// noise levels.

#include <cstdio>

#include "twoslit/twoslit.hpp"

using namespace twoslit;

int main() {
  std::printf("%10s %14s %14s %14s\n", "sigma", "epipolar max", "rms first", "rms second");
  for (double sigma : {0.0, 1e-6, 1e-5, 1e-4}) {
    SceneConfig cfg;
    cfg.sigma = sigma;
    const SfmReport r = run_sfm_experiment(generate_scene(cfg));
    if (!r.ok()) {
      std::printf("%10.0e failed: %s\n", sigma, r.message.c_str());
      continue;
    }
    std::printf("%10.0e %14.3e %14.3e %14.3e\n", sigma, r.epipolar.max_abs, r.reprojection_rms[0],
                r.reprojection_rms[1]);
  }
}
