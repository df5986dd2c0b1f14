// Evolves a Gaussian and prints energy and modified energies along the way.
//   energy_drift [amplitude] [t_final]

#include <cstdio>
#include <cstdlib>

#include "nlwave/evolve.hpp"
#include "nlwave/functionals.hpp"

int main(int argc, char** argv) {
  using namespace nlwave;
  const double amp = argc > 1 ? std::atof(argv[1]) : 1.0;
  const double T = argc > 2 ? std::atof(argv[2]) : 2.0;

  const GridPtr grid = make_grid(32.0, 1024);
  ProfileParams p;
  p.kind = ProfileKind::gaussian;
  p.amplitude = amp;
  const State s0(sample_profile(p, grid), RadialField(grid));

  EvolveParams ep;
  ep.dt = 1e-3;
  ep.t_final = T;
  ep.snapshot_stride = 250;
  const auto tr = evolve(s0, ep).trajectory;

  const double E0 = energy(s0);
  std::printf("%8s %22s %12s %22s\n", "t", "E", "rel drift", "E(Iu), N=2 s=0.75");
  for (const auto& s : tr.snapshots)
    std::printf("%8.3f %22.15e %12.3e %22.15e\n", s.t, energy(s), (energy(s) - E0) / E0, modified_energy(s, 2.0, 0.75));
}
