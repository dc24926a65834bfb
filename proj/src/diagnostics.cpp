#include "snlab/diagnostics.hpp"

#include <cmath>
#include <string>

#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

std::vector<std::vector<double>> axis_marginals(const Grid& grid, std::span<const double> density) {
  const auto n = static_cast<std::size_t>(grid.points_per_axis());
  const auto d = static_cast<std::size_t>(grid.dimension());
  if (density.size() != grid.size()) throw InvalidArgument("density size does not match grid");
  std::vector<std::vector<double>> m(d, std::vector<double>(n, 0.0));
  if (d == 1) {
    m[0].assign(density.begin(), density.end());
    return m;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double* row = density.data() + (i * n + j) * n;
      const double s = pairwise_sum<double>(n, [&](std::size_t k) { return row[k]; });
      m[0][i] += s;
      m[1][j] += s;
      for (std::size_t k = 0; k < n; ++k) m[2][k] += row[k];
    }
  }
  return m;
}

DensityMoments density_moments(const Grid& grid, std::span<const double> density) {
  DensityMoments m;
  const auto marg = axis_marginals(grid, density);
  const auto x = grid.coordinates();
  const double dv = grid.cell_volume();
  m.mass = pairwise_sum<double>(x.size(), [&](std::size_t i) { return marg[0][i]; }) * dv;
  // x[0] = -L/2 is the same periodic point as +L/2, so it carries no first moment
  auto first = [&](std::size_t i) { return i == 0 ? 0.0 : x[i]; };
  double var = 0.0;
  for (std::size_t a = 0; a < marg.size(); ++a) {
    const auto& p = marg[a];
    const double m1 = pairwise_sum<double>(x.size(), [&](std::size_t i) { return p[i] * first(i); }) * dv / m.mass;
    const double m2 = pairwise_sum<double>(x.size(), [&](std::size_t i) {
                        return p[i] * (x[i] - m1) * (x[i] - m1);
                      }) * dv / m.mass;
    m.centre[a] = m1;
    var += m2;
  }
  m.width = std::sqrt(var);
  return m;
}

DiagnosticsRecord diagnostics(const WaveFunction& state, const PoissonSolver& solver, double kappa,
                              double time) {
  const Grid& grid = state.grid();
  if (!(grid == solver.grid())) throw InvalidArgument("solver grid does not match the state");
  const double n = field_norm(grid, state.amplitudes());
  if (!(std::abs(n - 1.0) <= 1e-6)) {
    throw ContractViolation("diagnostics need a normalized state, norm is " + std::to_string(n));
  }
  const RealField rho = state.density();
  const auto mom = density_moments(grid, rho);
  DiagnosticsRecord rec;
  rec.time = time;
  rec.norm = n;
  rec.kinetic_energy = kinetic_energy(grid, state.amplitudes());
  rec.gravitational_energy = kappa == 0.0 ? 0.0 : solver.interaction_energy(rho, kappa);
  rec.total_energy = rec.kinetic_energy + rec.gravitational_energy;
  rec.centre_of_mass = mom.centre;
  rec.width = mom.width;
  return rec;
}

DiagnosticsRecord diagnostics(const WaveFunction& state, const UnitSystem& units, double time) {
  const PoissonSolver solver(state.grid(), KernelSpec::default_for(state.grid()));
  return diagnostics(state, solver, units.kappa, time);
}

std::array<double, 2> half_axis_positions(const Grid& grid, std::span<const double> density, int axis,
                                          double split) {
  if (axis < 0 || axis >= grid.dimension()) throw InvalidArgument("axis out of range");
  const auto ua = static_cast<std::size_t>(axis);
  const double edge = -0.5 * grid.box_length();
  auto side = [&](bool left) {
    // a point exactly on the split counts half to each side; the edge point
    // -L/2 counts half to the left and half to the right at +L/2
    auto weight = [&](double x) {
      if (x == split || x == edge) return 0.5;
      return ((x < split) == left) ? 1.0 : 0.0;
    };
    auto place = [&](double x) { return (x == edge && !left) ? -x : x; };
    const double w = pairwise_sum<double>(density.size(), [&](std::size_t i) {
      return weight(grid.position(i)[ua]) * density[i];
    });
    const double s = pairwise_sum<double>(density.size(), [&](std::size_t i) {
      const double x = grid.position(i)[ua];
      return weight(x) * density[i] * place(x);
    });
    return w > 0.0 ? s / w : split;
  };
  return {side(true), side(false)};
}

}  // namespace snlab
