#include "capinf/elliptic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace capinf;

namespace {

Vector point3(double x, double y, double z) {
  Vector p(3);
  p << x, y, z;
  return p;
}

}  // namespace

TEST_CASE("constants and linear functions are scheme-exact") {
  GridPtr grid = make_uniform_box_grid(3, 2.0, 0.25, nullptr);
  CoefficientField id = make_identity_field(3);
  SolveParams params;
  params.rel_tol = 1e-12;

  GridFunction constant = solve_dirichlet(grid, id, constant_bc(0.0, 3.5), params);
  for (long long c = 0; c < grid->total_cells; ++c)
    CHECK(constant.values[c] == doctest::Approx(3.5).epsilon(1e-10));

  BoundaryData linear_bc{[](const Vector& x) { return x[0]; },
                         [](const Vector& x) { return x[0]; }};
  GridFunction linear = solve_dirichlet(grid, id, linear_bc, params);
  std::vector<long long> idx(3);
  Vector x(3);
  for (long long c = 0; c < grid->total_cells; ++c) {
    grid->multi_index(c, idx);
    grid->cell_center(idx, x);
    CHECK(linear.values[c] == doctest::Approx(x[0]).epsilon(1e-8));
  }
}

TEST_CASE("discrete maximum principle") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {0.3, 0.2, 0, 0.8}, 3);
  GridPtr grid = make_uniform_sphere_grid(3, 6.0, 0.25, &ball);
  SolveParams params;
  params.rel_tol = 1e-14;
  for (const CoefficientField& field :
       {make_identity_field(3), make_checkerboard_field(3, 2.0, 0.5)}) {
    GridFunction u = solve_dirichlet(grid, field, constant_bc(1.0, 0.0), params);
    double lo = 1e300, hi = -1e300;
    for (long long c = 0; c < grid->total_cells; ++c) {
      lo = std::min(lo, u.values[c]);
      hi = std::max(hi, u.values[c]);
    }
    MESSAGE("max principle excess: below ", -lo, " above ", hi - 1.0);
    CHECK(lo >= -1e-12);
    CHECK(hi <= 1.0 + 1e-12);
  }
}

TEST_CASE("linearity of the solve") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {0.8}, 3);
  GridPtr grid = make_uniform_sphere_grid(3, 5.0, 0.25, &ball);
  CoefficientField field = make_checkerboard_field(3, 2.0, 0.5);
  SolveParams params;
  params.rel_tol = 1e-13;

  BoundaryData g{[](const Vector& x) { return std::sin(x[0]) * 0.5 + 0.5; },
                 [](const Vector& x) { return 0.25 * x.norm() / 5.0; }};
  const double a = 2.5, b = -0.75;
  BoundaryData ag_plus_b{[&](const Vector& x) { return a * g.obstacle(x) + b; },
                         [&](const Vector& x) { return a * g.outer(x) + b; }};
  GridFunction u = solve_dirichlet(grid, field, g, params);
  GridFunction v = solve_dirichlet(grid, field, ag_plus_b, params);
  double worst = 0.0;
  for (long long c = 0; c < grid->total_cells; ++c)
    worst = std::max(worst, std::abs(v.values[c] - (a * u.values[c] + b)));
  MESSAGE("linearity defect: ", worst);
  CHECK(worst <= 1e-8);
}

TEST_CASE("complement identity") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {0.8}, 3);
  GridPtr grid = make_uniform_sphere_grid(3, 5.0, 0.25, &ball);
  CoefficientField field = make_identity_field(3);
  SolveParams params;
  params.rel_tol = 1e-13;
  BoundaryData g{[](const Vector& x) { return 0.5 + 0.3 * std::cos(x[1]); },
                 [](const Vector&) { return 1.0; }};
  BoundaryData one_minus_g{[&](const Vector& x) { return 1.0 - g.obstacle(x); },
                           [&](const Vector& x) { return 1.0 - g.outer(x); }};
  GridFunction u = solve_dirichlet(grid, field, g, params);
  GridFunction v = solve_dirichlet(grid, field, one_minus_g, params);
  double worst = 0.0;
  for (long long c = 0; c < grid->total_cells; ++c)
    worst = std::max(worst, std::abs(v.values[c] - (1.0 - u.values[c])));
  MESSAGE("complement defect: ", worst);
  CHECK(worst <= 1e-8);
}

TEST_CASE("capacitary potential of the unit ball") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  CoefficientField id = make_identity_field(3);
  for (double h : {1.0 / 6, 1.0 / 12}) {
    GridPtr grid = make_uniform_sphere_grid(3, 4.0, h, &ball);
    CapacitaryResult res = capacitary_potential(grid, id);
    const double zeta_at_2 = res.potential.interpolate(point3(2, 0, 0));
    MESSAGE("h=", h, " capacity=", res.capacity, " condenser=", res.capacity_raw,
            " zeta(2)=", zeta_at_2);
    CHECK(res.capacity == doctest::Approx(1.0).epsilon(0.08));
    // truncated radial solution at the grid's outer sphere R = 4
    CHECK(zeta_at_2 == doctest::Approx((0.5 - 0.25) / (1.0 - 0.25)).epsilon(0.08));
    for (long long c = 0; c < grid->total_cells; ++c) {
      CHECK(res.potential.values[c] >= -1e-12);
      CHECK(res.potential.values[c] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("capacitary potential decays like the fundamental solution") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  CoefficientField id = make_identity_field(3);
  GridPtr grid = make_uniform_sphere_grid(3, 8.0, 0.25, &ball);
  CapacitaryResult res = capacitary_potential(grid, id);
  // truncated radial solution (1/r - 1/R) / (1 - 1/R)
  const double R = 8.0;
  for (double r : {2.0, 3.0, 5.0}) {
    const double expected = (1.0 / r - 1.0 / R) / (1.0 - 1.0 / R);
    const double got = res.potential.interpolate(point3(r, 0, 0));
    CHECK(got / expected == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("discrete green function comparability") {
  CoefficientField id = make_identity_field(3);
  const double R = 4.0;
  GridPtr grid = make_uniform_sphere_grid(3, R, 1.0 / 8, nullptr);
  const Vector y = point3(1.0 / 16, 1.0 / 16, 1.0 / 16);  // a cell center
  GridFunction g = discrete_green(grid, id, y);
  double worst = 0.0;
  // compare against the truncated radial kernel 1/r - 1/R up to R/4
  for (double r : {0.375, 0.5, 0.75, 1.0}) {
    for (int axis = 0; axis < 3; ++axis) {
      Vector x = y;
      x[axis] += r;
      const double product = g.interpolate(x) / (1.0 / r - 1.0 / R);
      worst = std::max(worst, std::abs(product - 1.0));
    }
  }
  MESSAGE("identity-field green product deviation: ", worst);
  CHECK(worst <= 0.1);
  for (long long c = 0; c < grid->total_cells; ++c) CHECK(g.values[c] >= -1e-12);

  CHECK_THROWS_AS(discrete_green(grid, id, point3(10, 0, 0), SolveParams{}), DomainError);
}

TEST_CASE("harmonic measure of the exterior ball by truncated solves") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  CoefficientField id = make_identity_field(3);
  MeasurePdeResult res = harmonic_measure_pde(ball, point3(2, 0, 0), {4, 8, 16}, id, 1.0 / 6);
  for (size_t i = 0; i < res.radii.size(); ++i) {
    const double R = res.radii[i];
    const double expected = 0.5 / (1.0 - 1.0 / R);
    MESSAGE("R=", R, " value=", res.values[i], " radial=", expected);
    CHECK(res.values[i] == doctest::Approx(expected).epsilon(0.06));
  }
  for (size_t i = 1; i < res.values.size(); ++i) CHECK(res.values[i] <= res.values[i - 1]);
  MESSAGE("extrapolated: ", res.extrapolated);
  CHECK(res.extrapolated == doctest::Approx(0.5).epsilon(0.07));

  // graded master grid: finer near the obstacle, same nesting guarantees
  PdeMeasureOptions graded;
  graded.h = 1.0 / 16;
  graded.fine_radius = 2.5;
  MeasurePdeResult fine = harmonic_measure_pde(ball, point3(2, 0, 0), {4, 8, 16}, id, graded);
  MESSAGE("graded extrapolated: ", fine.extrapolated, " cells ", fine.finest_cells);
  CHECK(fine.extrapolated == doctest::Approx(0.5).epsilon(0.025));

  // no obstacle: identically one at every radius
  SetSpec empty = make_canonical(ShapeKind::Empty, {}, 3);
  MeasurePdeResult one = harmonic_measure_pde(empty, point3(2, 0, 0), {4, 8}, id, 0.5);
  CHECK(one.values[0] == 1.0);
  CHECK(one.values[1] == 1.0);
  CHECK(one.extrapolated == 1.0);

  CHECK_THROWS_AS(harmonic_measure_pde(ball, point3(0.5, 0, 0), {4, 8}, id, 0.25), DomainError);
  CHECK_THROWS_AS(harmonic_measure_pde(ball, point3(3, 0, 0), {4, 8}, id, 0.25), ParameterError);
}

TEST_CASE("variational capacity under a constant-lambda field stays comparable") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  CoefficientField id = make_identity_field(3);
  CoefficientField cb = make_checkerboard_field(3, 2.0, 0.5);
  GridPtr grid = make_uniform_sphere_grid(3, 4.0, 1.0 / 8, &ball);
  const double cap_id = capacitary_potential(grid, id).capacity;
  const double cap_cb = capacitary_potential(grid, cb).capacity;
  MESSAGE("identity ", cap_id, " checkerboard ", cap_cb);
  CHECK(cap_cb >= cap_id / 4.0);
  CHECK(cap_cb <= cap_id * 4.0);
}

TEST_CASE("graded grids reproduce uniform results") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  CoefficientField id = make_identity_field(3);
  std::vector<AxisGrading> axes(3, AxisGrading{-1.2, 1.2, 1.0 / 10, -4.0, 4.0, 1.3});
  GridPtr graded = make_graded_sphere_grid(3, axes, 4.0, &ball);
  CapacitaryResult res = capacitary_potential(graded, id);
  MESSAGE("graded capacity: ", res.capacity, " cells ", graded->total_cells);
  CHECK(res.capacity == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("grid dumps round-trip") {
  namespace fs = std::filesystem;
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 3);
  GridPtr grid = make_uniform_sphere_grid(3, 3.0, 0.5, &ball);
  GridFunction u = solve_dirichlet(grid, make_identity_field(3), constant_bc(1.0, 0.0));
  const std::string dir = (fs::temp_directory_path() / "capinf_grid_io").string();
  fs::create_directories(dir);
  write_grid_binary(u, dir + "/u.bin");
  GridFunction v = read_grid_binary(dir + "/u.bin");
  REQUIRE(v.values.size() == u.values.size());
  CHECK((v.values - u.values).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(v.grid->cells_per_axis == grid->cells_per_axis);

  write_slice_csv(u, 2, grid->cells_per_axis[2] / 2, dir + "/slice.csv");
  std::ifstream slice(dir + "/slice.csv");
  std::string header;
  std::getline(slice, header);
  CHECK(header == "x0,x1,value");
  fs::remove_all(dir);
}

TEST_CASE("four dimensional solve") {
  SetSpec ball = make_canonical(ShapeKind::Ball, {1.0}, 4);
  CoefficientField id = make_identity_field(4);
  GridPtr grid = make_uniform_sphere_grid(4, 4.0, 0.25, &ball);
  CapacitaryResult res = capacitary_potential(grid, id);
  MESSAGE("4d ball capacity: ", res.capacity);
  CHECK(res.capacity == doctest::Approx(1.0).epsilon(0.12));
}
