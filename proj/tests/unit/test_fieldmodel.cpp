#include <random>

#include <gtest/gtest.h>

#include "fringemag/errors.hpp"
#include "fringemag/fieldmodel.hpp"
#include "oracles.hpp"

using namespace fringemag;

namespace {

CuboidMagnet ndfeb_block(double distance) {
  CuboidMagnet m;
  m.half_extents = Vec3(0.005, 0.01, 0.01);
  m.magnetization = Vec3(1.3, 0.0, 0.0);
  m.center = Vec3(-(distance + 0.005), -0.006, 0.0);
  return m;
}

double relative(const Vec3& a, const Vec3& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(LoopField, OnAxisMatchesClosedForm) {
  CurrentLoop loop{Vec3::Zero(), Vec3::UnitZ(), 0.04, 2.5};
  for (int i = 0; i < 50; ++i) {
    const double z = -0.2 + 0.4 * i / 49.0 + 1e-4;
    const Vec3 B = loop_field(loop, Vec3(0, 0, z));
    const double expected = oracle::loop_axis_field(0.04, 2.5, z);
    EXPECT_NEAR(B.z(), expected, 1e-8 * std::abs(expected)) << "z = " << z;
    EXPECT_NEAR(B.head<2>().norm(), 0.0, 1e-12 * std::abs(expected));
  }
}

TEST(LoopField, EllipticAgreesWithLineIntegral) {
  const CurrentLoop loop{Vec3(0.01, -0.02, 0.03), Vec3(1, 2, 2).normalized(), 0.04, 1.0};
  FieldOptions fine;
  fine.loop_method = LoopMethod::Quadrature;
  fine.loop_segments = 4096;
  for (const Vec3& p : {Vec3(0.05, 0.01, -0.02), Vec3(0.0, 0.0, 0.1), Vec3(-0.03, 0.07, 0.02)}) {
    EXPECT_LT(relative(loop_field(loop, p, fine), loop_field(loop, p)), 1e-9);
  }
}

TEST(LoopField, OnFilamentIsSingular) {
  const CurrentLoop loop{Vec3::Zero(), Vec3::UnitZ(), 0.04, 1.0};
  EXPECT_THROW(loop_field(loop, Vec3(0.04, 0, 0)), SingularityError);
}

TEST(CoilAssembly, DefaultHas104Loops) {
  EXPECT_EQ(build_anti_helmholtz(CoilAssemblySpec{}).loops.size(), 104u);
}

TEST(CoilAssembly, FieldVanishesAtCenter) {
  EXPECT_LT(field(build_anti_helmholtz(CoilAssemblySpec{}), Vec3::Zero()).norm(), 1e-9);
}

TEST(CoilAssembly, AxialFieldIsOdd) {
  const FieldSource coils = build_anti_helmholtz(CoilAssemblySpec{});
  for (double xi = 0.002; xi < 0.1; xi += 0.0071) {
    const double plus = field(coils, Vec3(xi, 0, 0)).x();
    const double minus = field(coils, Vec3(-xi, 0, 0)).x();
    EXPECT_NEAR(plus, -minus, 1e-10 * std::abs(plus)) << "xi = " << xi;
  }
}

TEST(CoilAssembly, LinearInCurrent) {
  CoilAssemblySpec spec;
  const Vec3 p(0.01, 0.004, 0.02);
  const Vec3 one = field(build_anti_helmholtz(spec), p);
  spec.current = 3.0;
  EXPECT_LT(relative(field(build_anti_helmholtz(spec), p), 3.0 * one), 1e-12);
}

TEST(CuboidField, MatchesSurfaceChargeQuadrature) {
  CuboidMagnet m = ndfeb_block(0.005);
  m.magnetization = Vec3(1.3, 0.2, -0.4);
  for (const Vec3& p : {Vec3(0.0, 0.0, 0.0), Vec3(0.003, -0.006, 0.004), Vec3(0.01, 0.02, -0.03),
                        Vec3(-0.01, 0.015, 0.0), Vec3(-0.02, -0.006, 0.02)}) {
    const Vec3 expected =
        oracle::cuboid_surface_charge(m.center, m.half_extents, m.magnetization, p);
    EXPECT_LT(relative(cuboid_field(m, p), expected), 1e-8) << p.transpose();
  }
}

TEST(CuboidField, FarFieldIsDipolar) {
  const CuboidMagnet m = ndfeb_block(0.005);
  const double volume = 8.0 * m.half_extents.prod();
  const Vec3 moment = m.magnetization * volume / oracle::kMu0;
  const Vec3 r(0.7, 0.3, -0.5);
  EXPECT_LT(relative(cuboid_field(m, m.center + r), oracle::dipole_field(moment, r)), 1e-3);
}

TEST(CuboidField, InsideBodyThrows) {
  const CuboidMagnet m = ndfeb_block(0.005);
  EXPECT_THROW(cuboid_field(m, m.center), InsideBodyError);
}

TEST(CuboidField, RotationMatchesRotatedMagnetization) {
  CuboidMagnet cube;
  cube.half_extents = Vec3::Constant(0.005);
  cube.magnetization = Vec3(1.0, 0.0, 0.0);
  CuboidMagnet turned = cube;
  // A cube rotated by 90 degrees about z occupies the same volume.
  turned.orientation = Eigen::AngleAxisd(oracle::kPi / 2, Vec3::UnitZ()).toRotationMatrix();
  turned.magnetization = Vec3(0.0, -1.0, 0.0);
  const Vec3 p(0.02, 0.013, -0.007);
  EXPECT_LT(relative(cuboid_field(turned, p), cuboid_field(cube, p)), 1e-12);
}

TEST(FieldSource, Superposes) {
  FieldSource coils = build_anti_helmholtz(CoilAssemblySpec{});
  FieldSource magnet;
  magnet.cuboids.push_back(ndfeb_block(0.01));
  const Vec3 p(0.004, 0.001, 0.02);
  EXPECT_LT(relative(field(coils + magnet, p), field(coils, p) + field(magnet, p)), 1e-14);
}

TEST(FieldSource, UniformBackgroundHasNoGradient) {
  FieldSource s;
  s.background = Vec3(1e-4, 0, 2e-5);
  const Mat3 J = field_jacobian(s, Vec3(0.1, 0.2, 0.3));
  EXPECT_LT(J.norm(), 1e-12);
}

TEST(FieldSource, RejectsDivergentBackgroundGradient) {
  FieldSource s;
  s.background_gradient(0, 0) = 1.0;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(FieldSource, MaxwellAtRandomPoints) {
  FieldSource coils = build_anti_helmholtz(CoilAssemblySpec{});
  FieldSource magnet;
  magnet.cuboids.push_back(ndfeb_block(0.005));
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> box(-0.025, 0.025);
  for (int i = 0; i < 100; ++i) {
    const bool near_magnet = i % 2;
    Vec3 p(box(rng), box(rng), box(rng));
    if (near_magnet) p.x() = 0.002 + std::abs(p.x());
    const Mat3 J = field_jacobian(near_magnet ? magnet : coils, p);
    const double scale = J.norm();
    EXPECT_LT(std::abs(J.trace()), 1e-6 * scale);
    EXPECT_LT((J - J.transpose()).norm(), 1e-6 * scale);
  }
}

TEST(FieldSource, GradBMagnitudeNeedsField) {
  EXPECT_THROW(grad_bmag(build_anti_helmholtz(CoilAssemblySpec{}), Vec3::Zero()), FieldZeroError);
}
