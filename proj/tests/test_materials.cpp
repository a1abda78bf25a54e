// Copyright (c) 2026 the eddycurl authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "eddycurl/grid.hpp"
#include "eddycurl/materials.hpp"

using namespace eddycurl;

TEST_CASE("constant model validates and reports exact ranges", "[materials]") {
  Complex cx = build_complex({4, 4, 4, 1.0, 1.0, 1.0});
  MaterialModel m = MaterialModel::constant(cx, 2.0, Sym3::diagonal(1.0, 2.0, 4.0), 4.0);
  MaterialReport rep = validate(cx, m);
  CHECK(rep.feasible);
  CHECK(rep.mu_min == 2.0);
  CHECK(rep.mu_max == 2.0);
  CHECK(rep.sigma_eig_min == Catch::Approx(1.0));
  CHECK(rep.sigma_eig_max == Catch::Approx(4.0));
  CHECK(rep.mu_lipschitz_estimate == 0.0);
  CHECK(rep.warnings.empty());
}

TEST_CASE("structure bounds reject out-of-range coefficients", "[materials]") {
  Complex cx = build_complex({2, 2, 2, 1.0, 1.0, 1.0});
  // mu above Lambda.
  CHECK_THROWS_AS(validate(cx, MaterialModel::constant(cx, 3.0, Sym3::identity(), 2.0)),
                  ValidationError);
  // mu below 1/Lambda.
  CHECK_THROWS_AS(validate(cx, MaterialModel::constant(cx, 0.1, Sym3::identity(), 2.0)),
                  ValidationError);
  // sigma eigenvalue below 1/Lambda.
  CHECK_THROWS_AS(
      validate(cx, MaterialModel::constant(cx, 1.0, Sym3::diagonal(0.1, 1.0, 1.0), 5.0)),
      ValidationError);
  // Lambda < 1 is never admissible.
  CHECK_THROWS_AS(validate(cx, MaterialModel::constant(cx, 1.0, Sym3::identity(), 0.9)),
                  ValidationError);
  // Wrong array lengths.
  MaterialModel bad = MaterialModel::constant(cx, 1.0, Sym3::identity(), 2.0);
  bad.mu.conservativeResize(3);
  CHECK_THROWS_AS(validate(cx, bad), ValidationError);
}

TEST_CASE("two-layer split at z=0.5 on a 4^3 grid is exactly half/half", "[materials]") {
  Complex cx = build_complex({4, 4, 4, 1.0, 1.0, 1.0});
  MaterialModel m =
      two_layer(cx, 1.0, 2.0, Sym3::identity(1.0), Sym3::identity(0.5), 0.5, 2.0);
  int bottom = 0, top = 0;
  for (Index c = 0; c < cx.n_cells; ++c) {
    if (m.mu[c] == 1.0) ++bottom;
    if (m.mu[c] == 2.0) ++top;
    const bool is_top = cx.cell_center(c)[2] > 0.5;
    CHECK(m.mu[c] == (is_top ? 2.0 : 1.0));
    CHECK(m.sigma[size_t(c)].xx == (is_top ? 0.5 : 1.0));
  }
  CHECK(bottom == 32);
  CHECK(top == 32);
  CHECK(validate(cx, m).feasible);
}

TEST_CASE("minimal feasible Lambda is sharp", "[materials]") {
  Complex cx = build_complex({4, 4, 4, 1.0, 1.0, 1.0});
  MaterialModel m =
      two_layer(cx, 1.0, 10.0, Sym3::identity(1.0), Sym3::identity(1.0), 0.5, 10.0);
  const double need = minimal_feasible_lambda(m);
  CHECK(need == Catch::Approx(10.0));
  m.lambda = need;
  CHECK_NOTHROW(validate(cx, m));
  m.lambda = need * (1.0 - 1e-3);
  CHECK_THROWS_AS(validate(cx, m), ValidationError);
}

TEST_CASE("sharp mu contrast triggers the Lipschitz warning but stays feasible",
          "[materials]") {
  Complex cx = build_complex({4, 4, 4, 1.0, 1.0, 1.0});
  MaterialModel m =
      two_layer(cx, 1.0, 10.0, Sym3::identity(1.0), Sym3::identity(1.0), 0.5, 10.0);
  MaterialReport rep = validate(cx, m);
  CHECK(rep.feasible);
  // |mu jump| / h = 9 / 0.25 = 36 > Lambda = 10.
  CHECK(rep.mu_lipschitz_estimate == Catch::Approx(36.0));
  REQUIRE_FALSE(rep.warnings.empty());
}

TEST_CASE("symmetric 3x3 inversion is exact and rejects singular tensors", "[materials]") {
  Sym3 s{4.0, 3.0, 5.0, 1.0, 0.5, -0.75};
  Sym3 inv = invert_sym3(s);
  Eigen::Matrix3d prod = s.dense() * inv.dense();
  CHECK((prod - Eigen::Matrix3d::Identity()).norm() < 1e-12);

  Sym3 singular{1.0, 1.0, 0.0, 1.0, 0.0, 0.0};  // rank 1 block
  CHECK_THROWS_AS(invert_sym3(singular), ValidationError);
}

TEST_CASE("sigma_inverse inverts every cell", "[materials]") {
  Complex cx = build_complex({2, 2, 2, 1.0, 1.0, 1.0});
  MaterialModel m =
      two_layer(cx, 1.0, 1.0, Sym3::diagonal(1.0, 2.0, 4.0), Sym3{2.0, 2.0, 2.0, 0.5, 0.0, 0.5},
                0.5, 8.0);
  auto inv = m.sigma_inverse();
  for (size_t c = 0; c < inv.size(); ++c) {
    Eigen::Matrix3d prod = m.sigma[c].dense() * inv[c].dense();
    CHECK((prod - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  }
}
